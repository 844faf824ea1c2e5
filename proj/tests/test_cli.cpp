#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "kbilip/cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(KBILIP_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(KBILIP_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "kbilip_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

json load(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

void save(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

}  // namespace

TEST_CASE("check-contact exit codes") {
  auto same = run("check-contact " + data("x2.json") + " " + data("twox2.json"));
  CHECK(same.code == 0);
  auto report = json::parse(same.out);
  CHECK(report["verdict"]["kind"] == "Equivalent");
  CHECK(report["manifest"]["command"] == "check-contact");

  CHECK(run("check-contact " + data("x.json") + " " + data("x2.json")).code == 1);
  CHECK(run("check-contact " + data("x_x2.json") + " " + data("x2.json") + " --fi 1").code == 0);
  CHECK(run("check-contact " + data("x_x2.json") + " " + data("x2.json") + " --fi 5").code == 3);

  auto bad = run("check-contact " + data("malformed.json") + " " + data("x2.json"));
  CHECK(bad.code == 3);
  auto err = json::parse(bad.out);
  CHECK(err["error"]["location"].get<std::string>().find("components[0][0].coef") !=
        std::string::npos);
  CHECK(run("check-contact " + data("missing.json") + " " + data("x2.json")).code == 3);
  CHECK(run("check-contact " + data("x.json")).code == 3);
  CHECK(run("check-contact " + data("x.json") + " " + data("x.json") + " --scheme-rho 2").code ==
        3);
}

TEST_CASE("equiv exit codes") {
  CHECK(run("equiv " + data("x.json") + " " + data("x2.json")).code == 1);
  CHECK(run("equiv " + data("x1x2.json") + " " + data("x1sq.json")).code == 2);
  CHECK(run("equiv " + data("x.json") + " " + data("x_x2.json")).code == 3);
  CHECK(run("equiv " + data("x.json") + " " + data("x.json") + " --catalog bogus:1").code == 3);
}

TEST_CASE("equiv then verify") {
  const auto report = scratch("equiv.json");
  auto e = run("equiv " + data("x_x2.json") + " " + data("2x_x2.json") + " --report " +
               report.string());
  REQUIRE(e.code == 0);
  auto doc = load(report);
  CHECK(doc["result"] == "certified");
  CHECK(doc["certificate"]["signs"] == json::array({1, 1}));

  auto v = run("verify " + data("x_x2.json") + " " + data("2x_x2.json") + " --homeo " +
               report.string() + " --json");
  CHECK(v.code == 0);
  CHECK(json::parse(v.out)["verification"]["pass"] == true);

  auto flipped = doc["certificate"];
  flipped["signs"][1] = -1;
  const auto flip_path = scratch("flipped.json");
  save(flip_path, flipped);
  CHECK(run("verify " + data("x_x2.json") + " " + data("2x_x2.json") + " --homeo " +
            flip_path.string()).code == 1);

  auto unknown = doc["certificate"];
  unknown["h"] = "warp:3";
  const auto unknown_path = scratch("unknown.json");
  save(unknown_path, unknown);
  CHECK(run("verify " + data("x_x2.json") + " " + data("2x_x2.json") + " --homeo " +
            unknown_path.string()).code == 3);

  CHECK(run("verify " + data("x.json") + " " + data("x2.json") + " --homeo " +
            report.string()).code == 3);
}

TEST_CASE("probe command") {
  auto p = run("probe " + data("probe_p1_21.json"));
  CHECK(p.code == 0);
  auto doc = json::parse(p.out);
  CHECK(doc["class_count"] == 2);
  CHECK(doc["unresolved_fraction"] == 0.0);
  CHECK(run("probe " + data("probe_empty.json")).code == 3);
  CHECK(run("probe " + data("x.json")).code == 3);
}

TEST_CASE("reports are deterministic") {
  for (const std::string args :
       {"check-contact " + data("x2.json") + " " + data("twox2.json"),
        "equiv " + data("x_x2.json") + " " + data("2x_x2.json"),
        "probe " + data("probe_p1_21.json")}) {
    auto a = run(args), b = run(args);
    CHECK(a.code == b.code);
    CHECK(kbilip::cli::strip_timestamps(json::parse(a.out)) ==
          kbilip::cli::strip_timestamps(json::parse(b.out)));
  }
  auto seeded = [&](int seed) {
    return kbilip::cli::strip_timestamps(json::parse(
        run("equiv " + data("x_x2.json") + " " + data("2x_x2.json") + " --seed " +
            std::to_string(seed)).out));
  };
  CHECK(seeded(3) == seeded(3));
  CHECK(seeded(3)["manifest"]["seed"] == 3);
}

TEST_CASE("summary mode") {
  const auto path = scratch("contact.json");
  auto r = run("check-contact " + data("x2.json") + " " + data("twox2.json") + " --report " +
               path.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("Equivalent") == 0);
  CHECK(load(path)["verdict"]["kind"] == "Equivalent");
}
