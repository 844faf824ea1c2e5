// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kbilip/cli.hpp"
#include "kbilip/contact.hpp"
#include "kbilip/homeo.hpp"
#include "kbilip/probe.hpp"
#include "kbilip/verifier.hpp"
#include "support.hpp"

using namespace kbilip;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes << " [" << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_s,
               const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0 && secs >= limit_s) {
    std::ostringstream m;
    m << "runtime " << secs << " s over " << limit_s << " s";
    o.require(false, m.str());
  }
  if (!o.pass) ++failures;
  std::printf("%s %d %s (%.2f s)%s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), secs,
              o.notes.str().c_str());
  std::fflush(stdout);
}

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "kbilip_acceptance";
  fs::create_directories(dir);
  return dir;
}

std::string write_germ(const std::string& name, const PolyGerm& f) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << serialize_germ(f);
  return p.string();
}

std::string data(const std::string& name) { return std::string(KBILIP_DATA_DIR) + "/" + name; }

// theta scaled by `factor`.
EvaluableMap scaled_theta(const PiecewiseHomeo& H, double factor) {
  EvaluableMap base = as_map(H);
  const int n = H.n();
  return {base.dim, [base, n, factor](std::span<const double> in, std::span<double> out) {
            base.forward(in, out);
            out[n] *= factor;
          }};
}

// Zero section moved to y = delta * f(x); the graph stays fixed.
EvaluableMap shifted_zero_section(const PiecewiseHomeo& H, double delta) {
  EvaluableMap base = as_map(H);
  const int n = H.n();
  return {base.dim, [base, H, n, delta](std::span<const double> in, std::span<double> out) {
            base.forward(in, out);
            out[n] += delta * (H.f_at(in.first(n)) - in[n]);
          }};
}

bool failed_with_witness(const CheckReport* r) { return r && !r->pass && r->witness; }

void synthesis_suite(Outcome& o) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> mag(0.2, 5.0);
  std::bernoulli_distribution neg(0.5);
  ToleranceConfig tol;
  tol.check_tol = 1e-9;
  const SampleScheme scheme;
  int passed = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + i % 3;
    const int k = 1 + (i / 3) % 4;
    const PolyGerm f = PolyGerm::scalar(testing::random_poly(n, k, rng), k);
    const double c = neg(rng) ? -mag(rng) : mag(rng);
    const PolyGerm g = f.scaled(c);
    const auto h = CoordChange::identity(n);
    const auto v = same_contact(f, g, scheme, tol);
    if (!v.related()) {
      o.require(false, "pair " + std::to_string(i) + " not related");
      continue;
    }
    const PiecewiseHomeo H = synth_single(f, g, h, v, tol);
    CheckBundle b = verify_fiber_construction(H, scheme, tol);
    const PointCloud cloud = fiber_cloud(f, scheme);
    std::vector<bool> all(1, true);
    b.checks.push_back(check_subspace_invariance(as_map(H), n, all, cloud, tol.check_tol));
    if (b.pass())
      ++passed;
    else
      for (const auto& name : b.failed()) o.require(false, "pair " + std::to_string(i) + " " + name);
  }
  o.notes << " " << passed << "/50 pairs";
}

void estimation_sanity(Outcome& o) {
  const auto ball = sample_punctured_ball(testing::small_scheme(12, 64), 2);
  const auto id = estimate_lipschitz(identity_map(2), ball);
  o.require(id.L_forward == 1.0 && id.L_inverse == 1.0, "identity constants not exactly 1");

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 0.5;
  const auto lin = estimate_lipschitz(linear_map(d), ball);
  o.require(lin.num_pairs >= 1000, "fewer than 1000 pairs");
  o.require(std::abs(lin.L_forward - 2.0) <= 1e-3, "diag forward constant");
  o.require(std::abs(lin.L_inverse - 2.0) <= 1e-3, "diag inverse constant");

  const PolyGerm f = testing::scalar(2, {{{2, 0}, 1.0}, {{0, 2}, -1.0}, {{1, 1}, 0.5}});
  const PolyGerm g = f.scaled(-2.5);
  const auto v = same_contact(f, g, SampleScheme{});
  const auto H = as_map(synth_single(f, g, CoordChange::identity(2), v));
  const auto coarse = estimate_lipschitz(H, fiber_cloud(f, testing::small_scheme(12, 64)));
  const auto fine = estimate_lipschitz(H, fiber_cloud(f, testing::small_scheme(12, 128)));
  const double df = std::abs(fine.L_forward - coarse.L_forward) / coarse.L_forward;
  const double di = std::abs(fine.L_inverse - coarse.L_inverse) / coarse.L_inverse;
  o.require(df <= 0.05 && di <= 0.05, "estimates moved more than 5% under doubling");
  o.notes << " diag " << lin.L_forward << "/" << lin.L_inverse << " over " << lin.num_pairs
          << " pairs, doubling drift " << std::max(df, di);
}

struct MultiCase {
  std::string name;
  PolyGerm f, g;
  std::vector<int> signs;
};

void multi_pipeline(Outcome& o) {
  using testing::poly;
  std::vector<MultiCase> cases;
  {
    auto f = testing::vec(1, 3, {poly(1, {{{1}, 1.0}}), poly(1, {{{2}, 1.0}, {{3}, 1.0}})});
    auto g = testing::vec(1, 3, {poly(1, {{{1}, 2.0}}), poly(1, {{{2}, -3.0}, {{3}, -3.0}})});
    cases.push_back({"line", f, g, {1, -1}});
  }
  {
    // g = (3 f1, -2 f2) composed with the coordinate swap.
    auto f1 = poly(2, {{{2, 0}, 1.0}, {{0, 2}, 2.0}});
    auto f2 = poly(2, {{{1, 1}, 1.0}, {{3, 0}, 1.0}});
    auto g1 = poly(2, {{{0, 2}, 3.0}, {{2, 0}, 6.0}});
    auto g2 = poly(2, {{{1, 1}, -2.0}, {{0, 3}, -2.0}});
    cases.push_back({"swap", testing::vec(2, 3, {f1, f2}), testing::vec(2, 3, {g1, g2}), {1, -1}});
  }
  {
    auto f1 = poly(2, {{{1, 0}, 1.0}});
    auto f2 = poly(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}});
    auto g1 = poly(2, {{{1, 0}, 1.0}});
    auto g2 = poly(2, {{{2, 0}, -0.5}, {{0, 2}, -0.5}});
    cases.push_back({"cone", testing::vec(2, 2, {f1, f2}), testing::vec(2, 2, {g1, g2}), {1, -1}});
  }
  for (const auto& c : cases) {
    const auto fp = write_germ(c.name + "_f.json", c.f);
    const auto gp = write_germ(c.name + "_g.json", c.g);
    const auto r = cli::equiv(fp, gp, {});
    if (r.exit_code != cli::kOk) {
      o.require(false, c.name + ": equiv exit " + std::to_string(r.exit_code));
      continue;
    }
    const auto& cert = r.report.at("certificate");
    const auto signs = cert.at("signs").get<std::vector<int>>();
    o.require(signs == c.signs, c.name + ": certified signs differ from the construction");
    const auto h = CoordChange::from_label(cert.at("h").get<std::string>(), c.f.n());
    const ToleranceConfig tol;
    const SampleScheme scheme;
    const MultiHomeo M = build_multi(c.f, c.g, h, signs, tol);
    o.require(verify_multiK(c.f, c.g, M, scheme, tol).pass(), c.name + ": verify_multiK failed");
    const PointCloud cloud = fiber_cloud(c.f, scheme);
    for (int k = 0; k < c.f.p(); ++k) {
      const auto want = signs[k] > 0 ? HalfspaceBehavior::Preserves : HalfspaceBehavior::Swaps;
      const auto got = check_halfspace_behavior(as_map(M), c.f.n(), k, cloud).behavior;
      o.require(got == want, c.name + ": halfspace[" + std::to_string(k) + "] is " + to_string(got));
    }
    o.notes << " " << c.name << ":h=" << cert.at("h").get<std::string>();
  }
}

void probe_grid(Outcome& o, const std::string& config, std::size_t classes,
                std::optional<std::size_t> plateau_limit) {
  const auto r = cli::probe(data(config), {});
  o.require(r.exit_code == cli::kOk, "probe exit " + std::to_string(r.exit_code));
  if (r.exit_code != cli::kOk) return;
  const auto& rep = r.report;
  const auto count = rep.at("class_count").get<std::size_t>();
  o.require(count == classes, "class count " + std::to_string(count));
  o.require(rep.at("unresolved").empty(), "unresolved pairs present");
  o.require(rep.at("recheck_failures").empty(), "certificate recheck failed");
  const auto plateau = rep.at("plateau_m").get<std::size_t>();
  if (plateau_limit) o.require(plateau <= *plateau_limit, "plateau at m = " + std::to_string(plateau));
  o.notes << " classes=" << count << " bounds=[" << rep["bounds"]["lower"] << ","
          << rep["bounds"]["upper"] << "] plateau_m=" << plateau
          << " germs=" << rep.at("germ_count");
}

void mutation_suite(Outcome& o) {
  const SampleScheme scheme;
  const ToleranceConfig tol;
  const PolyGerm f = testing::scalar(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}, {{1, 1}, 0.3}});
  const PolyGerm g = f.scaled(2.0);
  const auto id = CoordChange::identity(2);
  const PiecewiseHomeo H(f, g, id, SignBranch::Plus);
  o.require(verify_K_equivalence(f, g, as_map(H), id, scheme, tol).pass(),
            "unmutated map fails");
  o.require(verify_fiber_construction(H, scheme, tol).pass(), "unmutated construction fails");

  const auto scaled = verify_K_equivalence(f, g, scaled_theta(H, 1.01), id, scheme, tol);
  o.require(failed_with_witness(scaled.find("graph_mapping")), "scaled theta not caught");

  const auto shifted = verify_K_equivalence(f, g, shifted_zero_section(H, 0.01), id, scheme, tol);
  o.require(failed_with_witness(shifted.find("zero_section_invariance")),
            "shifted zero section not caught");

  const PiecewiseHomeo flipped(f, g, id, SignBranch::Minus);
  const auto fb = verify_fiber_construction(flipped, scheme, tol);
  o.require(failed_with_witness(fb.find("fiber_monotonicity")), "flipped branch not caught");
  const auto hs = check_halfspace_behavior(as_map(flipped), 2, 0, fiber_cloud(f, scheme),
                                           tol.boundary_margin, HalfspaceBehavior::Preserves);
  o.require(!hs.report.pass && hs.report.witness, "flipped branch halfspace not caught");
}

void determinism(Outcome& o) {
  const auto report = workdir() / "equiv_det.json";
  const auto x_x2 = data("x_x2.json"), two = data("2x_x2.json");
  cli::Overrides seeded;
  seeded.seed = 7;
  const auto eq = cli::equiv(x_x2, two, seeded);
  std::ofstream(report) << eq.report.dump(2);

  const std::vector<std::pair<std::string, std::function<cli::Result()>>> runs = {
      {"check-contact", [&] { return cli::check_contact(data("x2.json"), data("twox2.json"), 0, 0, seeded); }},
      {"equiv", [&] { return cli::equiv(x_x2, two, seeded); }},
      {"equiv-unknown", [&] { return cli::equiv(data("x1x2.json"), data("x1sq.json"), seeded); }},
      {"verify", [&] { return cli::verify(x_x2, two, report.string(), seeded); }},
      {"probe", [&] { return cli::probe(data("probe_p2_11.json"), seeded); }},
  };
  const int saved = omp_get_max_threads();
  const int threads = std::max(4, saved);
  for (const auto& [name, fn] : runs) {
    omp_set_num_threads(threads);
    const auto a = fn(), b = fn();
    omp_set_num_threads(1);
    const auto c = fn();
    const auto sa = cli::strip_timestamps(a.report).dump(2);
    o.require(a.exit_code == b.exit_code && sa == cli::strip_timestamps(b.report).dump(2),
              name + " differs on rerun");
    o.require(a.exit_code == c.exit_code && sa == cli::strip_timestamps(c.report).dump(2),
              name + " differs with one thread");
  }
  omp_set_num_threads(saved);
  o.notes << " " << runs.size() << " commands, " << threads << " threads vs 1";
}

}  // namespace

int main() {
  criterion(1, "fiber synthesis suite on 50 seeded (f, c f) pairs", 30, synthesis_suite);
  criterion(2, "bi-Lipschitz estimation sanity", 10, estimation_sanity);
  criterion(3, "multi-component pipeline with mixed signs", 30, multi_pipeline);
  criterion(4, "probe P2(1,1) grid", 60,
            [](Outcome& o) { probe_grid(o, "probe_p2_11.json", 3, 10); });
  criterion(5, "probe P1(2,1) grid", 60,
            [](Outcome& o) { probe_grid(o, "probe_p1_21.json", 2, std::nullopt); });
  criterion(6, "mutation suite", 10, mutation_suite);
  criterion(7, "determinism of every command", 0, determinism);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
