#include "kbilip/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "kbilip/contact.hpp"
#include "kbilip/coord_change.hpp"
#include "kbilip/germ.hpp"
#include "kbilip/homeo.hpp"
#include "kbilip/probe.hpp"
#include "kbilip/verifier.hpp"

#ifndef KBILIP_VERSION
#define KBILIP_VERSION "0.0.0"
#endif

namespace kbilip::cli {

using nlohmann::json;

namespace {

constexpr const char* kDefaultCatalog = "id,signs,perms";

class InputError : public std::runtime_error {
 public:
  InputError(std::string kind, std::string location, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)), location_(std::move(location)) {}
  const std::string& kind() const noexcept { return kind_; }
  const std::string& location() const noexcept { return location_; }

 private:
  std::string kind_, location_;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

json manifest(const std::string& command, json config, std::uint64_t seed, double wall) {
  return {{"command", command},
          {"config", std::move(config)},
          {"seed", seed},
          {"version", version()},
          {"wall_time_s", wall},
          {"timestamp", utc_timestamp()}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("Io", path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("Malformed", path + ":byte " + std::to_string(e.byte), e.what());
  }
}

PolyGerm component_of(const PolyGerm& f, int i, const std::string& which) {
  if (i < 0 || i >= f.p())
    throw InputError("DimensionMismatch", which,
                     "component index " + std::to_string(i) + " out of range for p = " +
                         std::to_string(f.p()));
  return f.scalar_component(i);
}

void require_same_shape(const PolyGerm& f, const PolyGerm& g) {
  if (f.n() != g.n() || f.p() != g.p())
    throw InputError("DimensionMismatch", "",
                     "germs differ in (n, p): (" + std::to_string(f.n()) + ", " +
                         std::to_string(f.p()) + ") vs (" + std::to_string(g.n()) + ", " +
                         std::to_string(g.p()) + ")");
}

json run_config(const SampleScheme& scheme, const ToleranceConfig& tol) {
  return {{"scheme", scheme_to_json(scheme)}, {"tol", tolerance_to_json(tol)}};
}

// Runs a command body, converting input problems into exit 3 with a report.
template <class Body>
Result guarded(const std::string& command, Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  Result r;
  json config = json::object();
  std::uint64_t seed = 0;
  auto fail = [&](const std::string& kind, const std::string& location, const std::string& msg) {
    r = Result{};
    r.exit_code = kInputError;
    r.report = {{"error", {{"kind", kind}, {"location", location}, {"message", msg}}}};
    r.summary = "input error (" + kind + ")" + (location.empty() ? "" : " at " + location) +
                ": " + msg;
  };
  try {
    r = body(config, seed);
  } catch (const InputError& e) {
    fail(e.kind(), e.location(), e.what());
  } catch (const GermError& e) {
    fail(to_string(e.kind()), e.location(), e.message());
  } catch (const CatalogError& e) {
    fail("Catalog", "", e.what());
  } catch (const ProbeError& e) {
    fail("Probe", "", e.what());
  } catch (const SynthesisError& e) {
    fail("Descriptor", "", e.what());
  } catch (const json::exception& e) {
    fail("Malformed", "", e.what());
  } catch (const std::invalid_argument& e) {
    fail("InvalidArgument", "", e.what());
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json out = {{"manifest", manifest(command, config, seed, wall)}};
  out.update(r.report);
  r.report = std::move(out);
  return r;
}

}  // namespace

const char* version() { return KBILIP_VERSION; }

SampleScheme Overrides::apply(SampleScheme s) const {
  if (r0) s.r0 = *r0;
  if (rho) s.rho = *rho;
  if (radii) s.num_radii = *radii;
  if (dirs) s.dirs_per_radius = *dirs;
  if (seed) s.seed = *seed;
  return s;
}

ToleranceConfig Overrides::apply(ToleranceConfig t) const {
  if (eps_zero_base) t.eps_zero_base = *eps_zero_base;
  if (ratio_floor) t.ratio_floor = *ratio_floor;
  if (check_tol) t.check_tol = *check_tol;
  if (boundary_margin) t.boundary_margin = *boundary_margin;
  if (lipschitz_cap) t.lipschitz_cap = *lipschitz_cap;
  if (partial_growth) t.partial_growth = *partial_growth;
  return t;
}

json strip_timestamps(json report) {
  if (report.contains("manifest") && report["manifest"].is_object())
    for (const char* key : kTimestampFields) report["manifest"].erase(key);
  return report;
}

Result check_contact(const std::string& f_path, const std::string& g_path, int fi, int gi,
                     const Overrides& o) {
  return guarded("check-contact", [&](json& config, std::uint64_t& seed) {
    const SampleScheme scheme = o.apply(SampleScheme{});
    const ToleranceConfig tol = o.apply(ToleranceConfig{});
    scheme.validate();
    tol.validate();
    config = run_config(scheme, tol);
    config["f"] = f_path;
    config["g"] = g_path;
    config["components"] = {fi, gi};
    seed = scheme.seed;

    const PolyGerm f = load_germ_file(f_path), g = load_germ_file(g_path);
    const PolyGerm fc = component_of(f, fi, "--fi"), gc = component_of(g, gi, "--gi");
    if (fc.n() != gc.n())
      throw InputError("DimensionMismatch", "n", "germs have different source dimensions");
    const ContactVerdict v = same_contact(fc, gc, scheme, tol);

    Result r;
    r.report = {{"f", germ_to_json(fc)}, {"g", germ_to_json(gc)}, {"verdict", verdict_to_json(v)}};
    switch (v.kind) {
      case ContactKind::Equivalent:
      case ContactKind::NegEquivalent: r.exit_code = kOk; break;
      case ContactKind::Distinct: r.exit_code = kNegative; break;
      case ContactKind::Inconclusive: r.exit_code = kUnknown; break;
    }
    r.summary = std::string(to_string(v.kind));
    if (v.related())
      r.summary += " (c in [" + json(*v.c_lower).dump() + ", " + json(*v.c_upper).dump() + "])";
    return r;
  });
}

Result equiv(const std::string& f_path, const std::string& g_path, const Overrides& o) {
  return guarded("equiv", [&](json& config, std::uint64_t& seed) {
    const SampleScheme scheme = o.apply(SampleScheme{});
    const ToleranceConfig tol = o.apply(ToleranceConfig{});
    const std::string catalog_spec = o.catalog.value_or(kDefaultCatalog);
    scheme.validate();
    tol.validate();
    config = run_config(scheme, tol);
    config["f"] = f_path;
    config["g"] = g_path;
    config["catalog"] = catalog_spec;
    seed = scheme.seed;

    const PolyGerm f = load_germ_file(f_path), g = load_germ_file(g_path);
    require_same_shape(f, g);
    const auto catalog = build_catalog(catalog_spec, f.n(), scheme.seed);

    Result r;
    const std::string key_f = signature_key(f, scheme, tol);
    const std::string key_g = signature_key(g, scheme, tol);
    r.report = {{"f", germ_to_json(f)},
                {"g", germ_to_json(g)},
                {"signatures", {{"f", key_f}, {"g", key_g}}}};
    if (key_f != key_g) {
      r.exit_code = kNegative;
      r.report["result"] = "separated";
      r.report["reason"] = "vanishing-order signatures differ";
      r.report["certificate"] = nullptr;
      r.summary = "separated: signatures " + key_f + " vs " + key_g;
      return r;
    }

    const PairSearch search = certify_pair(f, g, catalog, scheme, tol);
    json attempts = json::array();
    for (const auto& a : search.attempts) {
      json kinds = json::array();
      for (auto k : a.kinds) kinds.push_back(to_string(k));
      attempts.push_back({{"h", a.h},
                          {"components", kinds},
                          {"verified", a.verified},
                          {"failed_checks", a.failed_checks}});
    }
    r.report["attempts"] = attempts;
    if (search.certificate) {
      const auto& c = *search.certificate;
      r.exit_code = kOk;
      r.report["result"] = "certified";
      r.report["certificate"] = {{"f", germ_to_json(f)},     {"g", germ_to_json(g)},
                                 {"h", c.h},                 {"signs", c.signs},
                                 {"tol", tolerance_to_json(tol)},
                                 {"scheme", scheme_to_json(scheme)},
                                 {"seed", scheme.seed}};
      r.report["verification"] = bundle_to_json(c.bundle);
      r.summary = "certified with h = " + c.h + ", signs " + json(c.signs).dump();
    } else {
      r.exit_code = kUnknown;
      r.report["result"] = "unknown";
      r.report["certificate"] = nullptr;
      r.summary = "unknown: no catalog element certified the pair";
    }
    return r;
  });
}

Result probe(const std::string& config_path, const Overrides& o) {
  return guarded("probe", [&](json& config, std::uint64_t& seed) {
    ProbeConfig pc = probe_config_from_json(read_json_file(config_path));
    pc.scheme = o.apply(pc.scheme);
    pc.tol = o.apply(pc.tol);
    if (o.catalog) pc.catalog = *o.catalog;
    config = probe_config_to_json(pc);
    config["path"] = config_path;
    seed = pc.scheme.seed;

    const auto germs = generate_germs(pc);
    const ClassPartition part = cluster_classes(germs, pc);
    const auto failures = recheck_certificates(part, pc);

    Result r;
    r.report = probe_report(part);
    r.report["config"] = probe_config_to_json(pc);
    json failed = json::array();
    for (const auto& l : failures) failed.push_back({l.member, l.linked_to});
    r.report["recheck_failures"] = failed;
    r.exit_code = kOk;
    r.summary = std::to_string(part.classes.size()) + " classes from " +
                std::to_string(germs.size()) + " germs (lower bound " +
                std::to_string(part.lower_bound()) + ", " +
                std::to_string(part.unresolved.size()) + " unresolved pairs)";
    return r;
  });
}

Result verify(const std::string& f_path, const std::string& g_path,
              const std::string& descriptor_path, const Overrides& o) {
  return guarded("verify", [&](json& config, std::uint64_t& seed) {
    json desc = read_json_file(descriptor_path);
    if (desc.contains("certificate")) desc = desc.at("certificate");
    if (!desc.is_object() || !desc.contains("h") || !desc.contains("signs"))
      throw InputError("Descriptor", descriptor_path, "descriptor needs 'h' and 'signs'");

    SampleScheme scheme = desc.contains("scheme") ? scheme_from_json(desc.at("scheme"))
                                                  : SampleScheme{};
    if (desc.contains("seed")) scheme.seed = desc.at("seed").get<std::uint64_t>();
    scheme = o.apply(scheme);
    const ToleranceConfig tol =
        o.apply(desc.contains("tol") ? tolerance_from_json(desc.at("tol")) : ToleranceConfig{});
    scheme.validate();
    tol.validate();
    config = run_config(scheme, tol);
    config["f"] = f_path;
    config["g"] = g_path;
    config["descriptor"] = descriptor_path;
    seed = scheme.seed;

    const PolyGerm f = load_germ_file(f_path), g = load_germ_file(g_path);
    require_same_shape(f, g);
    for (const char* which : {"f", "g"}) {
      if (!desc.contains(which)) continue;
      const PolyGerm& mine = std::string(which) == "f" ? f : g;
      if (serialize_germ(germ_from_json(desc.at(which))) != serialize_germ(mine))
        throw InputError("Descriptor", which,
                         std::string("descriptor germ '") + which + "' differs from the file");
    }
    const std::string label = desc.at("h").get<std::string>();
    const auto signs = desc.at("signs").get<std::vector<int>>();
    if (static_cast<int>(signs.size()) != f.p())
      throw InputError("Descriptor", "signs",
                       "sign vector has " + std::to_string(signs.size()) +
                           " entries, germs have p = " + std::to_string(f.p()));
    for (int s : signs)
      if (s != 1 && s != -1) throw InputError("Descriptor", "signs", "signs must be +1 or -1");
    const CoordChange h = CoordChange::from_label(label, f.n());
    const MultiHomeo M = build_multi(f, g, h, signs, tol);

    CheckBundle bundle = verify_multiK(f, g, M, scheme, tol);
    const PointCloud xs = sample_punctured_ball(scheme, f.n());
    const PointCloud fibers = fiber_cloud(f, scheme);
    const EvaluableMap H = as_map(M);
    json halfspaces = json::array();
    for (int k = 0; k < f.p(); ++k) {
      const PiecewiseHomeo& part = M.components()[k];
      const std::string tag = "[" + std::to_string(k) + "]";
      for (auto rep : {check_fiber_monotonicity(part, xs), check_case_continuity(part, xs, tol.check_tol),
                       check_zero_section_exact(part, xs),
                       check_bounded_partials(part, fiber_cloud(f.scalar_component(k), scheme), tol)
                           .report}) {
        rep.name += tag;
        bundle.checks.push_back(std::move(rep));
      }
      const auto expected =
          signs[k] == 1 ? HalfspaceBehavior::Preserves : HalfspaceBehavior::Swaps;
      HalfspaceResult hs =
          check_halfspace_behavior(H, f.n(), k, fibers, tol.boundary_margin, expected);
      halfspaces.push_back({{"component", k},
                            {"behavior", to_string(hs.behavior)},
                            {"expected", to_string(expected)}});
      bundle.checks.push_back(std::move(hs.report));
    }

    Result r;
    r.report = {{"f", germ_to_json(f)},
                {"g", germ_to_json(g)},
                {"descriptor", {{"h", label}, {"signs", signs}}},
                {"halfspaces", halfspaces},
                {"verification", bundle_to_json(bundle)}};
    r.exit_code = bundle.pass() ? kOk : kNegative;
    if (bundle.pass()) {
      r.summary = "all " + std::to_string(bundle.checks.size()) + " checks pass";
    } else {
      r.summary = "failed checks:";
      for (const auto& name : bundle.failed()) r.summary += " " + name;
    }
    return r;
  });
}

}  // namespace kbilip::cli
