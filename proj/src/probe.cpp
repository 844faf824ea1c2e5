#include "kbilip/probe.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "kbilip/homeo.hpp"

namespace kbilip {

using nlohmann::json;

void ProbeConfig::validate() const {
  if (n < 1 || p < 1 || k < 1) throw ProbeError("probe: n, p and k must be >= 1");
  if (!random && values.empty()) throw ProbeError("probe: empty coefficient value list", 0);
  if (random && random->count == 0) throw ProbeError("probe: random mode needs count >= 1", 0);
  if (random && values.empty() && !(random->lo <= random->hi))
    throw ProbeError("probe: random range needs lo <= hi");
  for (double v : values)
    if (!std::isfinite(v)) throw ProbeError("probe: coefficient values must be finite");
  scheme.validate();
  tol.validate();
}

ProbeConfig probe_config_from_json(const json& doc) {
  if (!doc.is_object()) throw ProbeError("probe config must be a JSON object");
  ProbeConfig c;
  c.n = doc.at("n").get<int>();
  c.p = doc.value("p", 1);
  c.k = doc.at("k").get<int>();
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    c.values = (g.is_object() ? g.at("values") : g).get<std::vector<double>>();
  }
  if (doc.contains("random")) {
    const json& r = doc.at("random");
    RandomDraw d;
    d.count = r.at("count").get<std::size_t>();
    d.seed = r.value("seed", std::uint64_t{0});
    d.lo = r.value("lo", -1.0);
    d.hi = r.value("hi", 1.0);
    if (r.contains("values")) c.values = r.at("values").get<std::vector<double>>();
    c.random = d;
  }
  c.catalog = doc.value("catalog", c.catalog);
  if (doc.contains("scheme")) c.scheme = scheme_from_json(doc.at("scheme"));
  if (doc.contains("tol")) c.tol = tolerance_from_json(doc.at("tol"));
  c.max_germs = doc.value("max_germs", c.max_germs);
  c.validate();
  return c;
}

json probe_config_to_json(const ProbeConfig& c) {
  json out = {{"n", c.n}, {"p", c.p}, {"k", c.k}, {"catalog", c.catalog},
              {"scheme", scheme_to_json(c.scheme)}, {"tol", tolerance_to_json(c.tol)},
              {"max_germs", c.max_germs}};
  if (c.random)
    out["random"] = {{"count", c.random->count}, {"seed", c.random->seed},
                     {"lo", c.random->lo}, {"hi", c.random->hi}, {"values", c.values}};
  else
    out["grid"] = {{"values", c.values}};
  return out;
}

std::vector<Exponent> coefficient_slots(int n, int k) {
  std::vector<Exponent> slots;
  for (int d = 1; d <= k; ++d) {
    std::vector<Exponent> level;
    Exponent e(n, 0);
    // All exponents with total degree d.
    auto rec = [&](auto&& self, int var, int left) -> void {
      if (var == n - 1) {
        e[var] = left;
        level.push_back(e);
        return;
      }
      for (int a = left; a >= 0; --a) {
        e[var] = a;
        self(self, var + 1, left - a);
      }
    };
    rec(rec, 0, d);
    slots.insert(slots.end(), level.begin(), level.end());
  }
  return slots;
}

namespace {

PolyGerm germ_from_coefficients(const ProbeConfig& c, const std::vector<Exponent>& slots,
                                const std::vector<double>& coefs) {
  std::vector<Polynomial> comps;
  const std::size_t per = slots.size();
  for (int i = 0; i < c.p; ++i) {
    Polynomial poly(c.n);
    for (std::size_t s = 0; s < per; ++s) poly.add_term(slots[s], coefs[i * per + s]);
    comps.push_back(std::move(poly));
  }
  return PolyGerm(c.n, c.p, c.k, std::move(comps));
}

void push_unique(std::vector<PolyGerm>& out, std::set<std::string>& seen, PolyGerm g) {
  if (seen.insert(serialize_germ(g)).second) out.push_back(std::move(g));
}

}  // namespace

std::vector<PolyGerm> generate_germs(const ProbeConfig& config) {
  config.validate();
  const auto slots = coefficient_slots(config.n, config.k);
  const std::size_t num_slots = slots.size() * config.p;
  std::vector<PolyGerm> out;
  std::set<std::string> seen;

  if (config.random) {
    if (config.random->count > config.max_germs)
      throw ProbeError("probe: " + std::to_string(config.random->count) +
                           " random germs requested, cap is " + std::to_string(config.max_germs),
                       config.random->count);
    std::mt19937_64 rng(config.random->seed);
    std::uniform_real_distribution<double> uni(config.random->lo, config.random->hi);
    std::vector<double> coefs(num_slots);
    for (std::size_t i = 0; i < config.random->count; ++i) {
      for (auto& v : coefs) {
        if (config.values.empty()) {
          v = uni(rng);
        } else {
          v = config.values[std::uniform_int_distribution<std::size_t>(
              0, config.values.size() - 1)(rng)];
        }
      }
      push_unique(out, seen, germ_from_coefficients(config, slots, coefs));
    }
    return out;
  }

  const std::size_t base = config.values.size();
  // Grid size as a double so huge grids are reported without overflow.
  const double grid = std::pow(static_cast<double>(base), static_cast<double>(num_slots));
  if (grid > static_cast<double>(config.max_germs)) {
    std::ostringstream msg;
    msg << std::fixed << std::setprecision(0) << "probe: grid has " << grid
        << " germs, cap is " << config.max_germs;
    throw ProbeError(msg.str(), grid >= 1.8e19 ? SIZE_MAX : static_cast<std::size_t>(grid));
  }
  const auto total = static_cast<std::size_t>(grid);

  // Odometer over value indices, last slot fastest.
  std::vector<std::vector<std::size_t>> tuples;
  std::vector<std::size_t> idx(num_slots, 0);
  for (std::size_t t = 0; t < total; ++t) {
    tuples.push_back(idx);
    for (std::size_t s = num_slots; s-- > 0;) {
      if (++idx[s] < base) break;
      idx[s] = 0;
    }
  }
  auto level = [&](const std::vector<std::size_t>& tuple) {
    double m = 0.0;
    for (auto i : tuple) m = std::max(m, std::abs(config.values[i]));
    return m;
  };
  std::stable_sort(tuples.begin(), tuples.end(),
                   [&](const auto& a, const auto& b) { return level(a) < level(b); });
  std::vector<double> coefs(num_slots);
  for (const auto& tuple : tuples) {
    for (std::size_t s = 0; s < num_slots; ++s) coefs[s] = config.values[tuple[s]];
    push_unique(out, seen, germ_from_coefficients(config, slots, coefs));
  }
  return out;
}

MultiHomeo build_multi(const PolyGerm& f, const PolyGerm& g, const CoordChange& h,
                       const std::vector<int>& signs, const ToleranceConfig& tol) {
  if (static_cast<int>(signs.size()) != f.p())
    throw SynthesisError("sign vector has " + std::to_string(signs.size()) +
                         " entries, germs have p = " + std::to_string(f.p()));
  std::vector<PiecewiseHomeo> parts;
  for (int i = 0; i < f.p(); ++i)
    parts.emplace_back(f.scalar_component(i), g.scalar_component(i), h,
                       sign_branch_from_int(signs[i]), tol);
  return assemble_multi(std::move(parts));
}

PairSearch certify_pair(const PolyGerm& f, const PolyGerm& g,
                        const std::vector<CoordChange>& catalog, const SampleScheme& scheme,
                        const ToleranceConfig& tol) {
  if (f.n() != g.n() || f.p() != g.p())
    throw GermError(GermError::Kind::DimensionMismatch, "",
                    "germs differ in (n, p): (" + std::to_string(f.n()) + ", " +
                        std::to_string(f.p()) + ") vs (" + std::to_string(g.n()) + ", " +
                        std::to_string(g.p()) + ")");
  PairSearch out;
  for (std::size_t ci = 0; ci < catalog.size(); ++ci) {
    const CoordChange& h = catalog[ci];
    LinkAttempt attempt;
    attempt.h = h.label();
    std::vector<int> signs;
    bool all_related = true, any_distinct = false;
    for (int i = 0; i < f.p(); ++i) {
      const auto v = signed_contact(f.scalar_component(i), g.scalar_component(i), h, scheme, tol);
      attempt.kinds.push_back(v.kind);
      if (v.kind == ContactKind::Distinct) any_distinct = true;
      if (!v.related()) {
        all_related = false;
        break;
      }
      signs.push_back(v.kind == ContactKind::Equivalent ? 1 : -1);
    }
    if (all_related) {
      const MultiHomeo M = build_multi(f, g, h, signs, tol);
      CheckBundle bundle = verify_multiK(f, g, M, scheme, tol);
      attempt.verified = bundle.pass();
      attempt.failed_checks = bundle.failed();
      out.attempts.push_back(attempt);
      if (attempt.verified) {
        out.certificate = PairCertificate{ci, h.label(), signs, std::move(bundle)};
        return out;
      }
      out.undecided = true;
      continue;
    }
    if (!any_distinct) out.undecided = true;
    out.attempts.push_back(std::move(attempt));
  }
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  // The smaller root survives, so roots are class minima.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

}  // namespace

std::size_t ClassPartition::lower_bound() const {
  return std::set<std::string>(signatures.begin(), signatures.end()).size();
}

double ClassPartition::unresolved_fraction() const {
  const std::size_t n = germs.size();
  if (n < 2) return 0.0;
  return static_cast<double>(unresolved.size()) / (static_cast<double>(n) * (n - 1) / 2.0);
}

std::size_t ClassPartition::class_of(std::size_t i) const {
  for (std::size_t c = 0; c < classes.size(); ++c)
    if (std::find(classes[c].members.begin(), classes[c].members.end(), i) !=
        classes[c].members.end())
      return c;
  throw std::out_of_range("class_of: germ index not in partition");
}

ClassPartition cluster_classes(const std::vector<PolyGerm>& germs, const ProbeConfig& config) {
  ClassPartition out;
  out.germs = germs;
  if (germs.empty()) return out;
  const int n = germs.front().n();
  const auto catalog = build_catalog(config.catalog, n, config.scheme.seed);

  for (const auto& g : germs) out.signatures.push_back(signature_key(g, config.scheme, config.tol));

  UnionFind uf(germs.size());
  std::vector<ClassLink> links;
  std::vector<std::pair<std::size_t, std::size_t>> undecided;
  std::map<std::string, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < germs.size(); ++i) {
    auto& bucket = buckets[out.signatures[i]];
    for (std::size_t j : bucket) {
      if (uf.find(i) == uf.find(j)) continue;
      ++out.link_attempts;
      const PairSearch s = certify_pair(germs[i], germs[j], catalog, config.scheme, config.tol);
      if (s.certificate) {
        uf.unite(i, j);
        links.push_back({i, j, s.certificate->h, s.certificate->signs});
      } else if (s.undecided) {
        undecided.emplace_back(j, i);
      }
    }
    bucket.push_back(i);
  }

  std::map<std::size_t, std::size_t> root_to_class;
  for (std::size_t i = 0; i < germs.size(); ++i) {
    const std::size_t r = uf.find(i);
    auto [it, inserted] = root_to_class.emplace(r, out.classes.size());
    if (inserted) {
      ProbeClass c;
      c.representative = r;
      c.signature = out.signatures[r];
      out.classes.push_back(std::move(c));
    }
    out.classes[it->second].members.push_back(i);
  }
  for (const auto& l : links) out.classes[root_to_class[uf.find(l.member)]].evidence.push_back(l);
  for (const auto& [a, b] : undecided)
    if (uf.find(a) != uf.find(b)) out.unresolved.emplace_back(a, b);

  std::set<std::size_t> seen_roots;
  for (std::size_t m = 1; m <= germs.size(); ++m) {
    seen_roots.insert(uf.find(m - 1));
    out.curve.emplace_back(m, seen_roots.size());
  }
  return out;
}

std::size_t plateau_index(const ClassPartition& partition) {
  if (partition.curve.empty()) return 0;
  const std::size_t final_count = partition.curve.back().second;
  for (const auto& [m, count] : partition.curve)
    if (count == final_count) return m;
  return partition.curve.size();
}

std::vector<ClassLink> recheck_certificates(const ClassPartition& partition,
                                           const ProbeConfig& config) {
  std::vector<ClassLink> failures;
  if (partition.germs.empty()) return failures;
  const int n = partition.germs.front().n();
  for (const auto& c : partition.classes) {
    for (const auto& link : c.evidence) {
      const PolyGerm& f = partition.germs[link.member];
      const PolyGerm& g = partition.germs[link.linked_to];
      bool ok = false;
      try {
        const auto h = CoordChange::from_label(link.h, n);
        ok = verify_multiK(f, g, build_multi(f, g, h, link.signs, config.tol), config.scheme,
                           config.tol)
                 .pass();
      } catch (const std::exception&) {
        ok = false;
      }
      if (!ok) failures.push_back(link);
    }
  }
  return failures;
}

json probe_report(const ClassPartition& partition) {
  json classes = json::array();
  for (const auto& c : partition.classes) {
    json evidence = json::array();
    for (const auto& l : c.evidence)
      evidence.push_back(
          {{"member", l.member}, {"linked_to", l.linked_to}, {"h", l.h}, {"signs", l.signs}});
    classes.push_back({{"representative", germ_to_json(partition.germs[c.representative])},
                       {"representative_index", c.representative},
                       {"representative_text", format_germ(partition.germs[c.representative])},
                       {"signature", c.signature},
                       {"member_count", c.members.size()},
                       {"members", c.members},
                       {"evidence", evidence}});
  }
  json curve = json::array();
  for (const auto& [m, count] : partition.curve) curve.push_back({m, count});
  json unresolved = json::array();
  for (const auto& [a, b] : partition.unresolved) unresolved.push_back({a, b});
  return {{"germ_count", partition.germs.size()},
          {"class_count", partition.classes.size()},
          {"bounds", {{"lower", partition.lower_bound()}, {"upper", partition.upper_bound()}}},
          {"classes", classes},
          {"curve", curve},
          {"plateau_m", plateau_index(partition)},
          {"unresolved", unresolved},
          {"unresolved_fraction", partition.unresolved_fraction()},
          {"link_attempts", partition.link_attempts}};
}

}  // namespace kbilip
