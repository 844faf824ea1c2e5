#include "kbilip/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kbilip {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

PointCloud cloud_from_coords(const std::vector<double>& coords, int dim, const PointCloud& like) {
  PointCloud out(dim);
  for (std::size_t i = 0; i < like.size(); ++i)
    out.add(std::span<const double>(coords.data() + i * dim, dim), like.shell(i), like.ray(i),
            like.radius(i), like.group(i));
  return out;
}

std::vector<std::vector<double>> unique_directions(int n, const SampleScheme& scheme) {
  std::vector<std::vector<double>> out;
  for (auto& d : unit_directions(n, scheme.dirs_per_radius, scheme.seed))
    if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(std::move(d));
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

}  // namespace

std::vector<kernels::IndexPair> build_pairs(const PointCloud& cloud, const PairingPolicy& policy) {
  using kernels::IndexPair;
  const std::size_t m = cloud.size();
  std::vector<IndexPair> fiber, rest;

  int max_shell = -1;
  for (std::size_t i = 0; i < m; ++i) max_shell = std::max(max_shell, cloud.shell(i));
  std::vector<std::vector<std::uint32_t>> shells(max_shell + 1);
  for (std::size_t i = 0; i < m; ++i) shells[cloud.shell(i)].push_back(static_cast<std::uint32_t>(i));

  for (const auto& members : shells) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const auto i = members[a], j = members[b];
        const bool same_group = cloud.group(i) >= 0 && cloud.group(i) == cloud.group(j);
        if (same_group)
          fiber.push_back({i, j});
        else if (policy.within_shell)
          rest.push_back({i, j});
      }
    }
  }
  if (policy.cross_shell_nn) {
    for (int s = 0; s + 1 <= max_shell; ++s) {
      const auto& inner = shells[s + 1];
      if (inner.empty()) continue;
      for (auto i : shells[s]) {
        double best = INFINITY;
        std::uint32_t best_j = inner.front();
        for (auto j : inner) {
          const double d = distance(cloud.point(i), cloud.point(j));
          if (d < best) {
            best = d;
            best_j = j;
          }
        }
        rest.push_back({i, best_j});
      }
    }
  }

  const std::size_t budget = policy.max_pairs > fiber.size() ? policy.max_pairs - fiber.size() : 0;
  std::vector<IndexPair> pairs = std::move(fiber);
  if (rest.size() <= budget) {
    pairs.insert(pairs.end(), rest.begin(), rest.end());
  } else if (budget > 0) {
    const std::size_t stride = (rest.size() + budget - 1) / budget;
    for (std::size_t i = 0; i < rest.size(); i += stride) pairs.push_back(rest[i]);
  }
  return pairs;
}

BiLipEstimate estimate_lipschitz(const EvaluableMap& map, const PointCloud& samples,
                                 const PairingPolicy& policy) {
  if (samples.size() < 2) throw std::invalid_argument("estimate_lipschitz: need >= 2 samples");
  if (samples.dim() != map.dim)
    throw std::invalid_argument("estimate_lipschitz: sample dimension differs from map");
  const int dim = map.dim;
  const auto pairs = build_pairs(samples, policy);
  const auto images = kernels::map_points(map.forward, samples, dim);

  BiLipEstimate est;
  const auto fwd = kernels::max_pair_ratio(samples.coords(), dim, images, dim, pairs);
  est.L_forward = fwd.ratio;
  est.num_pairs = fwd.counted;
  if (fwd.index >= 0) {
    const auto p = pairs[fwd.index];
    est.witness_pair_forward = {to_vec(samples.point(p.a)), to_vec(samples.point(p.b))};
  }

  // Inverse: on image pairs, with the inverse evaluator when available.
  kernels::PairMax inv;
  const PointCloud image_cloud = cloud_from_coords(images, dim, samples);
  if (map.has_inverse()) {
    const auto back = kernels::map_points(map.inverse, image_cloud, dim);
    inv = kernels::max_pair_ratio(images, dim, back, dim, pairs);
  } else {
    inv = kernels::max_pair_ratio(images, dim, samples.coords(), dim, pairs);
  }
  est.L_inverse = inv.ratio;
  if (inv.index >= 0) {
    const auto p = pairs[inv.index];
    est.witness_pair_inverse = {to_vec(image_cloud.point(p.a)), to_vec(image_cloud.point(p.b))};
  }
  return est;
}

json check_to_json(const CheckReport& r) {
  return {{"name", r.name},
          {"pass", r.pass},
          {"tolerance", number_or_null(r.tolerance)},
          {"max_violation", number_or_null(r.max_violation)},
          {"witness", r.witness ? json(*r.witness) : json(nullptr)},
          {"samples", r.samples},
          {"detail", r.detail}};
}

json estimate_to_json(const BiLipEstimate& e) {
  return {{"L_forward", number_or_null(e.L_forward)},
          {"L_inverse", number_or_null(e.L_inverse)},
          {"witness_pair_forward", e.witness_pair_forward},
          {"witness_pair_inverse", e.witness_pair_inverse},
          {"num_pairs", e.num_pairs}};
}

bool CheckBundle::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.pass; });
}

const CheckReport* CheckBundle::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<std::string> CheckBundle::failed() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.pass) out.push_back(c.name);
  return out;
}

void CheckBundle::append(const CheckBundle& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  if (!map_estimate) map_estimate = other.map_estimate;
  if (!factor_estimate) factor_estimate = other.factor_estimate;
}

json bundle_to_json(const CheckBundle& b) {
  json checks = json::array();
  for (const auto& c : b.checks) checks.push_back(check_to_json(c));
  json out = {{"pass", b.pass()}, {"checks", checks}};
  out["map_estimate"] = b.map_estimate ? estimate_to_json(*b.map_estimate) : json(nullptr);
  out["factor_estimate"] = b.factor_estimate ? estimate_to_json(*b.factor_estimate) : json(nullptr);
  return out;
}

PointCloud fiber_cloud(const PolyGerm& f, const SampleScheme& scheme) {
  scheme.validate();
  const int n = f.n(), p = f.p();
  PointCloud cloud(n + p);
  const auto dirs = unique_directions(n, scheme);
  static constexpr double kFiberScales[] = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
  std::vector<double> xy(n + p), fx(p);
  int group = 0;
  for (int j = 0; j < scheme.num_radii; ++j) {
    const double r = scheme.radius(j);
    for (std::size_t d = 0; d < dirs.size(); ++d, ++group) {
      for (int i = 0; i < n; ++i) xy[i] = r * dirs[d][i];
      f.eval_into(std::span<const double>(xy.data(), n), fx);
      for (double t : kFiberScales) {
        for (int c = 0; c < p; ++c) xy[n + c] = t * fx[c];
        cloud.add(xy, j, static_cast<int>(d), r, group);
      }
    }
  }
  const PointCloud ambient = sample_punctured_ball(scheme, n + p);
  for (std::size_t i = 0; i < ambient.size(); ++i)
    cloud.add(ambient.point(i), ambient.shell(i), ambient.ray(i), ambient.radius(i));
  return cloud;
}

CheckReport check_graph_mapping(const EvaluableMap& H, const PolyGerm& f, const PolyGerm& g,
                                const CoordChange& h, const PointCloud& xs, double tol) {
  const int n = f.n(), p = f.p();
  CheckReport r{"graph_mapping", true, tol, 0.0, std::nullopt, xs.size(), ""};
  // Per sample: H(x, f(x)) and (h(x), g(h(x))).
  const int dim = n + p;
  const auto actual = kernels::map_points(
      [&](std::span<const double> x, std::span<double> out) {
        std::vector<double> xy(dim);
        std::copy(x.begin(), x.end(), xy.begin());
        f.eval_into(x, std::span<double>(xy).subspan(n));
        H.forward(xy, out);
      },
      xs, dim);
  const auto expected = kernels::map_points(
      [&](std::span<const double> x, std::span<double> out) {
        h.apply(x, out.subspan(0, n));
        g.eval_into(out.subspan(0, n), out.subspan(n));
      },
      xs, dim);
  const auto worst = kernels::max_block_distance_parallel(actual, expected, dim);
  r.max_violation = worst.value;
  r.pass = worst.value <= tol;
  if (!r.pass && worst.index >= 0) r.witness = to_vec(xs.point(worst.index));
  r.detail = "max ||H(x,f(x)) - (h(x), g(h(x)))|| = " + fmt(worst.value);
  return r;
}

CheckReport check_subspace_invariance(const EvaluableMap& H, int n,
                                      const std::vector<bool>& mask, const PointCloud& samples,
                                      double tol) {
  const int dim = H.dim;
  std::string mask_label;
  for (bool b : mask) mask_label += b ? '0' : '*';
  CheckReport r{"subspace_invariance[" + mask_label + "]", true, tol, 0.0, std::nullopt,
                samples.size(), ""};
  PointCloud projected(dim);
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto s = samples.point(i);
    std::copy(s.begin(), s.end(), v.begin());
    for (std::size_t k = 0; k < mask.size(); ++k)
      if (mask[k]) v[n + k] = 0.0;
    projected.add(v, samples.shell(i), samples.ray(i), samples.radius(i));
  }
  const auto images = kernels::map_points(H.forward, projected, dim);
  double worst = 0.0;
  std::int64_t worst_i = -1;
  for (std::size_t i = 0; i < projected.size(); ++i) {
    for (std::size_t k = 0; k < mask.size(); ++k) {
      if (!mask[k]) continue;
      double a = std::abs(images[i * dim + n + k]);
      if (std::isnan(a)) a = INFINITY;
      if (a > worst) {
        worst = a;
        worst_i = static_cast<std::int64_t>(i);
      }
    }
  }
  r.max_violation = worst;
  r.pass = worst <= tol;
  if (!r.pass && worst_i >= 0) r.witness = to_vec(projected.point(worst_i));
  r.detail = "max pinned |image coordinate| = " + fmt(worst);
  return r;
}

std::vector<CheckReport> check_all_subspaces(const EvaluableMap& H, int n, int p,
                                             const PointCloud& samples, double tol) {
  std::vector<CheckReport> out;
  out.push_back(check_subspace_invariance(H, n, std::vector<bool>(p, true), samples, tol));
  for (int k = 0; k < p && p > 1; ++k) {
    std::vector<bool> mask(p, false);
    mask[k] = true;
    out.push_back(check_subspace_invariance(H, n, mask, samples, tol));
  }
  return out;
}

const char* to_string(HalfspaceBehavior b) {
  switch (b) {
    case HalfspaceBehavior::Preserves: return "Preserves";
    case HalfspaceBehavior::Swaps: return "Swaps";
    case HalfspaceBehavior::Mixed: return "Mixed";
  }
  return "Mixed";
}

HalfspaceResult check_halfspace_behavior(const EvaluableMap& H, int n, int k,
                                         const PointCloud& samples, double margin,
                                         std::optional<HalfspaceBehavior> expected) {
  const int dim = H.dim;
  const int coord = n + k;
  if (coord >= dim) throw std::invalid_argument("check_halfspace_behavior: k out of range");
  PointCloud used(dim);
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (std::abs(samples.point(i)[coord]) > margin * samples.radius(i))
      used.add(samples.point(i), samples.shell(i), samples.ray(i), samples.radius(i));
  const auto images = kernels::map_points(H.forward, used, dim);

  std::size_t same = 0, flipped = 0;
  std::int64_t first_same = -1, first_flipped = -1;
  for (std::size_t i = 0; i < used.size(); ++i) {
    const double in = used.point(i)[coord];
    const double out = images[i * dim + coord];
    if ((in > 0 && out > 0) || (in < 0 && out < 0)) {
      if (first_same < 0) first_same = static_cast<std::int64_t>(i);
      ++same;
    } else {
      if (first_flipped < 0) first_flipped = static_cast<std::int64_t>(i);
      ++flipped;
    }
  }
  HalfspaceResult res;
  CheckReport& r = res.report;
  r.name = "halfspace[" + std::to_string(k) + "]";
  r.samples = used.size();
  r.tolerance = margin;
  if (used.empty()) {
    res.behavior = HalfspaceBehavior::Mixed;
    r.pass = false;
    r.witness = samples.empty() ? std::vector<double>{} : to_vec(samples.point(0));
    r.detail = "no samples off the hyperplane";
    return res;
  }
  res.behavior = flipped == 0 ? HalfspaceBehavior::Preserves
                 : same == 0  ? HalfspaceBehavior::Swaps
                              : HalfspaceBehavior::Mixed;
  r.pass = expected ? res.behavior == *expected : res.behavior != HalfspaceBehavior::Mixed;
  // Count and first instance of the samples that disagree with the target.
  const HalfspaceBehavior target =
      expected ? *expected
               : (same >= flipped ? HalfspaceBehavior::Preserves : HalfspaceBehavior::Swaps);
  const bool want_same = target != HalfspaceBehavior::Swaps;
  r.max_violation = static_cast<double>(want_same ? flipped : same);
  if (!r.pass) {
    const auto w = want_same ? first_flipped : first_same;
    r.witness = to_vec(used.point(w >= 0 ? w : 0));
  }
  r.detail = std::string(to_string(res.behavior)) + ": " + std::to_string(same) +
             " sign-preserving, " + std::to_string(flipped) + " sign-swapping samples";
  if (expected) r.detail += std::string(", expected ") + to_string(*expected);
  return res;
}

std::vector<double> fiber_partials(const PiecewiseHomeo& H, std::span<const double> x, double y,
                                   double step) {
  const int n = H.n();
  std::vector<double> out(n + 1);
  std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
  for (int i = 0; i < n; ++i) {
    xp[i] = x[i] + step;
    xm[i] = x[i] - step;
    out[i] = (H.theta(xp, y) - H.theta(xm, y)) / (2 * step);
    xp[i] = xm[i] = x[i];
  }
  out[n] = (H.theta(x, y + step) - H.theta(x, y - step)) / (2 * step);
  return out;
}

PartialsResult check_bounded_partials(const PiecewiseHomeo& H, const PointCloud& samples,
                                      const ToleranceConfig& tol) {
  const int n = H.n();
  if (samples.dim() != n + 1)
    throw std::invalid_argument("check_bounded_partials: samples must live in R^(n+1)");
  PartialsResult res;
  CheckReport& r = res.report;
  r.name = "bounded_partials";
  r.tolerance = tol.partial_growth;

  double r_min = INFINITY;
  int shells = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    r_min = std::min(r_min, samples.radius(i));
    shells = std::max(shells, samples.shell(i) + 1);
  }
  res.max_per_shell.assign(shells, kNaN);
  std::vector<std::int64_t> argmax(shells, -1);

  std::vector<double> xp(n), xm(n);
  std::size_t used = 0;
  bool finite = true;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto pt = samples.point(i);
    auto x = pt.subspan(0, n);
    const double y = pt[n];
    const FiberCase c = H.select_case(x, y);
    if (c == FiberCase::ZeroSection || c == FiberCase::Degenerate) continue;
    const double F = std::abs(H.f_at(x));
    if (std::abs(std::abs(y) - F) <= tol.boundary_margin * std::max(F, std::abs(y))) continue;

    // Shrink the step until both stencil points stay in the same case.
    double step = 1e-6 * std::max(norm(x), r_min);
    bool ok = false;
    for (int attempt = 0; attempt < 30 && !ok; ++attempt, step *= 0.5) {
      ok = true;
      for (int v = 0; v <= n && ok; ++v) {
        std::copy(x.begin(), x.end(), xp.begin());
        std::copy(x.begin(), x.end(), xm.begin());
        double yp = y, ym = y;
        if (v < n) {
          xp[v] += step;
          xm[v] -= step;
        } else {
          yp += step;
          ym -= step;
        }
        ok = H.select_case(xp, yp) == c && H.select_case(xm, ym) == c;
      }
      if (ok) break;
    }
    if (!ok) continue;
    const auto partials = fiber_partials(H, x, y, step);
    double local = 0.0;
    for (double d : partials) {
      if (!std::isfinite(d)) {
        finite = false;
        if (!r.witness) r.witness = to_vec(pt);
      }
      local = std::max(local, std::abs(d));
    }
    double& slot = res.max_per_shell[samples.shell(i)];
    if (std::isnan(slot) || local > slot) {
      slot = local;
      argmax[samples.shell(i)] = static_cast<std::int64_t>(i);
    }
    res.bound = std::max(res.bound, local);
    ++used;
  }
  r.samples = used;

  // Compare inner-half and outer-half shell bounds.
  double outer = 0.0, inner = 0.0;
  std::int64_t inner_arg = -1;
  for (int s = 0; s < shells; ++s) {
    const double v = res.max_per_shell[s];
    if (std::isnan(v)) continue;
    if (s < shells / 2) {
      outer = std::max(outer, v);
    } else if (v > inner) {
      inner = v;
      inner_arg = argmax[s];
    }
  }
  const double growth = outer > 0.0 ? inner / outer : (inner > 0.0 ? INFINITY : 1.0);
  r.max_violation = growth;
  r.pass = finite && used > 0 && growth <= tol.partial_growth;
  if (!r.pass && !r.witness) {
    if (inner_arg >= 0)
      r.witness = to_vec(samples.point(inner_arg));
    else
      r.witness = samples.empty() ? std::vector<double>{} : to_vec(samples.point(0));
  }
  r.detail = "bound " + fmt(res.bound) + ", inner/outer shell ratio " + fmt(growth);
  if (used == 0) r.detail += " (no usable samples)";
  return res;
}

CheckReport check_fiber_monotonicity(const PiecewiseHomeo& H, const PointCloud& xs) {
  CheckReport r{"fiber_monotonicity", true, 0.0, 0.0, std::nullopt, 0, ""};
  const double s = sign_value(H.sign());
  constexpr int kGrid = 101;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto x = xs.point(i);
    const double F = H.f_at(x);
    if (std::abs(F) <= H.zero_threshold(x)) continue;
    ++checked;
    const double lo = -2.0 * std::abs(F), width = 4.0 * std::abs(F);
    double prev = H.theta(x, lo);
    for (int t = 1; t < kGrid; ++t) {
      const double y = lo + width * t / (kGrid - 1);
      const double cur = H.theta(x, y);
      // Positive when the step goes the wrong way (or stalls).
      const double bad = -s * (cur - prev);
      if (bad >= 0.0) {
        r.pass = false;
        const double scaled = (bad + std::abs(F) * 1e-300) / std::abs(F);
        if (scaled > r.max_violation || !r.witness) {
          r.max_violation = std::max(r.max_violation, scaled);
          std::vector<double> w = to_vec(x);
          w.push_back(y);
          r.witness = std::move(w);
        }
      }
      prev = cur;
    }
  }
  r.samples = checked;
  r.detail = std::string("expected strictly ") +
             (H.sign() == SignBranch::Plus ? "increasing" : "decreasing") + " theta(x, .)";
  return r;
}

CheckReport check_case_continuity(const PiecewiseHomeo& H, const PointCloud& xs, double tol) {
  CheckReport r{"case_continuity", true, tol, 0.0, std::nullopt, 0, ""};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto x = xs.point(i);
    const double F = H.f_at(x);
    if (std::abs(F) <= H.zero_threshold(x)) continue;
    ++r.samples;
    const double same = std::abs(H.theta_case(x, F, FiberCase::Inner) -
                                 H.theta_case(x, F, FiberCase::OuterSame));
    const double opp = std::abs(H.theta_case(x, -F, FiberCase::Inner) -
                                H.theta_case(x, -F, FiberCase::OuterOpposite));
    const double v = std::max(same, opp);
    if (v > r.max_violation || std::isnan(v)) {
      r.max_violation = std::isnan(v) ? INFINITY : v;
      r.witness = to_vec(x);
    }
  }
  r.pass = r.max_violation <= tol;
  if (r.pass) r.witness.reset();
  r.detail = "max gap between inner and outer formulas at |y| = |f(x)|: " + fmt(r.max_violation);
  return r;
}

CheckReport check_zero_section_exact(const PiecewiseHomeo& H, const PointCloud& xs) {
  CheckReport r{"zero_section_exact", true, 0.0, 0.0, std::nullopt, xs.size(), ""};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = H.theta(xs.point(i), 0.0);
    if (v != 0.0) {
      r.pass = false;
      if (std::abs(v) > r.max_violation) {
        r.max_violation = std::abs(v);
        r.witness = to_vec(xs.point(i));
      }
    }
  }
  r.detail = "theta(x, 0) compared to 0 exactly";
  return r;
}

CheckReport check_commutativity(const EvaluableMap& H, const PolyGerm& f, const CoordChange& h,
                                const PointCloud& xs, double tol) {
  const int n = f.n(), dim = n + f.p();
  CheckReport r{"commutativity", true, tol, 0.0, std::nullopt, xs.size(), ""};
  const auto projected = kernels::map_points(
      [&](std::span<const double> x, std::span<double> out) {
        std::vector<double> xy(dim), img(dim);
        std::copy(x.begin(), x.end(), xy.begin());
        f.eval_into(x, std::span<double>(xy).subspan(n));
        H.forward(xy, img);
        std::copy(img.begin(), img.begin() + n, out.begin());
      },
      xs, n);
  const auto hx = kernels::map_points(
      [&](std::span<const double> x, std::span<double> out) { h.apply(x, out); }, xs, n);
  const auto worst = kernels::max_block_distance_parallel(projected, hx, n);
  r.max_violation = worst.value;
  r.pass = worst.value <= tol;
  if (!r.pass && worst.index >= 0) r.witness = to_vec(xs.point(worst.index));
  r.detail = "max ||pi_n H(x, f(x)) - h(x)|| = " + fmt(worst.value);
  return r;
}

CheckReport check_bilipschitz(const std::string& name, const BiLipEstimate& e,
                              const ToleranceConfig& tol) {
  CheckReport r{name, true, tol.lipschitz_cap, std::max(e.L_forward, e.L_inverse),
                std::nullopt, e.num_pairs, ""};
  const bool finite = std::isfinite(e.L_forward) && std::isfinite(e.L_inverse);
  const bool capped = e.L_forward <= tol.lipschitz_cap && e.L_inverse <= tol.lipschitz_cap;
  const bool consistent = e.L_forward * e.L_inverse >= 1.0 - 1e-9;
  r.pass = e.num_pairs > 0 && finite && capped && consistent;
  if (!r.pass) {
    const auto& w = e.L_forward >= e.L_inverse ? e.witness_pair_forward : e.witness_pair_inverse;
    std::vector<double> flat = w[0];
    flat.insert(flat.end(), w[1].begin(), w[1].end());
    r.witness = flat;
  }
  r.detail = "L_forward " + fmt(e.L_forward) + ", L_inverse " + fmt(e.L_inverse) + " over " +
             std::to_string(e.num_pairs) + " pairs";
  if (!consistent) r.detail += "; L_forward * L_inverse < 1";
  return r;
}

CheckBundle verify_K_equivalence(const PolyGerm& f, const PolyGerm& g, const EvaluableMap& H,
                                 const CoordChange& h, const SampleScheme& scheme,
                                 const ToleranceConfig& tol) {
  if (f.n() != g.n() || f.p() != g.p() || H.dim != f.n() + f.p() || h.dim() != f.n())
    throw std::invalid_argument("verify_K_equivalence: inconsistent dimensions");
  const int n = f.n(), p = f.p();
  const PointCloud xs = sample_punctured_ball(scheme, n);
  const PointCloud fibers = fiber_cloud(f, scheme);

  CheckBundle b;
  b.checks.push_back(check_graph_mapping(H, f, g, h, xs, tol.check_tol));
  auto zero = check_subspace_invariance(H, n, std::vector<bool>(p, true), fibers, tol.check_tol);
  zero.name = "zero_section_invariance";
  b.checks.push_back(std::move(zero));
  b.map_estimate = estimate_lipschitz(H, fibers);
  b.checks.push_back(check_bilipschitz("bilipschitz_H", *b.map_estimate, tol));
  b.factor_estimate = estimate_lipschitz(as_map(h), xs);
  b.checks.push_back(check_bilipschitz("bilipschitz_h", *b.factor_estimate, tol));
  b.checks.push_back(check_commutativity(H, f, h, xs, tol.check_tol));
  return b;
}

CheckBundle verify_multiK(const PolyGerm& f, const PolyGerm& g, const MultiHomeo& M,
                          const SampleScheme& scheme, const ToleranceConfig& tol) {
  if (M.p() != f.p() || M.n() != f.n())
    throw std::invalid_argument("verify_multiK: map and germ dimensions differ");
  const int n = f.n(), p = f.p();
  const EvaluableMap H = as_map(M);
  const CoordChange& h = M.common_factor();
  CheckBundle b = verify_K_equivalence(f, g, H, h, scheme, tol);

  const PointCloud xs = sample_punctured_ball(scheme, n);
  const PointCloud fibers = fiber_cloud(f, scheme);
  if (p > 1) {
    for (int k = 0; k < p; ++k) {
      std::vector<bool> mask(p, false);
      mask[k] = true;
      auto rep = check_subspace_invariance(H, n, mask, fibers, tol.check_tol);
      rep.name = "component_zero_section[" + std::to_string(k) + "]";
      b.checks.push_back(std::move(rep));
    }
  }
  for (int k = 0; k < p; ++k) {
    const PiecewiseHomeo& part = M.components()[k];
    const PolyGerm fk = f.scalar_component(k), gk = g.scalar_component(k);
    // Component graph mapping against the common factor.
    auto graph = check_graph_mapping(as_map(part), fk, gk, h, xs, tol.check_tol);
    graph.name = "component_graph_mapping[" + std::to_string(k) + "]";
    b.checks.push_back(std::move(graph));
    // Each H_k = (h_k(x), theta_k) must project onto the common factor.
    auto comm = check_commutativity(as_map(part), fk, h, xs, tol.check_tol);
    comm.name = "component_commutativity[" + std::to_string(k) + "]";
    b.checks.push_back(std::move(comm));
  }
  return b;
}

CheckBundle verify_fiber_construction(const PiecewiseHomeo& H, const SampleScheme& scheme,
                                      const ToleranceConfig& tol) {
  const PointCloud xs = sample_punctured_ball(scheme, H.n());
  CheckBundle b;
  b.checks.push_back(check_graph_mapping(as_map(H), H.f(), H.g(), H.h(), xs, tol.check_tol));
  b.checks.push_back(check_zero_section_exact(H, xs));
  b.checks.push_back(check_case_continuity(H, xs, tol.check_tol));
  b.checks.push_back(check_fiber_monotonicity(H, xs));
  return b;
}

}  // namespace kbilip
