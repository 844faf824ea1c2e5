#include "kbilip/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kbilip/kernels.hpp"

namespace kbilip {

using nlohmann::json;

const char* to_string(ContactKind kind) {
  switch (kind) {
    case ContactKind::Equivalent: return "Equivalent";
    case ContactKind::NegEquivalent: return "NegEquivalent";
    case ContactKind::Distinct: return "Distinct";
    case ContactKind::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

ContactKind contact_kind_from_string(const std::string& s) {
  for (auto k : {ContactKind::Equivalent, ContactKind::NegEquivalent, ContactKind::Distinct,
                 ContactKind::Inconclusive})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown contact kind '" + s + "'");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

enum class SampleClass { BothZero, FZeroOnly, GZeroOnly, Ratio };

struct Sample {
  SampleClass cls;
  double ratio;
};

void require_scalar_pair(const PolyGerm& f, const PolyGerm& g) {
  if (f.p() != 1 || g.p() != 1)
    throw GermError(GermError::Kind::DimensionMismatch, "p",
                    "contact oracle takes scalar germs (p = 1); split vector germs into "
                    "components first");
  if (f.n() != g.n())
    throw GermError(GermError::Kind::DimensionMismatch, "n",
                    "germs have different source dimensions " + std::to_string(f.n()) +
                        " and " + std::to_string(g.n()));
}

// Core of same_contact / signed_contact. With h set, the right-hand side is
// g∘h.
ContactVerdict assess_contact(const PolyGerm& f, const PolyGerm& g, const CoordChange* h,
                              const SampleScheme& scheme, const ToleranceConfig& tol) {
  require_scalar_pair(f, g);
  scheme.validate();
  const int n = f.n();
  const int k = std::max(f.k(), g.k());
  const PointCloud cloud = sample_punctured_ball(scheme, n);

  const kernels::PointMap eval_pair = [&](std::span<const double> x, std::span<double> out) {
    out[0] = f.component(0).eval(x);
    if (h) {
      thread_local std::vector<double> hx;
      hx.resize(n);
      h->apply(x, hx);
      out[1] = g.component(0).eval(hx);
    } else {
      out[1] = g.component(0).eval(x);
    }
  };
  const std::vector<double> vals = kernels::map_points(eval_pair, cloud, 2);

  const int radii = scheme.num_radii;
  const int rays = scheme.dirs_per_radius;
  // samples[j * rays + d]
  std::vector<Sample> samples(cloud.size());
  ContactVerdict verdict;
  ContactEvidence& ev = verdict.evidence;
  ev.samples = cloud.size();
  ev.per_radius.resize(radii);

  double min_abs = INFINITY, max_abs = 0.0;
  bool any_pos = false, any_neg = false;
  for (int j = 0; j < radii; ++j) {
    RadiusStats& rs = ev.per_radius[j];
    rs.index = j;
    rs.radius = scheme.radius(j);
    rs.min_ratio = rs.min_abs_ratio = INFINITY;
    rs.max_ratio = -INFINITY;
    rs.max_abs_ratio = 0.0;
    const double eps = tol.eps_zero(rs.radius, k);
    for (int d = 0; d < rays; ++d) {
      const std::size_t i = std::size_t(j) * rays + d;
      const double fx = vals[2 * i], gx = vals[2 * i + 1];
      const bool fz = std::abs(fx) <= eps, gz = std::abs(gx) <= eps;
      Sample& s = samples[i];
      s.ratio = kNaN;
      if (fz && gz) {
        s.cls = SampleClass::BothZero;
        ++rs.both_zero;
      } else if (fz) {
        s.cls = SampleClass::FZeroOnly;
        ++rs.mismatches;
      } else if (gz) {
        s.cls = SampleClass::GZeroOnly;
        ++rs.mismatches;
      } else {
        s.cls = SampleClass::Ratio;
        s.ratio = gx / fx;
        ++rs.ratios;
        const double a = std::abs(s.ratio);
        rs.min_ratio = std::min(rs.min_ratio, s.ratio);
        rs.max_ratio = std::max(rs.max_ratio, s.ratio);
        rs.min_abs_ratio = std::min(rs.min_abs_ratio, a);
        rs.max_abs_ratio = std::max(rs.max_abs_ratio, a);
        min_abs = std::min(min_abs, a);
        max_abs = std::max(max_abs, a);
        (s.ratio > 0 ? any_pos : any_neg) = true;
      }
    }
    if (rs.ratios == 0) rs.min_ratio = rs.max_ratio = rs.min_abs_ratio = rs.max_abs_ratio = kNaN;
    ev.ratios_used += rs.ratios;
    ev.both_zero += rs.both_zero;
    ev.mismatches += rs.mismatches;
  }

  auto sample_at = [&](int j, int d) -> const Sample& { return samples[std::size_t(j) * rays + d]; };
  auto witness_on = [&](int d) {
    const std::size_t i = std::size_t(radii - 1) * rays + d;
    auto p = cloud.point(i);
    return std::vector<double>(p.begin(), p.end());
  };

  // Separation certificates on the innermost kCertificateRun radii.
  if (radii >= kCertificateRun && rays > 0) {
    const int first = radii - kCertificateRun;
    const double step = std::sqrt(scheme.rho);
    auto certify = [&](const char* reason, int d) {
      verdict.kind = ContactKind::Distinct;
      verdict.witness = witness_on(d);
      ev.certificate = SeparationCertificate{reason, d, first, kCertificateRun};
      return verdict;
    };

    for (int d = 0; d < rays; ++d) {
      bool all_ratio = true;
      for (int j = first; j < radii; ++j) all_ratio &= sample_at(j, d).cls == SampleClass::Ratio;
      if (!all_ratio) continue;
      bool decay = true, growth = true;
      for (int j = first; j + 1 < radii; ++j) {
        const double a = std::abs(sample_at(j, d).ratio);
        const double b = std::abs(sample_at(j + 1, d).ratio);
        decay &= b <= step * a;
        growth &= b * step >= a;
      }
      if (decay) return certify("decay", d);
      if (growth) return certify("growth", d);
    }
    for (int d = 0; d < rays; ++d) {
      bool mismatch = true;
      for (int j = first; j < radii; ++j) {
        const auto c = sample_at(j, d).cls;
        mismatch &= c == SampleClass::FZeroOnly || c == SampleClass::GZeroOnly;
      }
      if (mismatch) return certify("vanishing_mismatch", d);
    }
    bool persistent_sign_change = true;
    for (int j = first; j < radii; ++j) {
      const RadiusStats& rs = ev.per_radius[j];
      persistent_sign_change &= rs.ratios > 0 && rs.min_ratio < 0 && rs.max_ratio > 0;
    }
    if (persistent_sign_change) {
      // Witness: first innermost ray on the minority sign.
      int pos = 0, neg = 0;
      for (int d = 0; d < rays; ++d) {
        const Sample& s = sample_at(radii - 1, d);
        if (s.cls == SampleClass::Ratio) (s.ratio > 0 ? pos : neg)++;
      }
      const bool minority_negative = neg <= pos;
      for (int d = 0; d < rays; ++d) {
        const Sample& s = sample_at(radii - 1, d);
        if (s.cls == SampleClass::Ratio && ((s.ratio < 0) == minority_negative))
          return certify("sign_change", d);
      }
    }
  }

  if (ev.ratios_used == 0 && ev.mismatches == 0) {
    verdict.kind = ContactKind::Equivalent;
    verdict.c_lower = verdict.c_upper = 1.0;
    ev.ambiguous_sign = true;
    return verdict;
  }
  if (ev.mismatches == 0 && ev.ratios_used > 0 && !(any_pos && any_neg) &&
      min_abs >= tol.ratio_floor && max_abs <= 1.0 / tol.ratio_floor) {
    verdict.kind = any_pos ? ContactKind::Equivalent : ContactKind::NegEquivalent;
    verdict.c_lower = min_abs;
    verdict.c_upper = max_abs;
    return verdict;
  }
  verdict.kind = ContactKind::Inconclusive;
  return verdict;
}

}  // namespace

json verdict_to_json(const ContactVerdict& v) {
  json per_radius = json::array();
  for (const auto& rs : v.evidence.per_radius) {
    per_radius.push_back({{"index", rs.index},
                          {"radius", rs.radius},
                          {"ratios", rs.ratios},
                          {"mismatches", rs.mismatches},
                          {"both_zero", rs.both_zero},
                          {"min_ratio", number_or_null(rs.min_ratio)},
                          {"max_ratio", number_or_null(rs.max_ratio)},
                          {"min_abs_ratio", number_or_null(rs.min_abs_ratio)},
                          {"max_abs_ratio", number_or_null(rs.max_abs_ratio)}});
  }
  json evidence = {{"samples", v.evidence.samples},
                   {"ratios_used", v.evidence.ratios_used},
                   {"both_zero", v.evidence.both_zero},
                   {"mismatches", v.evidence.mismatches},
                   {"ambiguous_sign", v.evidence.ambiguous_sign},
                   {"per_radius", per_radius}};
  if (v.evidence.certificate) {
    const auto& c = *v.evidence.certificate;
    evidence["certificate"] = {{"reason", c.reason},
                               {"ray", c.ray},
                               {"first_radius", c.first_radius},
                               {"length", c.length}};
  } else {
    evidence["certificate"] = nullptr;
  }
  return {{"kind", to_string(v.kind)},
          {"c_lower", v.c_lower ? json(*v.c_lower) : json(nullptr)},
          {"c_upper", v.c_upper ? json(*v.c_upper) : json(nullptr)},
          {"witness", v.witness ? json(*v.witness) : json(nullptr)},
          {"evidence", evidence}};
}

ContactVerdict same_contact(const PolyGerm& f, const PolyGerm& g, const SampleScheme& scheme,
                            const ToleranceConfig& tol) {
  return assess_contact(f, g, nullptr, scheme, tol);
}

ContactVerdict signed_contact(const PolyGerm& f, const PolyGerm& g, const CoordChange& h,
                              const SampleScheme& scheme, const ToleranceConfig& tol) {
  require_scalar_pair(f, g);
  if (h.dim() != f.n())
    throw GermError(GermError::Kind::DimensionMismatch, "h",
                    "coordinate change dimension differs from germ source dimension");
  return assess_contact(f, g, &h, scheme, tol);
}

VanishingOrder vanishing_order(const PolyGerm& f, std::span<const double> direction,
                               const SampleScheme& scheme, const ToleranceConfig& tol) {
  if (f.p() != 1)
    throw GermError(GermError::Kind::DimensionMismatch, "p", "vanishing order of a scalar germ");
  if (static_cast<int>(direction.size()) != f.n())
    throw GermError(GermError::Kind::DimensionMismatch, "direction", "dimension mismatch");
  if (std::abs(norm(direction) - 1.0) > 1e-9)
    throw std::invalid_argument("vanishing_order: direction must be a unit vector");
  scheme.validate();

  std::vector<double> x(direction.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (int j = 0; j < scheme.num_radii; ++j) {
    const double r = scheme.radius(j);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = r * direction[i];
    const double v = std::abs(f.component(0).eval(x));
    if (v <= tol.eps_zero(r, f.k())) continue;
    const double lx = std::log(r), ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  VanishingOrder out;
  out.points_used = m;
  if (m == 0) {
    out.identically_zero = true;
    return out;
  }
  const double denom = m * sxx - sx * sx;
  out.order = (m < 2 || denom == 0.0) ? kNaN : (m * sxy - sx * sy) / denom;
  return out;
}

std::vector<RaySignature> signature(const PolyGerm& f,
                                    const std::vector<std::vector<double>>& directions,
                                    const SampleScheme& scheme, const ToleranceConfig& tol) {
  if (directions.empty()) throw std::invalid_argument("signature: empty direction list");
  std::vector<RaySignature> out;
  out.reserve(directions.size());
  std::vector<double> x(f.n());
  for (const auto& d : directions) {
    RaySignature rs;
    rs.direction = d;
    for (int c = 0; c < f.p(); ++c) {
      const PolyGerm fc = f.scalar_component(c);
      RaySignature::Component comp;
      for (int j = 0; j < scheme.num_radii; ++j) {
        const double r = scheme.radius(j);
        for (int i = 0; i < f.n(); ++i) x[i] = r * d[i];
        const double v = fc.component(0).eval(x);
        const double eps = tol.eps_zero(r, f.k());
        comp.sign_pattern += std::abs(v) <= eps ? '0' : (v > 0 ? '+' : '-');
      }
      comp.order = vanishing_order(fc, d, scheme, tol);
      rs.per_component.push_back(std::move(comp));
    }
    out.push_back(std::move(rs));
  }
  return out;
}

std::string signature_key(const std::vector<RaySignature>& sig) {
  if (sig.empty()) return "";
  const std::size_t p = sig.front().per_component.size();
  std::string key;
  for (std::size_t c = 0; c < p; ++c) {
    if (c) key += '|';
    int best = std::numeric_limits<int>::max();
    for (const auto& ray : sig) {
      const auto& o = ray.per_component[c].order;
      if (o.identically_zero || !std::isfinite(o.order)) continue;
      best = std::min(best, static_cast<int>(std::lround(o.order)));
    }
    key += best == std::numeric_limits<int>::max() ? std::string("Z") : "o" + std::to_string(best);
  }
  return key;
}

std::string signature_key(const PolyGerm& f, const SampleScheme& scheme,
                          const ToleranceConfig& tol) {
  return signature_key(
      signature(f, unit_directions(f.n(), std::max(1, scheme.dirs_per_radius), scheme.seed),
                scheme, tol));
}

}  // namespace kbilip
