#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kbilip/coord_change.hpp"
#include "kbilip/germ.hpp"
#include "kbilip/sampling.hpp"
#include "kbilip/tolerance.hpp"

namespace kbilip {

enum class ContactKind { Equivalent, NegEquivalent, Distinct, Inconclusive };

const char* to_string(ContactKind kind);
ContactKind contact_kind_from_string(const std::string& s);

struct RadiusStats {
  int index = 0;
  double radius = 0.0;
  std::size_t ratios = 0;
  std::size_t mismatches = 0;
  std::size_t both_zero = 0;
  // Signed and absolute ratio ranges; NaN when no ratio was recorded.
  double min_ratio = 0.0, max_ratio = 0.0;
  double min_abs_ratio = 0.0, max_abs_ratio = 0.0;
};

// Evidence that a pair is separated: a defect seen on `ray` at every one of
// the `length` innermost radii starting at `first_radius`.
//   decay / growth       |g/f| shrinks (grows) by at least sqrt(rho) per step
//   sign_change          both ratio signs occur at each of those radii
//   vanishing_mismatch   exactly one of f, g is below the zero threshold
struct SeparationCertificate {
  std::string reason;
  int ray = -1;
  int first_radius = 0;
  int length = 0;
};

struct ContactEvidence {
  std::size_t samples = 0;
  std::size_t ratios_used = 0;
  std::size_t both_zero = 0;
  std::size_t mismatches = 0;
  std::vector<RadiusStats> per_radius;
  std::optional<SeparationCertificate> certificate;
  // Both sides vanish on every sample: the global sign is undefined.
  bool ambiguous_sign = false;
};

struct ContactVerdict {
  ContactKind kind = ContactKind::Inconclusive;
  std::optional<double> c_lower, c_upper;
  std::optional<std::vector<double>> witness;
  ContactEvidence evidence;

  bool related() const noexcept {
    return kind == ContactKind::Equivalent || kind == ContactKind::NegEquivalent;
  }
};

nlohmann::json verdict_to_json(const ContactVerdict& v);

// Number of innermost radii a separation certificate must span.
inline constexpr int kCertificateRun = 3;

// Semidecision of f ≈ g (c1 f <= g <= c2 f near 0) on the sample scheme.
// Both germs must be scalar (p = 1) with the same n; throws GermError
// otherwise.
ContactVerdict same_contact(const PolyGerm& f, const PolyGerm& g, const SampleScheme& scheme,
                            const ToleranceConfig& tol = {});

// same_contact applied to f and g∘h; the kind records whether f ≈ g∘h
// (Equivalent) or f ≈ -g∘h (NegEquivalent).
ContactVerdict signed_contact(const PolyGerm& f, const PolyGerm& g, const CoordChange& h,
                              const SampleScheme& scheme, const ToleranceConfig& tol = {});

struct VanishingOrder {
  bool identically_zero = false;
  double order = 0.0;  // NaN if fewer than two nonzero samples
  std::size_t points_used = 0;
};

// Least-squares slope of log|f(r d)| against log r over the scheme radii
// where |f| exceeds the zero threshold.
VanishingOrder vanishing_order(const PolyGerm& f, std::span<const double> direction,
                               const SampleScheme& scheme, const ToleranceConfig& tol = {});

struct RaySignature {
  struct Component {
    std::string sign_pattern;  // one of '+', '-', '0' per radius, outermost first
    VanishingOrder order;
  };
  std::vector<double> direction;
  std::vector<Component> per_component;
};

std::vector<RaySignature> signature(const PolyGerm& f,
                                    const std::vector<std::vector<double>>& directions,
                                    const SampleScheme& scheme, const ToleranceConfig& tol = {});

// Cheap invariant used for bucketing: per component, "Z" when identically
// zero on every ray, otherwise "o" + the smallest rounded vanishing order.
std::string signature_key(const std::vector<RaySignature>& sig);
std::string signature_key(const PolyGerm& f, const SampleScheme& scheme,
                          const ToleranceConfig& tol = {});

}  // namespace kbilip
