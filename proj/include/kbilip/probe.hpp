#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kbilip/contact.hpp"
#include "kbilip/coord_change.hpp"
#include "kbilip/germ.hpp"
#include "kbilip/sampling.hpp"
#include "kbilip/tolerance.hpp"
#include "kbilip/verifier.hpp"

namespace kbilip {

class ProbeError : public std::runtime_error {
 public:
  ProbeError(const std::string& what, std::size_t count = 0)
      : std::runtime_error(what), count_(count) {}
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

struct RandomDraw {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  // Used when ProbeConfig::values is empty: uniform coefficients in [lo, hi].
  double lo = -1.0, hi = 1.0;
};

// Germs of P^k(n, p): every monomial of degree 1..k in every component is a
// coefficient slot. Grid mode takes each slot over `values`; random mode draws
// `random->count` germs (from `values` when given).
struct ProbeConfig {
  int n = 1, p = 1, k = 1;
  std::vector<double> values;
  std::optional<RandomDraw> random;
  std::string catalog = "id,signs,perms";
  SampleScheme scheme;
  ToleranceConfig tol;
  std::size_t max_germs = 100000;

  void validate() const;
};

ProbeConfig probe_config_from_json(const nlohmann::json& doc);
nlohmann::json probe_config_to_json(const ProbeConfig& c);

// Monomial exponents of the coefficient slots of one component, by degree
// then descending lexicographic order (x1 before x2).
std::vector<Exponent> coefficient_slots(int n, int k);

// Grid mode enumerates by max |coefficient|, ties in lexicographic order of
// the slot values (first slot most significant, values in listed order).
// Duplicates are dropped by canonical serialization. Throws ProbeError when
// the grid is empty or larger than max_germs.
std::vector<PolyGerm> generate_germs(const ProbeConfig& config);

struct LinkAttempt {
  std::string h;
  std::vector<ContactKind> kinds;  // per component, for (f_i, g_i o h)
  bool verified = false;           // only set when every component is related
  std::vector<std::string> failed_checks;
};

struct PairCertificate {
  std::size_t catalog_index = 0;
  std::string h;
  std::vector<int> signs;  // +1 Equivalent, -1 NegEquivalent, per component
  CheckBundle bundle;
};

struct PairSearch {
  std::optional<PairCertificate> certificate;
  std::vector<LinkAttempt> attempts;
  // Some h left no component Distinct without yielding a certificate.
  bool undecided = false;
};

// Tries the catalog in order. For each h, componentwise signed_contact; when
// all components are related the MultiHomeo is assembled and must pass
// verify_multiK. Stops at the first certified h.
PairSearch certify_pair(const PolyGerm& f, const PolyGerm& g,
                        const std::vector<CoordChange>& catalog, const SampleScheme& scheme,
                        const ToleranceConfig& tol);

// Rebuilds the MultiHomeo of a certificate tuple.
MultiHomeo build_multi(const PolyGerm& f, const PolyGerm& g, const CoordChange& h,
                       const std::vector<int>& signs, const ToleranceConfig& tol);

struct ClassLink {
  std::size_t member = 0;
  std::size_t linked_to = 0;
  std::string h;
  std::vector<int> signs;
};

struct ProbeClass {
  std::size_t representative = 0;
  std::vector<std::size_t> members;
  std::string signature;
  std::vector<ClassLink> evidence;
};

struct ClassPartition {
  std::vector<PolyGerm> germs;
  std::vector<std::string> signatures;
  std::vector<ProbeClass> classes;  // ordered by representative
  std::vector<std::pair<std::size_t, std::size_t>> unresolved;
  // (m, classes among the first m germs)
  std::vector<std::pair<std::size_t, std::size_t>> curve;
  std::size_t link_attempts = 0;

  std::size_t upper_bound() const noexcept { return classes.size(); }
  // Number of distinct signatures: no two of these can share a class.
  std::size_t lower_bound() const;
  double unresolved_fraction() const;
  // Index of the class containing germ i.
  std::size_t class_of(std::size_t i) const;
};

ClassPartition cluster_classes(const std::vector<PolyGerm>& germs, const ProbeConfig& config);

// Smallest m with curve[m-1] equal to the final count (0 when empty).
std::size_t plateau_index(const ClassPartition& partition);

// Re-synthesizes and re-verifies every link; returns the failing links.
std::vector<ClassLink> recheck_certificates(const ClassPartition& partition,
                                           const ProbeConfig& config);

nlohmann::json probe_report(const ClassPartition& partition);

}  // namespace kbilip
