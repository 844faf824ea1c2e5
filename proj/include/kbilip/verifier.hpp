#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kbilip/coord_change.hpp"
#include "kbilip/evaluable_map.hpp"
#include "kbilip/germ.hpp"
#include "kbilip/homeo.hpp"
#include "kbilip/kernels.hpp"
#include "kbilip/sampling.hpp"
#include "kbilip/tolerance.hpp"

namespace kbilip {

// Sampled lower bounds on the Lipschitz constants of a map and its inverse.
struct BiLipEstimate {
  double L_forward = 0.0;
  double L_inverse = 0.0;
  std::array<std::vector<double>, 2> witness_pair_forward;
  std::array<std::vector<double>, 2> witness_pair_inverse;
  std::size_t num_pairs = 0;
};

// Pairs that share a fiber group are always used. On top of those: all pairs
// inside a radius shell and each point's nearest neighbour in the next shell.
// When these exceed max_pairs they are thinned with a fixed stride.
struct PairingPolicy {
  bool within_shell = true;
  bool cross_shell_nn = true;
  std::size_t max_pairs = 100000;
};

std::vector<kernels::IndexPair> build_pairs(const PointCloud& cloud, const PairingPolicy& policy);

BiLipEstimate estimate_lipschitz(const EvaluableMap& map, const PointCloud& samples,
                                 const PairingPolicy& policy = {});

struct CheckReport {
  std::string name;
  bool pass = true;
  double tolerance = 0.0;
  double max_violation = 0.0;
  std::optional<std::vector<double>> witness;
  std::size_t samples = 0;
  std::string detail;
};

nlohmann::json check_to_json(const CheckReport& r);

struct CheckBundle {
  std::vector<CheckReport> checks;
  std::optional<BiLipEstimate> map_estimate;
  std::optional<BiLipEstimate> factor_estimate;

  bool pass() const;
  const CheckReport* find(const std::string& name) const;
  std::vector<std::string> failed() const;
  void append(const CheckBundle& other);
};

nlohmann::json bundle_to_json(const CheckBundle& b);
nlohmann::json estimate_to_json(const BiLipEstimate& e);

// Samples (x, y) in R^n x R^p for checking a map fibered over x: for each
// source sample x, the points (x, t f(x)) for t in {-2,-1,-1/2,0,1/2,1,2}
// (one fiber group per x), plus punctured-ball points of R^{n+p}.
PointCloud fiber_cloud(const PolyGerm& f, const SampleScheme& scheme);

// max over x of ||H(x, f(x)) - (h(x), g(h(x)))||.
CheckReport check_graph_mapping(const EvaluableMap& H, const PolyGerm& f, const PolyGerm& g,
                                const CoordChange& h, const PointCloud& xs, double tol);

// mask[k] = true pins target coordinate k to 0. Samples are projected onto the
// subspace first; passes iff the pinned image coordinates stay within tol.
CheckReport check_subspace_invariance(const EvaluableMap& H, int n,
                                      const std::vector<bool>& mask, const PointCloud& samples,
                                      double tol);

// The p+1 coordinate subspaces R^n x {0}^p and R^n x {y_k = 0}, k = 1..p.
std::vector<CheckReport> check_all_subspaces(const EvaluableMap& H, int n, int p,
                                             const PointCloud& samples, double tol);

enum class HalfspaceBehavior { Preserves, Swaps, Mixed };
const char* to_string(HalfspaceBehavior b);

struct HalfspaceResult {
  HalfspaceBehavior behavior = HalfspaceBehavior::Mixed;
  CheckReport report;
};

// Sign of output coordinate n+k against input coordinate n+k (k zero-based)
// on samples with |y_k| > margin * radius. Without `expected` the check
// passes unless the behavior is Mixed; with it, only on an exact match.
HalfspaceResult check_halfspace_behavior(const EvaluableMap& H, int n, int k,
                                         const PointCloud& samples, double margin = 1e-6,
                                         std::optional<HalfspaceBehavior> expected = {});

// Central differences of theta in each x_i and in y.
std::vector<double> fiber_partials(const PiecewiseHomeo& H, std::span<const double> x, double y,
                                   double step);

struct PartialsResult {
  CheckReport report;
  std::vector<double> max_per_shell;  // NaN for shells with no usable sample
  double bound = 0.0;
};

// Finite-difference partials of theta away from case boundaries; passes iff
// all are finite and the bound on the inner half of the shells is at most
// tol.partial_growth times the bound on the outer half.
PartialsResult check_bounded_partials(const PiecewiseHomeo& H, const PointCloud& samples,
                                      const ToleranceConfig& tol = {});

// theta(x, .) on 101 points of [-2|f(x)|, 2|f(x)|] must be strictly
// increasing (plus branch) or decreasing (minus branch).
CheckReport check_fiber_monotonicity(const PiecewiseHomeo& H, const PointCloud& xs);

// Inner vs outer formulas at |y| = |f(x)|.
CheckReport check_case_continuity(const PiecewiseHomeo& H, const PointCloud& xs, double tol);

// theta(x, 0) == 0 with no tolerance.
CheckReport check_zero_section_exact(const PiecewiseHomeo& H, const PointCloud& xs);

// First n coordinates of H(x, f(x)) against h(x).
CheckReport check_commutativity(const EvaluableMap& H, const PolyGerm& f, const CoordChange& h,
                                const PointCloud& xs, double tol);

CheckReport check_bilipschitz(const std::string& name, const BiLipEstimate& e,
                              const ToleranceConfig& tol);

CheckBundle verify_K_equivalence(const PolyGerm& f, const PolyGerm& g, const EvaluableMap& H,
                                 const CoordChange& h, const SampleScheme& scheme,
                                 const ToleranceConfig& tol = {});

CheckBundle verify_multiK(const PolyGerm& f, const PolyGerm& g, const MultiHomeo& M,
                          const SampleScheme& scheme, const ToleranceConfig& tol = {});

// Properties of a single fiber construction: graph mapping, exact zero
// section, case-boundary continuity and fiber monotonicity.
CheckBundle verify_fiber_construction(const PiecewiseHomeo& H, const SampleScheme& scheme,
                                      const ToleranceConfig& tol = {});

}  // namespace kbilip
