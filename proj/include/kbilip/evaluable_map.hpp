#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace kbilip {

// Type-erased map R^dim -> R^dim with an optional inverse. Evaluators must be
// safe to call concurrently.
struct EvaluableMap {
  using Fn = std::function<void(std::span<const double>, std::span<double>)>;

  int dim = 0;
  Fn forward;
  Fn inverse;

  bool has_inverse() const noexcept { return static_cast<bool>(inverse); }
  std::vector<double> operator()(std::span<const double> in) const;
  std::vector<double> apply_inverse(std::span<const double> in) const;
};

EvaluableMap identity_map(int dim);
EvaluableMap linear_map(const Eigen::MatrixXd& a);

}  // namespace kbilip
