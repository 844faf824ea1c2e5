#include "kbilip/evaluable_map.hpp"

#include <stdexcept>

namespace kbilip {

std::vector<double> EvaluableMap::operator()(std::span<const double> in) const {
  if (static_cast<int>(in.size()) != dim)
    throw std::invalid_argument("EvaluableMap: input dimension mismatch");
  std::vector<double> out(dim);
  forward(in, out);
  return out;
}

std::vector<double> EvaluableMap::apply_inverse(std::span<const double> in) const {
  if (!inverse) throw std::logic_error("EvaluableMap: no inverse evaluator");
  if (static_cast<int>(in.size()) != dim)
    throw std::invalid_argument("EvaluableMap: input dimension mismatch");
  std::vector<double> out(dim);
  inverse(in, out);
  return out;
}

EvaluableMap identity_map(int dim) {
  auto copy = [](std::span<const double> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), out.begin());
  };
  return {dim, copy, copy};
}

EvaluableMap linear_map(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("linear_map: matrix must be square");
  auto apply = [](const Eigen::MatrixXd& m) {
    return [m](std::span<const double> in, std::span<double> out) {
      Eigen::Map<const Eigen::VectorXd> v(in.data(), static_cast<Eigen::Index>(in.size()));
      Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) = m * v;
    };
  };
  return {static_cast<int>(a.rows()), apply(a), apply(a.inverse())};
}

}  // namespace kbilip
