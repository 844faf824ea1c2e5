#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kbilip/polynomial.hpp"

namespace kbilip {

// Polynomial map germ f = (f_1, ..., f_p) : (R^n, 0) -> (R^p, 0) with every
// component of degree at most k. Construction enforces f(0) = 0.
class PolyGerm {
 public:
  PolyGerm(int n, int p, int k, std::vector<Polynomial> components);

  // p = 1 germ.
  static PolyGerm scalar(Polynomial f, int k);
  static PolyGerm scalar(Polynomial f) { return scalar(f, std::max(1, f.degree())); }
  static PolyGerm zero(int n, int p, int k);

  int n() const noexcept { return n_; }
  int p() const noexcept { return p_; }
  int k() const noexcept { return k_; }
  const std::vector<Polynomial>& components() const noexcept { return components_; }
  const Polynomial& component(int i) const { return components_.at(i); }

  // Component i as a scalar germ with the same degree bound.
  PolyGerm scalar_component(int i) const;

  std::vector<double> eval(std::span<const double> x) const;
  void eval_into(std::span<const double> x, std::span<double> out) const;
  // Only valid for p = 1.
  double eval_scalar(std::span<const double> x) const;

  PolyGerm scaled(double c) const;
  // x -> f(A x), degree bound unchanged.
  PolyGerm compose_linear(const Eigen::MatrixXd& a) const;

  bool operator==(const PolyGerm& other) const = default;

 private:
  int n_, p_, k_;
  std::vector<Polynomial> components_;
};

// Target splitting q = (q_1, ..., q_p) of a multi pair of map germs. A map
// germ into R^p is the multi pair with q = (1, ..., 1).
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> entries);
  static MultiIndex scalar_blocks(int p) { return MultiIndex(std::vector<int>(p, 1)); }

  const std::vector<int>& entries() const noexcept { return entries_; }
  int blocks() const noexcept { return static_cast<int>(entries_.size()); }
  int total() const noexcept;
  bool all_scalar() const noexcept;

 private:
  std::vector<int> entries_;
};

// Germ-definition document:
//   { "n": int, "p": int, "k": int,
//     "components": [ [ {"exp": [int,...], "coef": number}, ... ], ... ] }
PolyGerm germ_from_json(const nlohmann::json& doc);
nlohmann::json germ_to_json(const PolyGerm& f);

PolyGerm parse_germ(std::string_view text);
// Canonical form: terms in lexicographic exponent order, zero terms dropped.
std::string serialize_germ(const PolyGerm& f);

PolyGerm load_germ_file(const std::string& path);

// Human-readable rendering, e.g. "x1^2 - 3*x1*x2".
std::string format_polynomial(const Polynomial& p);
std::string format_germ(const PolyGerm& f);

}  // namespace kbilip
