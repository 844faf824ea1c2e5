#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kbilip {

using Exponent = std::vector<int>;

// Raised for malformed germ input. `location` names the offending part of the
// input (JSON path, argument name) so diagnostics can point at it.
class GermError : public std::runtime_error {
 public:
  enum class Kind { Malformed, GermCondition, DegreeBound, DimensionMismatch };

  GermError(Kind kind, std::string location, std::string message)
      : std::runtime_error(location.empty() ? message : location + ": " + message),
        kind_(kind),
        location_(std::move(location)),
        message_(std::move(message)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& location() const noexcept { return location_; }
  const std::string& message() const noexcept { return message_; }

 private:
  Kind kind_;
  std::string location_;
  std::string message_;
};

const char* to_string(GermError::Kind kind);

// Sparse real polynomial in a fixed number of variables. Terms are kept in
// lexicographic order of their exponent vectors and zero coefficients are
// never stored, so two equal polynomials have identical term maps.
class Polynomial {
 public:
  explicit Polynomial(int num_vars);

  static Polynomial constant(int num_vars, double c);
  static Polynomial variable(int num_vars, int index);
  static Polynomial monomial(Exponent exp, double coef);

  int num_vars() const noexcept { return num_vars_; }
  const std::map<Exponent, double>& terms() const noexcept { return terms_; }

  // Accumulates coef into the term with exponent exp.
  void add_term(const Exponent& exp, double coef);

  bool is_zero() const noexcept { return terms_.empty(); }
  // Total degree; -1 for the zero polynomial.
  int degree() const noexcept;
  double constant_term() const noexcept;

  // Term summation with integer powers; the evaluation order follows the
  // canonical term order, so results are reproducible bit-for-bit.
  double eval(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;
  Polynomial derivative(int var) const;

  // x -> p(A x) for a square matrix A of size num_vars.
  Polynomial compose_linear(const Eigen::MatrixXd& a) const;

  Polynomial scaled(double c) const;
  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial pow(int e) const;

  bool operator==(const Polynomial& other) const = default;

 private:
  void check_dim(std::span<const double> x) const;

  int num_vars_;
  std::map<Exponent, double> terms_;
};

int total_degree(const Exponent& exp) noexcept;

}  // namespace kbilip
