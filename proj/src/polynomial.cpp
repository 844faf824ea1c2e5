#include "kbilip/polynomial.hpp"

#include <numeric>

namespace kbilip {

const char* to_string(GermError::Kind kind) {
  switch (kind) {
    case GermError::Kind::Malformed: return "malformed";
    case GermError::Kind::GermCondition: return "germ_condition";
    case GermError::Kind::DegreeBound: return "degree_bound";
    case GermError::Kind::DimensionMismatch: return "dimension_mismatch";
  }
  return "unknown";
}

int total_degree(const Exponent& exp) noexcept {
  return std::accumulate(exp.begin(), exp.end(), 0);
}

namespace {

double ipow(double base, int e) {
  double result = 1.0;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

}  // namespace

Polynomial::Polynomial(int num_vars) : num_vars_(num_vars) {
  if (num_vars < 1)
    throw GermError(GermError::Kind::Malformed, "num_vars", "must be positive");
}

Polynomial Polynomial::constant(int num_vars, double c) {
  Polynomial p(num_vars);
  p.add_term(Exponent(num_vars, 0), c);
  return p;
}

Polynomial Polynomial::variable(int num_vars, int index) {
  if (index < 0 || index >= num_vars)
    throw GermError(GermError::Kind::DimensionMismatch, "index",
                    "variable index out of range");
  Polynomial p(num_vars);
  Exponent e(num_vars, 0);
  e[index] = 1;
  p.add_term(e, 1.0);
  return p;
}

Polynomial Polynomial::monomial(Exponent exp, double coef) {
  Polynomial p(static_cast<int>(exp.size()));
  p.add_term(exp, coef);
  return p;
}

void Polynomial::add_term(const Exponent& exp, double coef) {
  if (static_cast<int>(exp.size()) != num_vars_)
    throw GermError(GermError::Kind::DimensionMismatch, "exp",
                    "exponent vector has length " + std::to_string(exp.size()) +
                        ", expected " + std::to_string(num_vars_));
  for (int e : exp)
    if (e < 0)
      throw GermError(GermError::Kind::Malformed, "exp", "negative exponent");
  if (coef == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(exp, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0.0) terms_.erase(it);
  }
}

int Polynomial::degree() const noexcept {
  int d = -1;
  for (const auto& [exp, coef] : terms_) d = std::max(d, total_degree(exp));
  return d;
}

double Polynomial::constant_term() const noexcept {
  auto it = terms_.find(Exponent(num_vars_, 0));
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::check_dim(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != num_vars_)
    throw GermError(GermError::Kind::DimensionMismatch, "x",
                    "point has dimension " + std::to_string(x.size()) +
                        ", polynomial has " + std::to_string(num_vars_) +
                        " variables");
}

double Polynomial::eval(std::span<const double> x) const {
  check_dim(x);
  double sum = 0.0;
  for (const auto& [exp, coef] : terms_) {
    double term = coef;
    for (int i = 0; i < num_vars_; ++i)
      if (exp[i] != 0) term *= ipow(x[i], exp[i]);
    sum += term;
  }
  return sum;
}

std::vector<double> Polynomial::gradient(std::span<const double> x) const {
  check_dim(x);
  std::vector<double> grad(num_vars_, 0.0);
  for (const auto& [exp, coef] : terms_) {
    for (int v = 0; v < num_vars_; ++v) {
      if (exp[v] == 0) continue;
      double term = coef * exp[v];
      for (int i = 0; i < num_vars_; ++i) {
        int e = (i == v) ? exp[i] - 1 : exp[i];
        if (e != 0) term *= ipow(x[i], e);
      }
      grad[v] += term;
    }
  }
  return grad;
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= num_vars_)
    throw GermError(GermError::Kind::DimensionMismatch, "var",
                    "variable index out of range");
  Polynomial d(num_vars_);
  for (const auto& [exp, coef] : terms_) {
    if (exp[var] == 0) continue;
    Exponent e = exp;
    e[var] -= 1;
    d.add_term(e, coef * exp[var]);
  }
  return d;
}

Polynomial Polynomial::scaled(double c) const {
  Polynomial out(num_vars_);
  for (const auto& [exp, coef] : terms_) out.add_term(exp, coef * c);
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  if (other.num_vars_ != num_vars_)
    throw GermError(GermError::Kind::DimensionMismatch, "", "variable count mismatch");
  Polynomial out = *this;
  for (const auto& [exp, coef] : other.terms_) out.add_term(exp, coef);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (other.num_vars_ != num_vars_)
    throw GermError(GermError::Kind::DimensionMismatch, "", "variable count mismatch");
  Polynomial out(num_vars_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : other.terms_) {
      Exponent e(num_vars_);
      for (int i = 0; i < num_vars_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Polynomial Polynomial::pow(int e) const {
  Polynomial result = constant(num_vars_, 1.0);
  for (int i = 0; i < e; ++i) result = result * *this;
  return result;
}

Polynomial Polynomial::compose_linear(const Eigen::MatrixXd& a) const {
  if (a.rows() != num_vars_ || a.cols() != num_vars_)
    throw GermError(GermError::Kind::DimensionMismatch, "matrix",
                    "linear substitution must be square of size num_vars");
  // (A x)_i as linear polynomials.
  std::vector<Polynomial> rows;
  rows.reserve(num_vars_);
  for (int i = 0; i < num_vars_; ++i) {
    Polynomial row(num_vars_);
    for (int j = 0; j < num_vars_; ++j) {
      Exponent e(num_vars_, 0);
      e[j] = 1;
      row.add_term(e, a(i, j));
    }
    rows.push_back(std::move(row));
  }
  Polynomial out(num_vars_);
  for (const auto& [exp, coef] : terms_) {
    Polynomial term = constant(num_vars_, coef);
    for (int i = 0; i < num_vars_; ++i)
      if (exp[i] != 0) term = term * rows[i].pow(exp[i]);
    out = out + term;
  }
  return out;
}

}  // namespace kbilip
