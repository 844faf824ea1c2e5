#include "kbilip/germ.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <fstream>
#include <sstream>

namespace kbilip {

using nlohmann::json;

PolyGerm::PolyGerm(int n, int p, int k, std::vector<Polynomial> components)
    : n_(n), p_(p), k_(k), components_(std::move(components)) {
  if (n < 1) throw GermError(GermError::Kind::Malformed, "n", "must be positive");
  if (p < 1) throw GermError(GermError::Kind::Malformed, "p", "must be positive");
  if (k < 1) throw GermError(GermError::Kind::Malformed, "k", "must be positive");
  if (static_cast<int>(components_.size()) != p)
    throw GermError(GermError::Kind::Malformed, "components",
                    "expected " + std::to_string(p) + " components, got " +
                        std::to_string(components_.size()));
  for (int i = 0; i < p; ++i) {
    const auto loc = "components[" + std::to_string(i) + "]";
    const Polynomial& c = components_[i];
    if (c.num_vars() != n)
      throw GermError(GermError::Kind::DimensionMismatch, loc,
                      "component has " + std::to_string(c.num_vars()) +
                          " variables, expected " + std::to_string(n));
    if (c.constant_term() != 0.0)
      throw GermError(GermError::Kind::GermCondition, loc,
                      "nonzero constant term (germ must vanish at the origin)");
    if (c.degree() > k)
      throw GermError(GermError::Kind::DegreeBound, loc,
                      "degree " + std::to_string(c.degree()) + " exceeds bound " +
                          std::to_string(k));
  }
}

PolyGerm PolyGerm::scalar(Polynomial f, int k) {
  int n = f.num_vars();
  return PolyGerm(n, 1, k, {std::move(f)});
}

PolyGerm PolyGerm::zero(int n, int p, int k) {
  return PolyGerm(n, p, k, std::vector<Polynomial>(p, Polynomial(n)));
}

PolyGerm PolyGerm::scalar_component(int i) const {
  return PolyGerm(n_, 1, k_, {components_.at(i)});
}

void PolyGerm::eval_into(std::span<const double> x, std::span<double> out) const {
  if (static_cast<int>(x.size()) != n_)
    throw GermError(GermError::Kind::DimensionMismatch, "x",
                    "point has dimension " + std::to_string(x.size()) +
                        ", germ source dimension is " + std::to_string(n_));
  for (int i = 0; i < p_; ++i) out[i] = components_[i].eval(x);
}

std::vector<double> PolyGerm::eval(std::span<const double> x) const {
  std::vector<double> out(p_);
  eval_into(x, out);
  return out;
}

double PolyGerm::eval_scalar(std::span<const double> x) const {
  if (p_ != 1)
    throw GermError(GermError::Kind::DimensionMismatch, "p",
                    "scalar evaluation of a germ with p = " + std::to_string(p_));
  if (static_cast<int>(x.size()) != n_)
    throw GermError(GermError::Kind::DimensionMismatch, "x", "dimension mismatch");
  return components_[0].eval(x);
}

PolyGerm PolyGerm::scaled(double c) const {
  std::vector<Polynomial> comps;
  for (const auto& comp : components_) comps.push_back(comp.scaled(c));
  return PolyGerm(n_, p_, k_, std::move(comps));
}

PolyGerm PolyGerm::compose_linear(const Eigen::MatrixXd& a) const {
  std::vector<Polynomial> comps;
  for (const auto& comp : components_) comps.push_back(comp.compose_linear(a));
  return PolyGerm(n_, p_, k_, std::move(comps));
}

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  if (entries_.empty())
    throw GermError(GermError::Kind::Malformed, "q", "multi index must be nonempty");
  for (int q : entries_)
    if (q < 1) throw GermError(GermError::Kind::Malformed, "q", "entries must be >= 1");
}

int MultiIndex::total() const noexcept {
  return std::accumulate(entries_.begin(), entries_.end(), 0);
}

bool MultiIndex::all_scalar() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(), [](int q) { return q == 1; });
}

namespace {

int require_int(const json& doc, const char* key) {
  if (!doc.contains(key))
    throw GermError(GermError::Kind::Malformed, key, "missing field");
  const json& v = doc.at(key);
  if (!v.is_number_integer())
    throw GermError(GermError::Kind::Malformed, key, "expected an integer");
  return v.get<int>();
}

}  // namespace

PolyGerm germ_from_json(const json& doc) {
  if (!doc.is_object())
    throw GermError(GermError::Kind::Malformed, "$", "germ document must be an object");
  const int n = require_int(doc, "n");
  const int p = require_int(doc, "p");
  const int k = require_int(doc, "k");
  if (n < 1 || p < 1 || k < 1)
    throw GermError(GermError::Kind::Malformed, "$", "n, p, k must be positive");
  if (!doc.contains("components") || !doc.at("components").is_array())
    throw GermError(GermError::Kind::Malformed, "components", "expected an array");
  const json& comps = doc.at("components");
  if (static_cast<int>(comps.size()) != p)
    throw GermError(GermError::Kind::Malformed, "components",
                    "expected " + std::to_string(p) + " term lists, got " +
                        std::to_string(comps.size()));

  std::vector<Polynomial> polys;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto cloc = "components[" + std::to_string(i) + "]";
    if (!comps[i].is_array())
      throw GermError(GermError::Kind::Malformed, cloc, "expected an array of terms");
    Polynomial poly(n);
    for (std::size_t t = 0; t < comps[i].size(); ++t) {
      const auto tloc = cloc + "[" + std::to_string(t) + "]";
      const json& term = comps[i][t];
      if (!term.is_object() || !term.contains("exp") || !term.contains("coef"))
        throw GermError(GermError::Kind::Malformed, tloc,
                        "term must be an object with \"exp\" and \"coef\"");
      const json& exp = term.at("exp");
      if (!exp.is_array())
        throw GermError(GermError::Kind::Malformed, tloc + ".exp", "expected an array");
      if (static_cast<int>(exp.size()) != n)
        throw GermError(GermError::Kind::Malformed, tloc + ".exp",
                        "length " + std::to_string(exp.size()) + ", expected " +
                            std::to_string(n));
      Exponent e;
      for (const json& v : exp) {
        if (!v.is_number_integer() || v.get<long long>() < 0)
          throw GermError(GermError::Kind::Malformed, tloc + ".exp",
                          "exponents must be nonnegative integers");
        e.push_back(v.get<int>());
      }
      const json& coef = term.at("coef");
      if (!coef.is_number())
        throw GermError(GermError::Kind::Malformed, tloc + ".coef", "expected a number");
      const double c = coef.get<double>();
      if (!std::isfinite(c))
        throw GermError(GermError::Kind::Malformed, tloc + ".coef", "must be finite");
      if (c == 0.0) continue;
      if (total_degree(e) == 0)
        throw GermError(GermError::Kind::GermCondition, tloc,
                        "nonzero constant term (germ must vanish at the origin)");
      if (total_degree(e) > k)
        throw GermError(GermError::Kind::DegreeBound, tloc,
                        "total degree " + std::to_string(total_degree(e)) +
                            " exceeds k = " + std::to_string(k));
      poly.add_term(e, c);
    }
    polys.push_back(std::move(poly));
  }
  return PolyGerm(n, p, k, std::move(polys));
}

json germ_to_json(const PolyGerm& f) {
  json comps = json::array();
  for (const auto& c : f.components()) {
    json terms = json::array();
    for (const auto& [exp, coef] : c.terms()) terms.push_back({{"exp", exp}, {"coef", coef}});
    comps.push_back(std::move(terms));
  }
  return {{"n", f.n()}, {"p", f.p()}, {"k", f.k()}, {"components", std::move(comps)}};
}

PolyGerm parse_germ(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded())
    throw GermError(GermError::Kind::Malformed, "$", "not valid JSON");
  return germ_from_json(doc);
}

std::string serialize_germ(const PolyGerm& f) { return germ_to_json(f).dump(); }

PolyGerm load_germ_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GermError(GermError::Kind::Malformed, path, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_germ(buf.str());
  } catch (const GermError& e) {
    throw GermError(e.kind(), path + ":" + e.location(), e.message());
  }
}

std::string format_polynomial(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::ostringstream out;
  out.precision(6);
  bool first = true;
  // Highest degree first reads more naturally.
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [exp, coef] = *it;
    double mag = std::abs(coef);
    if (first) {
      if (coef < 0) out << "-";
    } else {
      out << (coef < 0 ? " - " : " + ");
    }
    first = false;
    bool has_var = total_degree(exp) > 0;
    if (!has_var || mag != 1.0) {
      out << mag;
      if (has_var) out << "*";
    }
    bool first_var = true;
    for (std::size_t i = 0; i < exp.size(); ++i) {
      if (exp[i] == 0) continue;
      if (!first_var) out << "*";
      first_var = false;
      out << "x" << (i + 1);
      if (exp[i] > 1) out << "^" << exp[i];
    }
  }
  return out.str();
}

std::string format_germ(const PolyGerm& f) {
  std::string s = "(";
  for (int i = 0; i < f.p(); ++i) {
    if (i) s += ", ";
    s += format_polynomial(f.component(i));
  }
  return s + ")";
}

}  // namespace kbilip
