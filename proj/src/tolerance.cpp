#include "kbilip/tolerance.hpp"

#include <cmath>
#include <stdexcept>

namespace kbilip {

void ToleranceConfig::validate() const {
  if (!(eps_zero_base > 0) || !(ratio_floor > 0) || !(check_tol > 0) || !(boundary_margin > 0) ||
      !(lipschitz_cap > 0) || !(partial_growth > 0))
    throw std::invalid_argument("tolerances must be positive");
  if (!(ratio_floor < 1)) throw std::invalid_argument("ratio_floor must be < 1");
}

double ToleranceConfig::eps_zero(double radius, int k) const {
  return eps_zero_base * std::pow(radius, k);
}

nlohmann::json tolerance_to_json(const ToleranceConfig& t) {
  return {{"eps_zero_base", t.eps_zero_base},     {"ratio_floor", t.ratio_floor},
          {"check_tol", t.check_tol},             {"boundary_margin", t.boundary_margin},
          {"lipschitz_cap", t.lipschitz_cap},     {"partial_growth", t.partial_growth}};
}

ToleranceConfig tolerance_from_json(const nlohmann::json& doc, ToleranceConfig t) {
  if (doc.contains("eps_zero_base")) t.eps_zero_base = doc.at("eps_zero_base").get<double>();
  if (doc.contains("ratio_floor")) t.ratio_floor = doc.at("ratio_floor").get<double>();
  if (doc.contains("check_tol")) t.check_tol = doc.at("check_tol").get<double>();
  if (doc.contains("boundary_margin")) t.boundary_margin = doc.at("boundary_margin").get<double>();
  if (doc.contains("lipschitz_cap")) t.lipschitz_cap = doc.at("lipschitz_cap").get<double>();
  if (doc.contains("partial_growth")) t.partial_growth = doc.at("partial_growth").get<double>();
  t.validate();
  return t;
}

}  // namespace kbilip
