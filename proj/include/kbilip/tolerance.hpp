#pragma once

#include <json.hpp>

namespace kbilip {

struct ToleranceConfig {
  // Zero threshold at radius r for a degree-<=k germ: eps_zero_base * r^k.
  double eps_zero_base = 1e-10;
  // Contact ratios outside [ratio_floor, 1/ratio_floor] are not certified.
  double ratio_floor = 1e-6;
  double check_tol = 1e-9;
  // Samples closer than this (relative) to a case boundary are excluded from
  // derivative-based checks.
  double boundary_margin = 1e-6;
  // Bi-Lipschitz estimates above this are treated as unbounded.
  double lipschitz_cap = 1e6;
  // Allowed growth of the finite-difference partial bound from the outer to
  // the inner radius shells.
  double partial_growth = 1.1;

  void validate() const;
  double eps_zero(double radius, int k) const;

  bool operator==(const ToleranceConfig&) const = default;
};

nlohmann::json tolerance_to_json(const ToleranceConfig& t);
ToleranceConfig tolerance_from_json(const nlohmann::json& doc, ToleranceConfig defaults = {});

}  // namespace kbilip
