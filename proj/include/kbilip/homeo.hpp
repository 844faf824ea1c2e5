#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "kbilip/contact.hpp"
#include "kbilip/coord_change.hpp"
#include "kbilip/evaluable_map.hpp"
#include "kbilip/germ.hpp"
#include "kbilip/tolerance.hpp"

namespace kbilip {

class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plus: f ≈ g∘h, theta(x, .) increasing. Minus: f ≈ -g∘h, theta(x, .)
// decreasing.
enum class SignBranch { Plus, Minus };

const char* to_string(SignBranch s);
SignBranch sign_branch_from_int(int s);
inline int sign_value(SignBranch s) { return s == SignBranch::Plus ? 1 : -1; }

// Which formula of the fiber map fired. With F = f(x), G = g(h(x)) and
// s = +1 (Plus) or -1 (Minus):
//   ZeroSection     y = 0                          -> 0
//   Degenerate      |F| <= eps_zero(|x|)           -> s*y
//   Inner           0 < |y| <= |F|                 -> G*y/F
//   OuterSame       |y| > |F|, sign(y) = sign(F)   -> s*y - s*F + G
//   OuterOpposite   |y| > |F|, sign(y) = -sign(F)  -> s*y + s*F - G
// Minus is the Plus construction for -G followed by y -> -y, so every case
// still sends y = F to G and the middle case is shared.
enum class FiberCase { ZeroSection, Degenerate, Inner, OuterSame, OuterOpposite };

const char* to_string(FiberCase c);

// H(x, y) = (h(x), theta(x, y)) for scalar germs f, g and a catalog change h.
class PiecewiseHomeo {
 public:
  PiecewiseHomeo(PolyGerm f, PolyGerm g, CoordChange h, SignBranch sign,
                 ToleranceConfig tol = {});

  int n() const noexcept { return f_.n(); }
  const PolyGerm& f() const noexcept { return f_; }
  const PolyGerm& g() const noexcept { return g_; }
  const CoordChange& h() const noexcept { return h_; }
  SignBranch sign() const noexcept { return sign_; }
  const ToleranceConfig& tolerances() const noexcept { return tol_; }

  struct Value {
    std::vector<double> x;
    double y;
    FiberCase fiber_case;
  };

  Value eval(std::span<const double> x, double y) const;
  // Role-swapped construction (g, f, h^-1) evaluated at (u, v).
  Value eval_inverse(std::span<const double> u, double v) const;

  double theta(std::span<const double> x, double y, FiberCase* fired = nullptr) const;
  // Formula of case `c` evaluated regardless of which case (x, y) falls in.
  double theta_case(std::span<const double> x, double y, FiberCase c) const;
  FiberCase select_case(std::span<const double> x, double y) const;

  double f_at(std::span<const double> x) const;
  double g_h_at(std::span<const double> x) const;
  double zero_threshold(std::span<const double> x) const;

  PiecewiseHomeo inverse() const;

 private:
  PolyGerm f_, g_;
  CoordChange h_;
  SignBranch sign_;
  ToleranceConfig tol_;
  int k_;
};

// Requires verdict.kind in {Equivalent, NegEquivalent} for (f, g∘h); the
// branch follows the verdict. Throws SynthesisError otherwise.
PiecewiseHomeo synth_single(const PolyGerm& f, const PolyGerm& g, const CoordChange& h,
                            const ContactVerdict& verdict, const ToleranceConfig& tol = {});

// (x, y_1..y_p) -> (h(x), theta_1(x, y_1), ..., theta_p(x, y_p)).
class MultiHomeo {
 public:
  int n() const noexcept { return h_.dim(); }
  int p() const noexcept { return static_cast<int>(parts_.size()); }
  int dim() const noexcept { return n() + p(); }
  const CoordChange& common_factor() const noexcept { return h_; }
  const std::vector<PiecewiseHomeo>& components() const noexcept { return parts_; }

  void eval(std::span<const double> xy, std::span<double> out) const;
  std::vector<double> eval(std::span<const double> xy) const;
  void eval_inverse(std::span<const double> uv, std::span<double> out) const;
  std::vector<double> eval_inverse(std::span<const double> uv) const;

  // Skips the contact-family check: parts may carry a factor other than h.
  // Only for exercising the verifier on broken maps.
  static MultiHomeo assemble_unchecked(CoordChange h, std::vector<PiecewiseHomeo> parts);

 private:
  MultiHomeo(CoordChange h, std::vector<PiecewiseHomeo> parts);
  friend MultiHomeo assemble_multi(std::vector<PiecewiseHomeo> parts);

  CoordChange h_;
  std::vector<PiecewiseHomeo> parts_;
};

// All parts must share a bit-equal common factor; throws SynthesisError if not.
MultiHomeo assemble_multi(std::vector<PiecewiseHomeo> parts);

EvaluableMap as_map(const PiecewiseHomeo& H);
EvaluableMap as_map(const MultiHomeo& H);
EvaluableMap as_map(const CoordChange& h);

// x -> first n coordinates of H(x, f(x)). Forward only.
EvaluableMap extract_common_factor(const EvaluableMap& H, const PolyGerm& f);

}  // namespace kbilip
