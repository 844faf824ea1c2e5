#include "kbilip/homeo.hpp"

#include <cmath>

#include "kbilip/sampling.hpp"

namespace kbilip {

const char* to_string(SignBranch s) { return s == SignBranch::Plus ? "plus" : "minus"; }

SignBranch sign_branch_from_int(int s) {
  if (s == 1) return SignBranch::Plus;
  if (s == -1) return SignBranch::Minus;
  throw std::invalid_argument("sign branch must be +1 or -1");
}

const char* to_string(FiberCase c) {
  switch (c) {
    case FiberCase::ZeroSection: return "zero_section";
    case FiberCase::Degenerate: return "f_zero";
    case FiberCase::Inner: return "inner";
    case FiberCase::OuterSame: return "outer_same_sign";
    case FiberCase::OuterOpposite: return "outer_opposite_sign";
  }
  return "unknown";
}

namespace {

// F = f(x), G = g(h(x)), s = +-1.
double fiber_formula(FiberCase c, double F, double G, double y, double s) {
  switch (c) {
    case FiberCase::ZeroSection: return 0.0;
    case FiberCase::Degenerate: return s * y;
    case FiberCase::Inner: return G * y / F;
    case FiberCase::OuterSame: return s * y - s * F + G;
    case FiberCase::OuterOpposite: return s * y + s * F - G;
  }
  return 0.0;
}

FiberCase fiber_case(double F, double y, double eps) {
  if (y == 0.0) return FiberCase::ZeroSection;
  if (std::abs(F) <= eps) return FiberCase::Degenerate;
  if (std::abs(y) <= std::abs(F)) return FiberCase::Inner;
  return (y > 0) == (F > 0) ? FiberCase::OuterSame : FiberCase::OuterOpposite;
}

}  // namespace

PiecewiseHomeo::PiecewiseHomeo(PolyGerm f, PolyGerm g, CoordChange h, SignBranch sign,
                               ToleranceConfig tol)
    : f_(std::move(f)),
      g_(std::move(g)),
      h_(std::move(h)),
      sign_(sign),
      tol_(tol),
      k_(std::max(f_.k(), g_.k())) {
  if (f_.p() != 1 || g_.p() != 1)
    throw SynthesisError("fiber homeomorphism needs scalar germs (p = 1)");
  if (f_.n() != g_.n() || h_.dim() != f_.n())
    throw SynthesisError("germs and coordinate change disagree on the source dimension");
  tol_.validate();
}

double PiecewiseHomeo::f_at(std::span<const double> x) const { return f_.component(0).eval(x); }

double PiecewiseHomeo::g_h_at(std::span<const double> x) const {
  thread_local std::vector<double> hx;
  hx.resize(x.size());
  h_.apply(x, hx);
  return g_.component(0).eval(hx);
}

double PiecewiseHomeo::zero_threshold(std::span<const double> x) const {
  return tol_.eps_zero(norm(x), k_);
}

FiberCase PiecewiseHomeo::select_case(std::span<const double> x, double y) const {
  return fiber_case(f_at(x), y, zero_threshold(x));
}

double PiecewiseHomeo::theta_case(std::span<const double> x, double y, FiberCase c) const {
  return fiber_formula(c, f_at(x), g_h_at(x), y, sign_value(sign_));
}

double PiecewiseHomeo::theta(std::span<const double> x, double y, FiberCase* fired) const {
  const double F = f_at(x);
  const FiberCase c = fiber_case(F, y, zero_threshold(x));
  if (fired) *fired = c;
  if (c == FiberCase::ZeroSection) return 0.0;
  if (c == FiberCase::Degenerate) return sign_value(sign_) * y;
  return fiber_formula(c, F, g_h_at(x), y, sign_value(sign_));
}

PiecewiseHomeo::Value PiecewiseHomeo::eval(std::span<const double> x, double y) const {
  Value v;
  v.x = h_.apply(x);
  v.y = theta(x, y, &v.fiber_case);
  return v;
}

PiecewiseHomeo::Value PiecewiseHomeo::eval_inverse(std::span<const double> u, double v) const {
  Value out;
  out.x = h_.apply_inverse(u);
  const double F = g_.component(0).eval(u);
  const FiberCase c = fiber_case(F, v, tol_.eps_zero(norm(u), k_));
  out.fiber_case = c;
  if (c == FiberCase::ZeroSection || c == FiberCase::Degenerate) {
    out.y = fiber_formula(c, F, 0.0, v, sign_value(sign_));
  } else {
    const double G = f_.component(0).eval(out.x);
    out.y = fiber_formula(c, F, G, v, sign_value(sign_));
  }
  return out;
}

PiecewiseHomeo PiecewiseHomeo::inverse() const {
  return PiecewiseHomeo(g_, f_, h_.inverse(), sign_, tol_);
}

PiecewiseHomeo synth_single(const PolyGerm& f, const PolyGerm& g, const CoordChange& h,
                            const ContactVerdict& verdict, const ToleranceConfig& tol) {
  if (!verdict.related())
    throw SynthesisError(std::string("cannot synthesize: contact verdict is ") +
                         to_string(verdict.kind) +
                         " (need f ≈ g∘h or f ≈ -g∘h)");
  const SignBranch sign =
      verdict.kind == ContactKind::Equivalent ? SignBranch::Plus : SignBranch::Minus;
  return PiecewiseHomeo(f, g, h, sign, tol);
}

MultiHomeo::MultiHomeo(CoordChange h, std::vector<PiecewiseHomeo> parts)
    : h_(std::move(h)), parts_(std::move(parts)) {
  if (parts_.empty()) throw SynthesisError("multi homeomorphism needs at least one component");
  for (const auto& part : parts_)
    if (part.n() != h_.dim()) throw SynthesisError("component source dimension mismatch");
}

MultiHomeo MultiHomeo::assemble_unchecked(CoordChange h, std::vector<PiecewiseHomeo> parts) {
  return MultiHomeo(std::move(h), std::move(parts));
}

MultiHomeo assemble_multi(std::vector<PiecewiseHomeo> parts) {
  if (parts.empty()) throw SynthesisError("assemble_multi: no components");
  const CoordChange& h = parts.front().h();
  for (std::size_t i = 1; i < parts.size(); ++i)
    if (!(parts[i].h() == h))
      throw SynthesisError("assemble_multi: component " + std::to_string(i) +
                           " uses coordinate change '" + parts[i].h().label() +
                           "' but component 0 uses '" + h.label() +
                           "'; a contact family needs one common factor");
  CoordChange common = h;
  return MultiHomeo(std::move(common), std::move(parts));
}

void MultiHomeo::eval(std::span<const double> xy, std::span<double> out) const {
  const int nn = n();
  auto x = xy.subspan(0, nn);
  h_.apply(x, out.subspan(0, nn));
  for (int i = 0; i < p(); ++i) out[nn + i] = parts_[i].theta(x, xy[nn + i]);
}

std::vector<double> MultiHomeo::eval(std::span<const double> xy) const {
  if (static_cast<int>(xy.size()) != dim())
    throw std::invalid_argument("MultiHomeo::eval: dimension mismatch");
  std::vector<double> out(dim());
  eval(xy, out);
  return out;
}

void MultiHomeo::eval_inverse(std::span<const double> uv, std::span<double> out) const {
  const int nn = n();
  auto u = uv.subspan(0, nn);
  h_.apply_inverse(u, out.subspan(0, nn));
  for (int i = 0; i < p(); ++i) out[nn + i] = parts_[i].eval_inverse(u, uv[nn + i]).y;
}

std::vector<double> MultiHomeo::eval_inverse(std::span<const double> uv) const {
  if (static_cast<int>(uv.size()) != dim())
    throw std::invalid_argument("MultiHomeo::eval_inverse: dimension mismatch");
  std::vector<double> out(dim());
  eval_inverse(uv, out);
  return out;
}

EvaluableMap as_map(const PiecewiseHomeo& H) {
  const int n = H.n();
  return {n + 1,
          [H, n](std::span<const double> in, std::span<double> out) {
            auto x = in.subspan(0, n);
            H.h().apply(x, out.subspan(0, n));
            out[n] = H.theta(x, in[n]);
          },
          [H, n](std::span<const double> in, std::span<double> out) {
            auto v = H.eval_inverse(in.subspan(0, n), in[n]);
            std::copy(v.x.begin(), v.x.end(), out.begin());
            out[n] = v.y;
          }};
}

EvaluableMap as_map(const MultiHomeo& H) {
  return {H.dim(),
          [H](std::span<const double> in, std::span<double> out) { H.eval(in, out); },
          [H](std::span<const double> in, std::span<double> out) { H.eval_inverse(in, out); }};
}

EvaluableMap as_map(const CoordChange& h) {
  return {h.dim(),
          [h](std::span<const double> in, std::span<double> out) { h.apply(in, out); },
          [h](std::span<const double> in, std::span<double> out) { h.apply_inverse(in, out); }};
}

EvaluableMap extract_common_factor(const EvaluableMap& H, const PolyGerm& f) {
  const int n = f.n();
  if (H.dim != n + f.p())
    throw std::invalid_argument("extract_common_factor: map dimension is not n + p");
  return {n, [H, f, n](std::span<const double> x, std::span<double> out) {
            std::vector<double> xy(H.dim), img(H.dim);
            std::copy(x.begin(), x.end(), xy.begin());
            f.eval_into(x, std::span<double>(xy).subspan(n));
            H.forward(xy, img);
            std::copy(img.begin(), img.begin() + n, out.begin());
          },
          {}};
}

}  // namespace kbilip
