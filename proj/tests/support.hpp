#pragma once

#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "kbilip/germ.hpp"
#include "kbilip/sampling.hpp"

namespace testing {

using Term = std::pair<kbilip::Exponent, double>;

inline kbilip::Polynomial poly(int n, std::initializer_list<Term> terms) {
  kbilip::Polynomial p(n);
  for (const auto& [e, c] : terms) p.add_term(e, c);
  return p;
}

// Scalar germ; k defaults to the degree.
inline kbilip::PolyGerm scalar(int n, std::initializer_list<Term> terms, int k = 0) {
  auto p = poly(n, terms);
  return k > 0 ? kbilip::PolyGerm::scalar(p, k) : kbilip::PolyGerm::scalar(p);
}

inline kbilip::PolyGerm vec(int n, int k, std::vector<kbilip::Polynomial> comps) {
  const int p = static_cast<int>(comps.size());
  return kbilip::PolyGerm(n, p, k, std::move(comps));
}

// Random polynomial of degree <= k with f(0) = 0 and a nonzero top term.
inline kbilip::Polynomial random_poly(int n, int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::bernoulli_distribution keep(0.6);
  kbilip::Polynomial p(n);
  kbilip::Exponent e(n, 0);
  auto rec = [&](auto&& self, int var, int left) -> void {
    if (var == n) {
      int d = 0;
      for (int a : e) d += a;
      if (d >= 1 && keep(rng)) p.add_term(e, coef(rng));
      return;
    }
    for (int a = 0; a <= left; ++a) {
      e[var] = a;
      self(self, var + 1, left - a);
    }
    e[var] = 0;
  };
  rec(rec, 0, k);
  if (p.is_zero()) {
    kbilip::Exponent lin(n, 0);
    lin[0] = 1;
    p.add_term(lin, 1.0);
  }
  return p;
}

inline kbilip::SampleScheme small_scheme(int radii = 8, int dirs = 32, std::uint64_t seed = 0) {
  kbilip::SampleScheme s;
  s.num_radii = radii;
  s.dirs_per_radius = dirs;
  s.seed = seed;
  return s;
}

}  // namespace testing
