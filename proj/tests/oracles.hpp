// Independent reference implementations used only by the tests. They share no
// code with the library: the cubic is solved by critical-point bracketing and
// bisection in long double, and the linear steady state by a direct 2x2
// complex solve. Agreement between these and the library routes is the point.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracles {

// f(x) = 4 k^2 x^3 + 4 k d0 x^2 + (d0^2 + g0^2) x - D, evaluated by Horner in
// long double so the bisection verdicts are sharper than the values under test.
inline long double cubic_f(long double x, long double d0, long double g0, long double k,
                           long double D) {
  const long double c3 = 4.0L * k * k;
  const long double c2 = 4.0L * k * d0;
  const long double c1 = d0 * d0 + g0 * g0;
  return ((c3 * x + c2) * x + c1) * x - D;
}

inline double bisect_root(long double lo, long double hi, long double d0, long double g0,
                          long double k, long double D) {
  long double flo = cubic_f(lo, d0, g0, k, D);
  for (int i = 0; i < 400; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (mid == lo || mid == hi) break;
    const long double fmid = cubic_f(mid, d0, g0, k, D);
    if ((flo <= 0.0L) == (fmid <= 0.0L)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return static_cast<double>(0.5L * (lo + hi));
}

// All non-negative real roots, ascending. D must be >= 0.
inline std::vector<double> cubic_roots(double d0_in, double g0_in, double k_in, double D_in) {
  const long double d0 = d0_in, g0 = g0_in, k = k_in, D = D_in;
  std::vector<double> roots;
  if (D == 0.0L) return {0.0};
  if (k == 0.0L) {
    return {static_cast<double>(D / (d0 * d0 + g0 * g0))};
  }

  // Upper bracket: grow until f > 0 (the leading coefficient is positive).
  long double hi = std::max<long double>(1.0L, -d0 / (2.0L * k));
  while (cubic_f(hi, d0, g0, k, D) <= 0.0L) hi *= 2.0L;

  // Critical points of f from the stable quadratic form. No real critical
  // points means f is monotone and has exactly one root.
  const long double disc = d0 * d0 - 3.0L * g0 * g0;
  std::vector<long double> nodes = {0.0L};
  if (disc > 0.0L) {
    const long double s = std::sqrt(disc);
    long double c1 = (-2.0L * d0 - s) / (6.0L * k);
    long double c2 = (-2.0L * d0 + s) / (6.0L * k);
    if (c1 > c2) std::swap(c1, c2);
    for (long double c : {c1, c2}) {
      if (c > 0.0L && c < hi) nodes.push_back(c);
    }
  }
  nodes.push_back(hi);

  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const long double fl = cubic_f(nodes[i], d0, g0, k, D);
    const long double fr = cubic_f(nodes[i + 1], d0, g0, k, D);
    if ((fl <= 0.0L) != (fr <= 0.0L)) {
      roots.push_back(bisect_root(nodes[i], nodes[i + 1], d0, g0, k, D));
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Steady cavity and magnon amplitudes for a fixed magnon occupation x, from a
// direct 2x2 complex solve of the coupled linear conditions:
//   (i da + ka/2) A + i g M = sqrt(k1) eps
//   i g A + (i dm_eff + km/2) M = 0
struct TwoModeSolution {
  std::complex<double> a;
  std::complex<double> m;
};

inline TwoModeSolution solve_two_mode(double delta_a, double kappa_a, double delta_m_eff,
                                      double kappa_m, double g, double sqrt_k1_eps) {
  const std::complex<double> I(0.0, 1.0);
  const std::complex<double> p = I * delta_a + kappa_a / 2.0;
  const std::complex<double> q = I * delta_m_eff + kappa_m / 2.0;
  const std::complex<double> det = p * q + g * g;
  TwoModeSolution s;
  s.a = sqrt_k1_eps * q / det;
  s.m = -I * g * sqrt_k1_eps / det;
  return s;
}

}  // namespace oracles
