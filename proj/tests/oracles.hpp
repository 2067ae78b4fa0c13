// Test-only reference implementations, kept independent of the library
// code paths they check: long-double recurrence + asymptotic series for
// the special functions, a nested-grid maximizer, and central finite
// differences.

#ifndef DIRFILT_TESTS_ORACLES_HPP
#define DIRFILT_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace oracles {

// Psi(x) via upward recurrence to x >= 32, then the Bernoulli series
// through the x^-18 term, all in long double. First omitted term at
// x = 32 is ~1e-32; far below the 1e-10 contract being verified.
inline long double digamma(long double x) {
  long double shift = 0.0L;
  while (x < 32.0L) {
    shift -= 1.0L / x;
    x += 1.0L;
  }
  const long double inv2 = 1.0L / (x * x);
  static const long double coeff[] = {
      -1.0L / 12.0L,       1.0L / 120.0L,     -1.0L / 252.0L,
      1.0L / 240.0L,       -1.0L / 132.0L,    691.0L / 32760.0L,
      -1.0L / 12.0L,       3617.0L / 8160.0L, -43867.0L / 14364.0L,
  };
  long double series = 0.0L;
  long double p = inv2;
  for (long double c : coeff) {
    series += c * p;
    p *= inv2;
  }
  return shift + std::log(x) - 0.5L / x + series;
}

// ln Gamma(x) via recurrence to x >= 32 and the Stirling series.
inline long double log_gamma(long double x) {
  long double shift = 0.0L;
  while (x < 32.0L) {
    shift -= std::log(x);
    x += 1.0L;
  }
  static const long double coeff[] = {
      1.0L / 12.0L,      -1.0L / 360.0L,      1.0L / 1260.0L,
      -1.0L / 1680.0L,   1.0L / 1188.0L,      -691.0L / 360360.0L,
      1.0L / 156.0L,     -3617.0L / 122400.0L,
  };
  const long double half_log_two_pi = 0.91893853320467274178032973640562L;
  long double series = 0.0L;
  long double p = 1.0L / x;
  const long double inv2 = 1.0L / (x * x);
  for (long double c : coeff) {
    series += c * p;
    p *= inv2;
  }
  return shift + (x - 0.5L) * std::log(x) - x + half_log_two_pi + series;
}

// Maximizes a concave objective over (alpha_1, alpha_2) by a coarse
// log-spaced grid followed by nested refinement around the incumbent.
inline std::pair<double, double> grid_maximize_2d(
    const std::function<double(double, double)>& objective, double lo = 1e-4, double hi = 1e4,
    int coarse = 160, int rounds = 45) {
  double best1 = 1.0, best2 = 1.0, best = -1e300;
  for (int i = 0; i <= coarse; ++i) {
    for (int j = 0; j <= coarse; ++j) {
      const double a1 = lo * std::pow(hi / lo, static_cast<double>(i) / coarse);
      const double a2 = lo * std::pow(hi / lo, static_cast<double>(j) / coarse);
      const double v = objective(a1, a2);
      if (v > best) {
        best = v;
        best1 = a1;
        best2 = a2;
      }
    }
  }
  double span1 = std::pow(hi / lo, 1.0 / coarse);
  double span2 = span1;
  for (int round = 0; round < rounds; ++round) {
    const int n = 12;
    const double lo1 = best1 / span1, hi1 = best1 * span1;
    const double lo2 = best2 / span2, hi2 = best2 * span2;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double a1 = lo1 * std::pow(hi1 / lo1, static_cast<double>(i) / n);
        const double a2 = lo2 * std::pow(hi2 / lo2, static_cast<double>(j) / n);
        const double v = objective(a1, a2);
        if (v > best) {
          best = v;
          best1 = a1;
          best2 = a2;
        }
      }
    }
    span1 = std::pow(span1, 0.55);
    span2 = std::pow(span2, 0.55);
  }
  return {best1, best2};
}

// Central finite differences of a scalar function of a vector.
inline std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
    double step = 1e-5) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double up = f(x);
    x[i] = saved - step;
    const double down = f(x);
    x[i] = saved;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

}  // namespace oracles

#endif  // DIRFILT_TESTS_ORACLES_HPP
