#ifndef DIRFILT_SPECFN_HPP
#define DIRFILT_SPECFN_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dirfilt::specfn {

/// Natural log of the gamma function, x > 0.
/// Relative error <= 1e-12 over [1e-3, 1e7].
double log_gamma(double x);

/// Digamma Psi(x) = d/dx ln Gamma(x), x > 0, exact mode.
/// Upward recurrence to x >= 6, then the asymptotic expansion through
/// the x^-12 term. Relative error <= 1e-10 over [1e-3, 1e6].
double digamma(double x);

/// Evaluation mode for digamma: exact, or a piecewise-linear lookup
/// table on a log-spaced grid (queries outside the table fall back to
/// exact evaluation).
struct SpecFnMode {
  enum class Kind { Exact, LookupTable };

  Kind kind = Kind::Exact;
  double table_min = 1e-3;
  double table_max = 1e4;
  int table_points = 4096;

  static SpecFnMode exact() { return SpecFnMode{}; }
  static SpecFnMode lookup(double min = 1e-3, double max = 1e4, int points = 4096) {
    return SpecFnMode{Kind::LookupTable, min, max, points};
  }
};

/// Digamma evaluator bound to a SpecFnMode. Immutable after
/// construction, safe to share across threads.
class SpecFn {
 public:
  explicit SpecFn(SpecFnMode mode = SpecFnMode::exact());

  double digamma(double x) const;

  /// Absolute error bound of the table interpolation at x. Derived
  /// from the curvature of Psi(e^u) in log coordinates:
  ///   |d^2/du^2 Psi(e^u)| <= 1 + 1/x,
  /// so a linear interpolant on a log grid of step h is within
  ///   h^2/8 * (1 + 1/x_cell_min)
  /// of the exact value. Returns 0 where evaluation is exact (exact
  /// mode, or queries outside the table range).
  double digamma_error_bound(double x) const;

  const SpecFnMode& mode() const { return mode_; }

  /// Shared exact-mode instance.
  static const SpecFn& exact_instance();

 private:
  SpecFnMode mode_;
  std::vector<double> table_;
  double log_min_ = 0.0;
  double log_step_ = 0.0;
};

/// Bracket-expansion failure: the target value is not attainable
/// within the configured exponent range.
class NoConvergence : public std::runtime_error {
 public:
  explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct InvertOptions {
  double bracket_lo = 1e-8;
  double bracket_hi = 1.0;
  double max_exponent = 300.0;  // bracket may expand within [10^-max, 10^max]
  int max_iters = 200;
  double x_rtol = 1e-9;  // relative width at which bisection may stop
};

/// Inverts a strictly increasing f on (0, inf): returns x with
/// |f(x) - y| <= tol. Expands the initial bracket geometrically until
/// it straddles y, then bisects; bisection continues until the value
/// tolerance and the relative-width tolerance are both met (or the
/// interval collapses to machine resolution). Deterministic for fixed
/// inputs. Throws NoConvergence if expansion exceeds the exponent
/// bound, which signals that y is outside the attainable range.
template <class F>
double invert_monotone(F&& f, double y, double tol = 1e-10, const InvertOptions& opts = {}) {
  if (!(tol > 0.0)) throw std::invalid_argument("invert_monotone: tol must be positive");
  double lo = opts.bracket_lo;
  double hi = opts.bracket_hi;
  const double hi_limit = std::pow(10.0, opts.max_exponent);
  const double lo_limit = std::pow(10.0, -opts.max_exponent);

  double f_hi = f(hi);
  while (f_hi < y) {
    hi *= 2.0;
    if (hi > hi_limit)
      throw NoConvergence("invert_monotone: upper bracket exceeded 1e" +
                          std::to_string(static_cast<int>(opts.max_exponent)));
    f_hi = f(hi);
  }
  double f_lo = f(lo);
  while (f_lo > y) {
    lo *= 0.5;
    if (lo < lo_limit)
      throw NoConvergence("invert_monotone: lower bracket fell below 1e-" +
                          std::to_string(static_cast<int>(opts.max_exponent)));
    f_lo = f(lo);
  }

  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < opts.max_iters; ++i) {
    mid = 0.5 * (lo + hi);
    const double width = hi - lo;
    if (width <= 4.0 * std::numeric_limits<double>::epsilon() * mid) break;
    const double fm = f(mid);
    if (std::abs(fm - y) <= tol && width <= opts.x_rtol * mid) break;
    if (fm < y)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

}  // namespace dirfilt::specfn

#endif  // DIRFILT_SPECFN_HPP
