#include "dirfilt/specfn.hpp"

#include <cmath>
#include <stdexcept>

namespace dirfilt::specfn {

#if defined(__GLIBC__)
extern "C" double lgamma_r(double, int*);
#endif

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
#if defined(__GLIBC__)
  // lgamma writes the global signgam; the _r variant keeps this reentrant.
  int sign = 0;
  return lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

namespace {

// Asymptotic expansion of Psi(x) for large x, through the x^-12 term:
//   Psi(x) ~ ln x - 1/(2x) - 1/(12x^2) + 1/(120x^4) - 1/(252x^6)
//            + 1/(240x^8) - 1/(132x^10) + 691/(32760x^12)
// With the recurrence shift to x >= 6 the first omitted term is below
// 1.1e-12 absolute, well inside the 1e-10 contract.
constexpr double kAsym[6] = {
    -1.0 / 12.0, 1.0 / 120.0,  -1.0 / 252.0,
    1.0 / 240.0, -1.0 / 132.0, 691.0 / 32760.0,
};

double digamma_shifted(double x) {
  // x >= 6 here.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  double p = inv2;
  for (int k = 0; k < 6; ++k) {
    series += kAsym[k] * p;
    p *= inv2;
  }
  return std::log(x) - 0.5 * inv + series;
}

}  // namespace

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
  double shift = 0.0;
  while (x < 6.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  return digamma_shifted(x) + shift;
}

SpecFn::SpecFn(SpecFnMode mode) : mode_(mode) {
  if (mode_.kind == SpecFnMode::Kind::Exact) return;
  if (!(mode_.table_min > 0.0) || !(mode_.table_min < mode_.table_max))
    throw std::invalid_argument("SpecFn: table range must satisfy 0 < min < max");
  if (mode_.table_points < 2)
    throw std::invalid_argument("SpecFn: table needs at least 2 points");
  log_min_ = std::log(mode_.table_min);
  log_step_ = (std::log(mode_.table_max) - log_min_) / (mode_.table_points - 1);
  table_.resize(static_cast<std::size_t>(mode_.table_points));
  for (int i = 0; i < mode_.table_points; ++i)
    table_[static_cast<std::size_t>(i)] = dirfilt::specfn::digamma(std::exp(log_min_ + i * log_step_));
}

double SpecFn::digamma(double x) const {
  if (mode_.kind == SpecFnMode::Kind::Exact || x < mode_.table_min || x > mode_.table_max)
    return dirfilt::specfn::digamma(x);
  const double u = (std::log(x) - log_min_) / log_step_;
  auto i = static_cast<std::size_t>(u);
  if (i >= table_.size() - 1) i = table_.size() - 2;
  const double frac = u - static_cast<double>(i);
  return table_[i] + frac * (table_[i + 1] - table_[i]);
}

double SpecFn::digamma_error_bound(double x) const {
  if (mode_.kind == SpecFnMode::Kind::Exact || x < mode_.table_min || x > mode_.table_max)
    return 0.0;
  const double u = (std::log(x) - log_min_) / log_step_;
  auto i = static_cast<std::size_t>(u);
  if (i >= table_.size() - 1) i = table_.size() - 2;
  const double cell_min = std::exp(log_min_ + static_cast<double>(i) * log_step_);
  return log_step_ * log_step_ / 8.0 * (1.0 + 1.0 / cell_min);
}

const SpecFn& SpecFn::exact_instance() {
  static const SpecFn instance{SpecFnMode::exact()};
  return instance;
}

}  // namespace dirfilt::specfn
