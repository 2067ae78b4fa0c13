#include "dirfilt/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dirfilt {

using specfn::SpecFn;
using specfn::log_gamma;

ProbabilityVector ProbabilityVector::checked(std::vector<double> values) {
  if (values.size() < 2)
    throw std::invalid_argument("ProbabilityVector: need at least 2 classes");
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !(v <= 1.0))
      throw std::invalid_argument("ProbabilityVector: entry outside [0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("ProbabilityVector: entries sum to " + std::to_string(sum));
  return ProbabilityVector{std::move(values)};
}

ProbabilityVector ProbabilityVector::clamped(double eps) const {
  const double k = static_cast<double>(p.size());
  if (!(eps > 0.0) || !(k * eps < 1.0))
    throw std::invalid_argument("ProbabilityVector::clamped: need 0 < K*eps < 1");
  double sum = 0.0;
  double min = std::numeric_limits<double>::infinity();
  for (double v : p) {
    sum += v;
    min = std::min(min, v);
  }
  if (min >= eps && std::abs(sum - 1.0) <= 1e-12) return *this;  // idempotent

  // The floor is widened so entries still clear eps after renormalization.
  const double floor = eps * (1.0 + 1e-6) / (1.0 - k * eps);
  std::vector<double> q(p.size());
  sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    q[i] = std::max(p[i], floor);
    sum += q[i];
  }
  for (double& v : q) v /= sum;
  return ProbabilityVector{std::move(q)};
}

bool ProbabilityVector::strictly_positive() const {
  return std::all_of(p.begin(), p.end(), [](double v) { return v > 0.0; });
}

int ProbabilityVector::argmax() const {
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

DirichletParams DirichletParams::checked(std::vector<double> values) {
  if (values.size() < 2)
    throw std::invalid_argument("DirichletParams: need at least 2 classes");
  for (double v : values)
    if (!(v > 0.0)) throw std::invalid_argument("DirichletParams: entries must be positive");
  return DirichletParams{std::move(values)};
}

DirichletParams DirichletParams::ones(std::size_t k) {
  if (k < 2) throw std::invalid_argument("DirichletParams: need at least 2 classes");
  return DirichletParams{std::vector<double>(k, 1.0)};
}

double DirichletParams::sum() const {
  return std::accumulate(alpha.begin(), alpha.end(), 0.0);
}

double log_A(const DirichletParams& alpha) {
  double total = 0.0;
  double lg_sum = 0.0;
  for (double a : alpha.alpha) {
    if (!(a > 0.0)) throw std::domain_error("log_A: alpha entries must be positive");
    total += a;
    lg_sum += log_gamma(a);
  }
  return log_gamma(total) - lg_sum;
}

double dirichlet_log_pdf(const ProbabilityVector& s, const DirichletParams& alpha) {
  if (s.size() != alpha.size())
    throw std::invalid_argument("dirichlet_log_pdf: dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s.p[i] > 0.0))
      throw std::domain_error("dirichlet_log_pdf: zero entry in s; clamp first");
    dot += (alpha.alpha[i] - 1.0) * std::log(s.p[i]);
  }
  return log_A(alpha) + dot;
}

ProbabilityVector dirichlet_mode(const DirichletParams& alpha) {
  const double total = alpha.sum();
  const double k = static_cast<double>(alpha.size());
  const bool interior =
      std::all_of(alpha.alpha.begin(), alpha.alpha.end(), [](double a) { return a > 1.0; });
  std::vector<double> p(alpha.size());
  if (interior) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = (alpha.alpha[i] - 1.0) / (total - k);
  } else {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = alpha.alpha[i] / total;
  }
  return ProbabilityVector{std::move(p)};
}

double cp_log_density_unnormalized(const DirichletParams& alpha,
                                   const ConjugatePriorParams& prior) {
  if (alpha.size() != prior.nu.size())
    throw std::invalid_argument("cp_log_density_unnormalized: dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) dot += alpha.alpha[i] * prior.nu[i];
  return prior.eta * log_A(alpha) - dot;
}

std::vector<double> nu_from_mode(const DirichletParams& alpha_star, double eta,
                                 const SpecFn& fn) {
  const double psi_sum = fn.digamma(alpha_star.sum());
  std::vector<double> nu(alpha_star.size());
  for (std::size_t i = 0; i < nu.size(); ++i)
    nu[i] = eta * (psi_sum - fn.digamma(alpha_star.alpha[i]));
  return nu;
}

DirichletParams cp_mode(const ConjugatePriorParams& prior, const CpModeOptions& opts,
                        const SpecFn& fn) {
  if (!(prior.eta > 0.0)) throw std::domain_error("cp_mode: mode undefined for eta = 0");
  const std::size_t k = prior.nu.size();
  if (k < 2) throw std::invalid_argument("cp_mode: need at least 2 classes");
  for (double v : prior.nu)
    if (!(v > 0.0))
      throw std::domain_error(
          "cp_mode: mode condition requires every nu_j > 0 (Psi(alpha_j) < Psi(sum alpha))");

  auto psi = [&fn](double x) { return fn.digamma(x); };
  std::vector<double> alpha(k, 1.0);
  double residual = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    const double psi_total = fn.digamma(total);
    std::vector<double> next(k);
    for (std::size_t j = 0; j < k; ++j) {
      const double target = psi_total - prior.nu[j] / prior.eta;
      const double fp = specfn::invert_monotone(psi, target, opts.invert_tol);
      next[j] = (1.0 - opts.damping) * alpha[j] + opts.damping * fp;
    }
    alpha = std::move(next);

    const double new_total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    const double psi_new_total = fn.digamma(new_total);
    residual = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double r = fn.digamma(alpha[j]) - psi_new_total + prior.nu[j] / prior.eta;
      residual = std::max(residual, std::abs(r));
    }
    if (residual <= opts.tol) return DirichletParams{std::move(alpha)};
  }
  throw CpModeError("cp_mode: no convergence after " + std::to_string(opts.max_iters) +
                        " iterations; residual = " + std::to_string(residual),
                    residual);
}

double posterior_objective(const DirichletParams& alpha, const ProbabilityVector& s,
                           const ConjugatePriorParams& prior, double beta, double gamma) {
  const std::size_t k = alpha.size();
  if (s.size() != k || prior.nu.size() != k)
    throw std::invalid_argument("posterior_objective: dimension mismatch");
  if (!(beta >= 0.0) || !(beta <= 1.0))
    throw std::invalid_argument("posterior_objective: beta outside [0, 1]");
  if (!(gamma > 0.0) || !(gamma <= 1.0))
    throw std::invalid_argument("posterior_objective: gamma outside (0, 1]");

  const double kd = static_cast<double>(k);
  const double total = alpha.sum();
  double obs = log_gamma(kd * (1.0 - beta) + beta * total);
  double dot_log_s = 0.0;
  double log_a = log_gamma(total);
  double dot_nu = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    obs -= log_gamma(beta * alpha.alpha[i] + (1.0 - beta));
    if (!(s.p[i] > 0.0))
      throw std::domain_error("posterior_objective: zero entry in s; clamp first");
    dot_log_s += alpha.alpha[i] * std::log(s.p[i]);
    log_a -= log_gamma(alpha.alpha[i]);
    dot_nu += alpha.alpha[i] * prior.nu[i];
  }
  return obs + beta * dot_log_s + gamma * prior.eta * log_a - gamma * dot_nu;
}

}  // namespace dirfilt
