#include "dirfilt/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dirfilt {

using specfn::SpecFn;

double G(double x, double beta, double c, double gamma_eta, const SpecFn& fn) {
  if (!(beta > 0.0) || !(beta <= 1.0)) throw std::domain_error("G: beta outside (0, 1]");
  if (!(gamma_eta >= 0.0)) throw std::domain_error("G: gamma_eta must be non-negative");
  if (!(x > 0.0) || !(beta * x + c > 0.0)) throw std::domain_error("G: argument outside domain");
  return beta * fn.digamma(beta * x + c) + gamma_eta * fn.digamma(x);
}

double G_inverse(double y, double beta, double c, double gamma_eta, double tol,
                 const SpecFn& fn) {
  if (!(beta > 0.0) || !(beta <= 1.0)) throw std::domain_error("G_inverse: beta outside (0, 1]");
  if (!(gamma_eta >= 0.0)) throw std::domain_error("G_inverse: gamma_eta must be non-negative");
  auto g = [&](double x) { return beta * fn.digamma(beta * x + c) + gamma_eta * fn.digamma(x); };
  return specfn::invert_monotone(g, y, tol);
}

std::vector<double> stationarity_residual(const DirichletParams& alpha,
                                          const ProbabilityVector& s,
                                          const ConjugatePriorParams& prior, double beta,
                                          double gamma, const SpecFn& fn) {
  const std::size_t k = alpha.size();
  if (s.size() != k || prior.nu.size() != k)
    throw std::invalid_argument("stationarity_residual: dimension mismatch");
  const double kd = static_cast<double>(k);
  const double total = alpha.sum();
  const double psi_blend_total = fn.digamma(kd * (1.0 - beta) + beta * total);
  const double psi_total = fn.digamma(total);
  std::vector<double> r(k);
  for (std::size_t j = 0; j < k; ++j) {
    r[j] = beta * psi_blend_total - beta * fn.digamma(beta * alpha.alpha[j] + (1.0 - beta)) +
           beta * std::log(s.p[j]) +
           gamma * prior.eta * (psi_total - fn.digamma(alpha.alpha[j])) - gamma * prior.nu[j];
  }
  return r;
}

MmResult mm_posterior_mode(const ProbabilityVector& s, const ConjugatePriorParams& prior,
                           double beta, const DirichletParams& warm_start,
                           const FilterConfig& config, const SpecFn& fn,
                           const MmObserver& observer) {
  const std::size_t k = warm_start.size();
  if (s.size() != k || prior.nu.size() != k)
    throw std::invalid_argument("mm_posterior_mode: dimension mismatch");
  if (!(beta > 0.0) || !(beta <= 1.0))
    throw std::invalid_argument("mm_posterior_mode: beta outside (0, 1]");
  if (!s.strictly_positive())
    throw std::domain_error("mm_posterior_mode: s has zero entries; clamp first");

  const double kd = static_cast<double>(k);
  const double c_sum = kd * (1.0 - beta);   // argument offset on the sum side
  const double c_coord = 1.0 - beta;        // argument offset on the coordinate side
  const double gamma_eta = config.gamma * prior.eta;

  std::vector<double> log_s(k);
  for (std::size_t i = 0; i < k; ++i) log_s[i] = std::log(s.p[i]);

  DirichletParams alpha = warm_start;
  if (observer) observer(alpha);

  MmResult result;
  result.converged = false;
  for (int iter = 0; iter < config.max_mm_iters; ++iter) {
    const double total = std::accumulate(alpha.alpha.begin(), alpha.alpha.end(), 0.0);
    const double g_total = G(total, beta, c_sum, gamma_eta, fn);

    std::vector<double> next(k);
    double max_step = 0.0;
    bool invert_failed = false;
    for (std::size_t i = 0; i < k; ++i) {
      const double r = g_total + beta * log_s[i] - config.gamma * prior.nu[i];
      try {
        next[i] = G_inverse(r, beta, c_coord, gamma_eta, config.invert_tol, fn);
      } catch (const specfn::NoConvergence&) {
        // r below the attainable range of G (possible when gamma_eta = 0):
        // the minorizer's maximum is on the boundary. Keep the previous
        // iterate and report non-convergence; the stream must go on.
        invert_failed = true;
        break;
      }
      max_step = std::max(max_step, std::abs(next[i] - alpha.alpha[i]));
    }
    if (invert_failed) break;

    alpha.alpha = std::move(next);
    result.iterations = iter + 1;
    if (observer) observer(alpha);

    // After a sweep the stationarity residual collapses, per coordinate,
    // to G_{beta,K(1-beta)}(new total) - G_{beta,K(1-beta)}(old total)
    // up to the inversion tolerance, so one extra G evaluation tells us
    // whether the gradient is small too.
    const double new_total = std::accumulate(alpha.alpha.begin(), alpha.alpha.end(), 0.0);
    const double residual_gap = G(new_total, beta, c_sum, gamma_eta, fn) - g_total;
    if (max_step <= config.mm_tol && std::abs(residual_gap) <= 5.0 * config.mm_tol) {
      result.converged = true;
      break;
    }
  }
  result.alpha = std::move(alpha);
  return result;
}

FilterState init_state(std::size_t k, const FilterConfig& config, const SpecFn& fn) {
  if (k < 2) throw std::invalid_argument("init_state: need at least 2 classes");
  if (!(config.init_eta >= 0.0)) throw std::invalid_argument("init_state: init_eta must be >= 0");
  DirichletParams alpha =
      config.init_alpha.empty() ? DirichletParams::ones(k) : DirichletParams::checked(config.init_alpha);
  if (alpha.size() != k) throw std::invalid_argument("init_state: init_alpha dimension mismatch");
  FilterState state;
  state.prior.eta = config.init_eta;
  state.prior.nu = nu_from_mode(alpha, config.init_eta, fn);
  state.alpha_mode = std::move(alpha);
  return state;
}

FilterState decay(const FilterState& state, double gamma) {
  if (!(gamma > 0.0) || !(gamma <= 1.0)) throw std::invalid_argument("decay: gamma outside (0, 1]");
  FilterState out = state;
  out.prior.eta *= gamma;
  for (double& v : out.prior.nu) v *= gamma;
  return out;
}

UpdateOutput filter_update(const FilterState& state, const Observation& obs,
                           const FilterConfig& config, const SpecFn& fn) {
  const std::size_t k = state.alpha_mode.size();
  if (obs.s.size() != k) throw std::invalid_argument("filter_update: dimension mismatch");
  if (!(obs.beta >= 0.0) || !(obs.beta <= 1.0))
    throw std::invalid_argument("filter_update: beta outside [0, 1]");

  FilterState next = state;
  next.step_count = state.step_count + 1;

  if (obs.beta == 0.0) {
    // A zero-weight observation is uniform noise: the posterior is the
    // decayed prior, so only (eta, nu) shrink and the mode stands.
    next.prior.eta = config.gamma * state.prior.eta;
    next.prior.nu = nu_from_mode(next.alpha_mode, next.prior.eta, fn);
    next.last_converged = true;
    return UpdateOutput{std::move(next), dirichlet_mode(state.alpha_mode)};
  }

  const bool needs_clamp = std::any_of(obs.s.p.begin(), obs.s.p.end(), [&](double v) {
    return v < config.clamp_eps;
  });
  const ProbabilityVector s = needs_clamp ? obs.s.clamped(config.clamp_eps) : obs.s;

  MmResult solve =
      mm_posterior_mode(s, state.prior, obs.beta, state.alpha_mode, config, fn);
  next.prior.eta = config.gamma * state.prior.eta + obs.beta;
  next.prior.nu = nu_from_mode(solve.alpha, next.prior.eta, fn);
  next.alpha_mode = std::move(solve.alpha);
  next.last_converged = solve.converged;
  ProbabilityVector smoothed = dirichlet_mode(next.alpha_mode);
  return UpdateOutput{std::move(next), std::move(smoothed)};
}

}  // namespace dirfilt
