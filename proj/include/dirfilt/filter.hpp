#ifndef DIRFILT_FILTER_HPP
#define DIRFILT_FILTER_HPP

#include <functional>
#include <string>
#include <vector>

#include "dirfilt/dirichlet.hpp"
#include "dirfilt/specfn.hpp"

namespace dirfilt {

/// One classifier output: probabilities s at time t from a named
/// source, weighted by beta in [0, 1] (1 = full trust, 0 = uniform
/// noise).
struct Observation {
  double t = 0.0;
  std::string source;
  ProbabilityVector s;
  double beta = 1.0;
};

struct FilterConfig {
  double gamma = 0.95;          // per-step decay of (eta, nu)
  int max_mm_iters = 20;        // M
  double mm_tol = 1e-8;         // max-norm on alpha displacement per sweep
  double invert_tol = 1e-10;    // value tolerance of each G inversion
  double clamp_eps = kDefaultClampEps;
  std::vector<double> init_alpha;  // empty -> all-ones of the stream's K
  double init_eta = 1.0;
  specfn::SpecFnMode specfn_mode = specfn::SpecFnMode::exact();
};

/// Per-stream latent state: the conjugate-prior parameters, the cached
/// prior mode (also the warm start of the next solve), and bookkeeping.
struct FilterState {
  ConjugatePriorParams prior;
  DirichletParams alpha_mode;
  long step_count = 0;
  bool last_converged = true;
};

/// G_{beta,c}(x) = beta * Psi(beta*x + c) + gamma_eta * Psi(x), the
/// strictly increasing map inverted in each fixed-point sweep.
/// gamma_eta carries the product gamma * eta of the decayed prior.
double G(double x, double beta, double c, double gamma_eta,
         const specfn::SpecFn& fn = specfn::SpecFn::exact_instance());

/// Numerical inverse of G at y. With gamma_eta = 0 and c > 0 the range
/// of G is bounded below by beta*Psi(c); a y below it raises
/// specfn::NoConvergence.
double G_inverse(double y, double beta, double c, double gamma_eta, double tol = 1e-10,
                 const specfn::SpecFn& fn = specfn::SpecFn::exact_instance());

/// Stationarity residual of the one-step posterior at alpha, per
/// coordinate j:
///   beta*Psi(K(1-beta) + beta*sum alpha) - beta*Psi(beta*alpha_j + (1-beta))
///   + beta*ln s_j + gamma*eta*[Psi(sum alpha) - Psi(alpha_j)] - gamma*nu_j.
/// This is the gradient of posterior_objective.
std::vector<double> stationarity_residual(
    const DirichletParams& alpha, const ProbabilityVector& s, const ConjugatePriorParams& prior,
    double beta, double gamma, const specfn::SpecFn& fn = specfn::SpecFn::exact_instance());

struct MmResult {
  DirichletParams alpha;
  bool converged = false;
  int iterations = 0;
};

/// Called with the warm-start iterate and then once per sweep.
using MmObserver = std::function<void(const DirichletParams&)>;

/// Posterior-mode solve by minorize-maximize fixed-point sweeps:
///   r_i = G_{beta,K(1-beta)}(sum alpha^k) + beta*ln s_i - gamma*nu_i
///   alpha_i^{k+1} = G^-1_{beta,(1-beta)}(r_i)
/// for at most config.max_mm_iters sweeps, starting from warm_start.
/// Every sweep increases the posterior objective. Converged means both
/// the iterate displacement and the implied stationarity residual fell
/// below tolerance; on non-convergence the last iterate is returned
/// with the flag cleared (streaming never aborts). Requires beta > 0
/// and a strictly positive s (clamp first).
MmResult mm_posterior_mode(const ProbabilityVector& s, const ConjugatePriorParams& prior,
                           double beta, const DirichletParams& warm_start,
                           const FilterConfig& config,
                           const specfn::SpecFn& fn = specfn::SpecFn::exact_instance(),
                           const MmObserver& observer = nullptr);

/// Fresh state for a K-class stream: alpha_mode = config.init_alpha
/// (all-ones when empty), eta = config.init_eta, nu consistent with
/// the mode.
FilterState init_state(std::size_t k, const FilterConfig& config,
                       const specfn::SpecFn& fn = specfn::SpecFn::exact_instance());

/// (eta, nu) <- (gamma*eta, gamma*nu). Preserves the prior's mode and
/// flattens it; for prediction-only gaps. The standard update applies
/// the decay inside the objective, not through this call.
FilterState decay(const FilterState& state, double gamma);

struct UpdateOutput {
  FilterState state;
  ProbabilityVector smoothed;
};

/// One filtering step:
///   1. alpha* <- posterior mode of the decayed prior against obs
///      (skipped when beta = 0: the observation carries no information)
///   2. eta <- gamma*eta + beta
///   3. nu  <- nu_from_mode(alpha*, eta)
///   4. emit the mode of Dir(alpha*).
/// Solver non-convergence is recorded in the state, never thrown.
UpdateOutput filter_update(const FilterState& state, const Observation& obs,
                           const FilterConfig& config,
                           const specfn::SpecFn& fn = specfn::SpecFn::exact_instance());

}  // namespace dirfilt

#endif  // DIRFILT_FILTER_HPP
