#ifndef DIRFILT_DIRICHLET_HPP
#define DIRFILT_DIRICHLET_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dirfilt/specfn.hpp"

namespace dirfilt {

/// Default per-entry floor applied before taking logarithms.
inline constexpr double kDefaultClampEps = 1e-6;

/// A point on the unit simplex: K >= 2 entries in [0, 1] summing to 1
/// within 1e-9.
struct ProbabilityVector {
  std::vector<double> p;

  /// Validating factory; throws std::invalid_argument on violation.
  static ProbabilityVector checked(std::vector<double> values);

  /// Floors every entry at eps and renormalizes. The floor is widened
  /// to eps/(1 - K*eps) before renormalization so the result is still
  /// >= eps per entry.
  ProbabilityVector clamped(double eps = kDefaultClampEps) const;

  std::size_t size() const { return p.size(); }
  bool strictly_positive() const;

  /// Index of the largest entry; ties go to the lowest index.
  int argmax() const;
};

/// Dirichlet concentration parameters: K >= 2 positive entries.
struct DirichletParams {
  std::vector<double> alpha;

  static DirichletParams checked(std::vector<double> values);
  static DirichletParams ones(std::size_t k);

  std::size_t size() const { return alpha.size(); }
  double sum() const;
};

/// Parameters (eta, nu) of the conjugate prior over Dirichlet
/// concentrations: density proportional to A(alpha)^eta *
/// exp(-<alpha, nu>). eta acts as a pseudo-count of observations, nu
/// as accumulated negative-log-probability statistics.
struct ConjugatePriorParams {
  double eta = 0.0;
  std::vector<double> nu;
};

/// ln A(alpha) = ln Gamma(sum alpha) - sum ln Gamma(alpha_i), the
/// Dirichlet log-normalizer.
double log_A(const DirichletParams& alpha);

/// Dirichlet log-density at s (all entries strictly positive).
double dirichlet_log_pdf(const ProbabilityVector& s, const DirichletParams& alpha);

/// Mode of Dir(alpha) when all alpha_i > 1: (alpha_i - 1)/(sum - K).
/// Otherwise the mode is on the boundary or undefined and the mean
/// alpha_i/sum is returned instead (order-preserving fallback).
ProbabilityVector dirichlet_mode(const DirichletParams& alpha);

/// eta * ln A(alpha) - <alpha, nu>; the normalizer B(eta, nu) has no
/// closed form and is omitted throughout.
double cp_log_density_unnormalized(const DirichletParams& alpha,
                                   const ConjugatePriorParams& prior);

/// nu such that the prior CP(eta, nu) has its mode at alpha_star:
///   nu_i = eta * (Psi(sum alpha) - Psi(alpha_i)),
/// i.e. the stationarity condition Psi(alpha_i) - Psi(sum alpha) +
/// nu_i/eta = 0 holds at alpha_star by construction.
std::vector<double> nu_from_mode(const DirichletParams& alpha_star, double eta,
                                 const specfn::SpecFn& fn = specfn::SpecFn::exact_instance());

struct CpModeOptions {
  double tol = 1e-8;  // max-norm of the mode-condition residual
  int max_iters = 100;
  double damping = 1.0;
  double invert_tol = 1e-10;
};

/// Mode-solver failure carrying the last residual max-norm.
class CpModeError : public std::runtime_error {
 public:
  CpModeError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

/// Mode of CP(eta, nu), eta > 0, by the fixed point
///   alpha_j <- Psi^-1(Psi(sum alpha) - nu_j/eta)
/// from the all-ones start. Requires every nu_j > 0 (otherwise the
/// mode condition has no solution). Throws CpModeError if the residual
/// is still above tol after max_iters sweeps.
DirichletParams cp_mode(const ConjugatePriorParams& prior, const CpModeOptions& opts = {},
                        const specfn::SpecFn& fn = specfn::SpecFn::exact_instance());

/// The one-step log posterior L(alpha) for an observation s with
/// weight beta against the pre-update prior (eta, nu) decayed by gamma:
///   L(alpha) = ln Gamma(K(1-beta) + beta*sum alpha)
///            - sum ln Gamma(beta*alpha_i + (1-beta))
///            + beta * <alpha, ln s>
///            + gamma*eta * [ln Gamma(sum alpha) - sum ln Gamma(alpha_i)]
///            - gamma * <alpha, nu>.
/// s must be strictly positive (clamp first).
double posterior_objective(const DirichletParams& alpha, const ProbabilityVector& s,
                           const ConjugatePriorParams& prior, double beta, double gamma);

}  // namespace dirfilt

#endif  // DIRFILT_DIRICHLET_HPP
