#ifndef DIRFILT_FUSION_HPP
#define DIRFILT_FUSION_HPP

#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dirfilt/filter.hpp"

namespace dirfilt {

struct ClassifierProfile {
  std::string id;
  double beta = 1.0;     // observation weight assigned to this classifier
  double period = 5.0;   // seconds between calls
};

/// Fixed-cadence call policy. Profiles are listed strongest first;
/// when several periods divide the same tick the earliest profile wins.
struct SchedulePolicy {
  enum class Rule { FixedPeriods };
  std::vector<ClassifierProfile> profiles;
  Rule rule = Rule::FixedPeriods;
};

/// Policy matching the reference setup: a strong classifier (beta 1.0)
/// every 60 s, a weak one (beta 0.5) every 5 s.
SchedulePolicy default_policy();

/// Classifier called at tick t: the first profile whose period divides
/// t. Ticks aligned to no period (off-grid input) fall through to the
/// last, finest-cadence profile.
const std::string& schedule_next(const SchedulePolicy& policy, double t);

/// Beta of the registered profile; throws std::invalid_argument for an
/// unknown id.
double assign_beta(std::string_view source, const SchedulePolicy& policy);

/// The four compared smoothing methods: raw classifier outputs, a
/// running average over the last W outputs, the filter with beta
/// forced to 1, and the filter with per-classifier betas.
struct SmootherKind {
  enum class Kind { Raw, Simple, Single, Multiple };
  Kind kind = Kind::Multiple;
  int window = 5;  // Simple only

  std::string name() const;
  static SmootherKind parse(std::string_view token);  // "raw", "simple", ...
  bool operator==(const SmootherKind&) const = default;
};

struct SmoothOutput {
  ProbabilityVector probs;
  int class_index = 0;  // 0-based argmax, ties to the lowest index
  bool converged = true;
};

/// Stateful per-stream smoother; feed time-ordered observations.
class Smoother {
 public:
  Smoother(SmootherKind kind, FilterConfig config);

  SmoothOutput step(const Observation& obs);

  const SmootherKind& kind() const { return kind_; }

 private:
  SmootherKind kind_;
  FilterConfig config_;
  specfn::SpecFn fn_;
  std::size_t k_ = 0;                          // fixed by the first observation
  std::optional<FilterState> state_;           // Single / Multiple
  std::deque<std::vector<double>> window_;     // Simple
};

/// Convenience wrapper: one output per observation.
std::vector<SmoothOutput> smooth(SmootherKind kind, const std::vector<Observation>& stream,
                                 const FilterConfig& config);

}  // namespace dirfilt

#endif  // DIRFILT_FUSION_HPP
