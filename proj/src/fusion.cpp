#include "dirfilt/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dirfilt {

SchedulePolicy default_policy() {
  SchedulePolicy policy;
  policy.profiles = {{"strong", 1.0, 60.0}, {"weak", 0.5, 5.0}};
  return policy;
}

namespace {

bool period_divides(double t, double period) {
  const double q = t / period;
  return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, std::abs(q));
}

}  // namespace

const std::string& schedule_next(const SchedulePolicy& policy, double t) {
  if (policy.profiles.empty()) throw std::invalid_argument("schedule_next: no profiles");
  if (!(t >= 0.0)) throw std::invalid_argument("schedule_next: negative timestamp");
  for (const auto& profile : policy.profiles)
    if (period_divides(t, profile.period)) return profile.id;
  return policy.profiles.back().id;
}

double assign_beta(std::string_view source, const SchedulePolicy& policy) {
  for (const auto& profile : policy.profiles)
    if (profile.id == source) return profile.beta;
  throw std::invalid_argument("assign_beta: unknown classifier id '" + std::string(source) + "'");
}

std::string SmootherKind::name() const {
  switch (kind) {
    case Kind::Raw: return "Raw";
    case Kind::Simple: return "Simple";
    case Kind::Single: return "Single";
    case Kind::Multiple: return "Multiple";
  }
  return "?";
}

SmootherKind SmootherKind::parse(std::string_view token) {
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "raw") return {Kind::Raw};
  if (lower == "simple") return {Kind::Simple};
  if (lower == "single") return {Kind::Single};
  if (lower == "multiple") return {Kind::Multiple};
  throw std::invalid_argument("unknown smoother '" + std::string(token) + "'");
}

Smoother::Smoother(SmootherKind kind, FilterConfig config)
    : kind_(kind), config_(std::move(config)), fn_(config_.specfn_mode) {
  if (kind_.kind == SmootherKind::Kind::Simple && kind_.window < 1)
    throw std::invalid_argument("Smoother: window must be >= 1");
}

SmoothOutput Smoother::step(const Observation& obs) {
  if (k_ == 0) {
    k_ = obs.s.size();
  } else if (obs.s.size() != k_) {
    throw std::invalid_argument("Smoother: dimension changed mid-stream");
  }

  switch (kind_.kind) {
    case SmootherKind::Kind::Raw:
      return {obs.s, obs.s.argmax(), true};

    case SmootherKind::Kind::Simple: {
      window_.push_back(obs.s.clamped(config_.clamp_eps).p);
      if (window_.size() > static_cast<std::size_t>(kind_.window)) window_.pop_front();
      std::vector<double> mean(k_, 0.0);
      for (const auto& v : window_)
        for (std::size_t i = 0; i < k_; ++i) mean[i] += v[i];
      const double n = static_cast<double>(window_.size());
      for (double& v : mean) v /= n;
      ProbabilityVector probs{std::move(mean)};
      const int cls = probs.argmax();
      return {std::move(probs), cls, true};
    }

    case SmootherKind::Kind::Single:
    case SmootherKind::Kind::Multiple: {
      if (!state_) state_ = init_state(k_, config_, fn_);
      Observation effective = obs;
      if (kind_.kind == SmootherKind::Kind::Single) effective.beta = 1.0;
      UpdateOutput out = filter_update(*state_, effective, config_, fn_);
      state_ = std::move(out.state);
      const int cls = out.smoothed.argmax();
      return {std::move(out.smoothed), cls, state_->last_converged};
    }
  }
  throw std::logic_error("Smoother: unhandled kind");
}

std::vector<SmoothOutput> smooth(SmootherKind kind, const std::vector<Observation>& stream,
                                 const FilterConfig& config) {
  Smoother smoother(kind, config);
  std::vector<SmoothOutput> outputs;
  outputs.reserve(stream.size());
  for (const auto& obs : stream) outputs.push_back(smoother.step(obs));
  return outputs;
}

}  // namespace dirfilt
