#ifndef DIRFILT_HARNESS_HPP
#define DIRFILT_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirfilt/filter.hpp"
#include "dirfilt/fusion.hpp"
#include "dirfilt/rng.hpp"

namespace dirfilt {

/// First-order Markov ground truth sampled on a fixed tick grid.
/// Without an explicit transition matrix the chain stays with
/// probability stay_prob and moves to a uniformly chosen other class.
struct MarkovChainSpec {
  int k = 6;
  double stay_prob = 0.99;
  std::optional<std::vector<std::vector<double>>> transition;  // row-stochastic KxK
  double tick = 5.0;        // seconds
  double duration = 14400.0;  // seconds
  std::uint64_t seed = 0;
  std::optional<int> init_class;  // default: uniform draw
};

/// Synthetic classifier emulating a base model of a given strength:
/// the Dirichlet concentration peak sits on the true class, except
/// with probability flip_prob it lands on a uniformly chosen wrong
/// class.
struct SyntheticClassifierSpec {
  std::string id;
  double concentration_true = 40.0;
  double concentration_other = 0.5;
  double flip_prob = 0.0;
};

struct LabeledTick {
  double t = 0.0;
  int true_class = 0;  // 0-based
};

std::vector<LabeledTick> simulate_chain(const MarkovChainSpec& spec);

ProbabilityVector simulate_classifier(int true_class, int k, const SyntheticClassifierSpec& spec,
                                      Rng& rng);
/// Single-draw convenience with its own seed.
ProbabilityVector simulate_classifier(int true_class, int k, const SyntheticClassifierSpec& spec,
                                      std::uint64_t seed);

/// Confusion matrix (rows = truth, columns = prediction) with the
/// derived one-vs-rest metrics. A class with no possible positives
/// (or negatives) reports the vacuous 1.0.
struct MetricsReport {
  std::vector<std::vector<long>> confusion;
  double accuracy = 0.0;
  std::vector<double> sensitivity;  // TP / (TP + FN)
  std::vector<double> specificity;  // TN / (TN + FP)

  long total() const;
};

/// Labels are 0-based and must lie in [0, k).
MetricsReport evaluate(const std::vector<int>& predictions, const std::vector<int>& truth, int k);

/// A full benchmark scenario: ground-truth dynamics, per-classifier
/// noise models, the call policy, and the filter configuration shared
/// by every smoother.
struct BenchmarkScenario {
  MarkovChainSpec chain;
  std::vector<SyntheticClassifierSpec> classifiers;
  SchedulePolicy policy;
  FilterConfig filter;
  int simple_window = 5;
};

/// The reference scenario: six classes on a 5 s tick over 4 h with
/// stay probability 0.99; a weak classifier (concentration 8 / 0.8,
/// flip 0.25, beta 0.5) every 5 s and a strong one (40 / 0.5, flip
/// 0.05, beta 1.0) every 60 s.
BenchmarkScenario default_scenario(std::uint64_t seed);

struct ObservationStream {
  std::vector<Observation> observations;
  std::vector<LabeledTick> truth;
};

/// Ground truth plus one observation per tick from the scheduled
/// classifier. The chain and the classifier noise use independent
/// sub-seeds derived from chain.seed.
ObservationStream build_stream(const BenchmarkScenario& scenario);

struct MethodReport {
  SmootherKind method;
  MetricsReport metrics;
  std::vector<double> true_class_prob;  // per-tick probability assigned to the truth
};

struct BenchmarkResult {
  std::vector<MethodReport> reports;  // in the order requested
};

/// Runs every requested smoother over one shared stream and scores it
/// against the shared truth. Fully reproducible from the scenario seed.
BenchmarkResult run_benchmark(const BenchmarkScenario& scenario,
                              const std::vector<SmootherKind>& methods);

/// JSON serialization of a report (confusion, accuracy, per-class
/// sensitivity/specificity).
std::string metrics_to_json(const MetricsReport& report);
std::string benchmark_to_json(const BenchmarkResult& result);

/// Aligned text tables: one accuracy row per method, then per-class
/// sensitivity and specificity tables with methods as columns.
std::string render_benchmark(const BenchmarkResult& result);
/// Single-report rendering used by the evaluate command.
std::string render_metrics(const MetricsReport& report);

}  // namespace dirfilt

#endif  // DIRFILT_HARNESS_HPP
