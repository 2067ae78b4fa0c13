// dirfilt: streaming temporal smoothing of class-probability streams
// from one or more classifiers of differing accuracy.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dirfilt/harness.hpp"
#include "dirfilt/io.hpp"

namespace {

using namespace dirfilt;

/// Data-level failure: maps to exit code 1.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FilterFlags {
  double gamma = 0.95;
  int iters = 20;
  double mm_tol = 1e-8;
  double invert_tol = 1e-10;
  double init_eta = 1.0;
  double clamp_eps = kDefaultClampEps;
  std::string specfn = "exact";
  std::string beta_map;
};

void add_filter_flags(CLI::App* cmd, FilterFlags& flags) {
  cmd->add_option("--gamma", flags.gamma, "Decay factor in (0, 1]")
      ->check(CLI::Range(1e-12, 1.0));
  cmd->add_option("--iters", flags.iters, "Max fixed-point sweeps per update")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--mm-tol", flags.mm_tol, "Solver tolerance on the iterate step")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--invert-tol", flags.invert_tol, "Value tolerance of each G inversion")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--init-eta", flags.init_eta, "Initial pseudo-count")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--clamp-eps", flags.clamp_eps, "Probability floor before logarithms")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--specfn", flags.specfn, "Digamma evaluation: exact or table")
      ->check(CLI::IsMember({"exact", "table"}));
  cmd->add_option("--beta-map", flags.beta_map,
                  "Per-classifier weights, e.g. strong=1.0,weak=0.5");
}

FilterConfig to_config(const FilterFlags& flags) {
  FilterConfig config;
  config.gamma = flags.gamma;
  config.max_mm_iters = flags.iters;
  config.mm_tol = flags.mm_tol;
  config.invert_tol = flags.invert_tol;
  config.init_eta = flags.init_eta;
  config.clamp_eps = flags.clamp_eps;
  config.specfn_mode = flags.specfn == "table" ? specfn::SpecFnMode::lookup()
                                               : specfn::SpecFnMode::exact();
  return config;
}

std::map<std::string, double> parse_beta_map(const std::string& text) {
  std::map<std::string, double> map;
  if (text.empty()) return map;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ValidationError("--beta-map", "expected id=beta pairs, got '" + item + "'");
    const std::string id = item.substr(0, eq);
    double beta = 0.0;
    try {
      beta = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--beta-map", "bad beta in '" + item + "'");
    }
    if (!(beta >= 0.0) || !(beta <= 1.0))
      throw CLI::ValidationError("--beta-map", "beta outside [0, 1] in '" + item + "'");
    map[id] = beta;
  }
  return map;
}

std::unique_ptr<std::istream> open_input(const std::string& path) {
  if (path.empty() || path == "-") return nullptr;  // caller uses std::cin
  auto file = std::make_unique<std::ifstream>(path);
  if (!*file) throw DataError("cannot open input '" + path + "'");
  return file;
}

std::unique_ptr<std::ostream> open_output(const std::string& path) {
  if (path.empty() || path == "-") return nullptr;  // caller uses std::cout
  auto file = std::make_unique<std::ofstream>(path);
  if (!*file) throw DataError("cannot open output '" + path + "'");
  return file;
}

// ---------------------------------------------------------------- filter

struct FilterArgs {
  FilterFlags flags;
  std::string input = "-";
  std::string output = "-";
  std::string format = "jsonl";
  bool lenient = false;
  bool renormalize = false;
};

int run_filter(const FilterArgs& args) {
  const io::StreamFormat format = io::parse_format(args.format);
  const FilterConfig config = to_config(args.flags);
  const auto beta_map = parse_beta_map(args.flags.beta_map);
  const specfn::SpecFn fn(config.specfn_mode);

  auto in_file = open_input(args.input);
  std::istream& in = in_file ? *in_file : std::cin;
  auto out_file = open_output(args.output);
  std::ostream& out = out_file ? *out_file : std::cout;

  io::StreamReader reader(in, format);
  std::optional<FilterState> state;
  std::size_t k = 0;
  double prev_t = -std::numeric_limits<double>::infinity();
  bool wrote_header = false;

  for (;;) {
    std::optional<io::StreamRecord> record;
    try {
      record = reader.next();
    } catch (const io::StreamReader::ParseError& e) {
      if (!args.lenient)
        throw DataError("line " + std::to_string(e.line_number) + ": " + e.what());
      std::cerr << "dirfilt: skipping line " << e.line_number << ": " << e.what() << "\n";
      continue;
    }
    if (!record) break;

    if (record->t < prev_t)
      throw DataError("non-monotone timestamp " + io::format_double(record->t) + " after " +
                      io::format_double(prev_t));

    double beta = 1.0;
    if (!beta_map.empty()) {
      const auto it = beta_map.find(record->source);
      if (it == beta_map.end()) {
        const std::string msg = "unknown source '" + record->source + "' (not in --beta-map)";
        if (!args.lenient) throw DataError(msg);
        std::cerr << "dirfilt: skipping record: " << msg << "\n";
        continue;
      }
      beta = it->second;
    }

    double sum = 0.0;
    bool in_range = true;
    for (double v : record->probs) {
      sum += v;
      in_range = in_range && v >= 0.0 && v <= 1.0;
    }
    if (!in_range || std::abs(sum - 1.0) > 1e-6) {
      if (in_range && args.renormalize && sum > 0.0) {
        for (double& v : record->probs) v /= sum;
      } else {
        const std::string msg =
            "probabilities invalid (sum " + io::format_double(sum) + ") at t " +
            io::format_double(record->t);
        if (!args.lenient) throw DataError(msg);
        std::cerr << "dirfilt: skipping record: " << msg << "\n";
        continue;
      }
    } else if (sum != 1.0 && sum > 0.0) {
      for (double& v : record->probs) v /= sum;
    }

    if (k == 0) {
      k = record->probs.size();
      state = init_state(k, config, fn);
    } else if (record->probs.size() != k) {
      throw DataError("probability dimension changed mid-stream at t " +
                      io::format_double(record->t));
    }
    prev_t = record->t;

    Observation obs;
    obs.t = record->t;
    obs.source = record->source;
    obs.s = ProbabilityVector{std::move(record->probs)}.clamped(config.clamp_eps);
    obs.beta = beta;

    UpdateOutput update = filter_update(*state, obs, config, fn);
    state = std::move(update.state);

    io::OutputRecord out_record;
    out_record.t = obs.t;
    out_record.source = obs.source;
    out_record.probs = obs.s.p;
    out_record.smoothed = update.smoothed.p;
    out_record.class_1based = update.smoothed.argmax() + 1;
    out_record.converged = state->last_converged;
    if (format == io::StreamFormat::Csv && !wrote_header) {
      out << io::output_csv_header(k);
      wrote_header = true;
    }
    out << io::output_record_line(out_record, format);
  }
  return 0;
}

// -------------------------------------------------------------- simulate

struct SimulateArgs {
  std::uint64_t seed = 0;
  int k = 6;
  double stay_prob = 0.997;
  double tick = 5.0;
  double duration = 14400.0;
  double strong_period = 60.0;
  double weak_period = 5.0;
  std::optional<int> init_class_1based;
  std::string output = "-";
  std::string truth = "truth.csv";
  std::string format = "jsonl";
};

int run_simulate(const SimulateArgs& args) {
  BenchmarkScenario scenario = default_scenario(args.seed);
  scenario.chain.k = args.k;
  scenario.chain.stay_prob = args.stay_prob;
  scenario.chain.tick = args.tick;
  scenario.chain.duration = args.duration;
  if (args.init_class_1based) scenario.chain.init_class = *args.init_class_1based - 1;
  scenario.policy.profiles[0].period = args.strong_period;
  scenario.policy.profiles[1].period = args.weak_period;

  const io::StreamFormat format = io::parse_format(args.format);
  const ObservationStream stream = build_stream(scenario);

  auto out_file = open_output(args.output);
  std::ostream& out = out_file ? *out_file : std::cout;
  if (format == io::StreamFormat::Csv)
    out << io::stream_csv_header(static_cast<std::size_t>(args.k));
  for (const auto& obs : stream.observations) {
    io::StreamRecord record{obs.t, obs.source, obs.s.p};
    out << io::stream_record_line(record, format);
  }

  std::ofstream truth_out(args.truth);
  if (!truth_out) throw DataError("cannot open truth output '" + args.truth + "'");
  truth_out << io::truth_csv_header();
  for (const auto& tick : stream.truth)
    truth_out << io::truth_record_line({tick.t, tick.true_class + 1});
  return 0;
}

// -------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string predictions;
  std::string truth;
  std::string json_path;
};

int run_evaluate(const EvaluateArgs& args) {
  std::ifstream pred_in(args.predictions);
  if (!pred_in) throw DataError("cannot open predictions '" + args.predictions + "'");
  std::ifstream truth_in(args.truth);
  if (!truth_in) throw DataError("cannot open truth '" + args.truth + "'");

  std::vector<io::OutputRecord> outputs;
  std::vector<io::TruthRecord> truth;
  try {
    outputs = io::read_output_records(pred_in);
    truth = io::read_truth(truth_in);
  } catch (const io::StreamReader::ParseError& e) {
    throw DataError("line " + std::to_string(e.line_number) + ": " + e.what());
  }
  if (outputs.size() != truth.size())
    throw DataError("length mismatch: " + std::to_string(outputs.size()) + " predictions vs " +
                    std::to_string(truth.size()) + " truth records");
  if (outputs.empty()) throw DataError("empty input");

  const int k = static_cast<int>(outputs.front().smoothed.size());
  std::vector<int> predictions, labels;
  predictions.reserve(outputs.size());
  labels.reserve(truth.size());
  for (const auto& record : outputs) predictions.push_back(record.class_1based - 1);
  for (const auto& record : truth) {
    if (record.true_class_1based < 1 || record.true_class_1based > k)
      throw DataError("truth label " + std::to_string(record.true_class_1based) +
                      " outside [1, " + std::to_string(k) + "]");
    labels.push_back(record.true_class_1based - 1);
  }

  MetricsReport report;
  try {
    report = evaluate(predictions, labels, k);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  std::cout << render_metrics(report);
  if (!args.json_path.empty()) {
    if (args.json_path == "-") {
      std::cout << metrics_to_json(report);
    } else {
      std::ofstream json_out(args.json_path);
      if (!json_out) throw DataError("cannot open json output '" + args.json_path + "'");
      json_out << metrics_to_json(report);
    }
  }
  return 0;
}

// ----------------------------------------------------------------- bench

struct BenchArgs {
  FilterFlags flags;
  std::uint64_t seed = 0;
  int k = 6;
  double stay_prob = 0.997;
  double tick = 5.0;
  double duration = 14400.0;
  double strong_period = 60.0;
  double weak_period = 5.0;
  int window = 5;
  std::string methods = "raw,simple,single,multiple";
  std::string trace_path;
  std::string json_path;
};

int run_bench(const BenchArgs& args) {
  BenchmarkScenario scenario = default_scenario(args.seed);
  scenario.chain.k = args.k;
  scenario.chain.stay_prob = args.stay_prob;
  scenario.chain.tick = args.tick;
  scenario.chain.duration = args.duration;
  scenario.policy.profiles[0].period = args.strong_period;
  scenario.policy.profiles[1].period = args.weak_period;
  scenario.filter = to_config(args.flags);
  scenario.simple_window = args.window;
  const auto beta_map = parse_beta_map(args.flags.beta_map);
  for (auto& profile : scenario.policy.profiles) {
    const auto it = beta_map.find(profile.id);
    if (it != beta_map.end()) profile.beta = it->second;
  }

  std::vector<SmootherKind> methods;
  std::istringstream is(args.methods);
  std::string token;
  while (std::getline(is, token, ',')) {
    SmootherKind kind = SmootherKind::parse(token);
    kind.window = args.window;
    methods.push_back(kind);
  }
  if (methods.empty()) throw CLI::ValidationError("--methods", "no methods requested");

  const BenchmarkResult result = run_benchmark(scenario, methods);
  std::cout << render_benchmark(result);

  if (!args.json_path.empty()) {
    std::ofstream json_out(args.json_path);
    if (!json_out) throw DataError("cannot open json output '" + args.json_path + "'");
    json_out << benchmark_to_json(result);
  }
  if (!args.trace_path.empty()) {
    std::ofstream trace(args.trace_path);
    if (!trace) throw DataError("cannot open trace output '" + args.trace_path + "'");
    const ObservationStream stream = build_stream(scenario);
    trace << "t,true_class";
    for (const auto& report : result.reports) trace << "," << report.method.name();
    trace << "\n";
    for (std::size_t i = 0; i < stream.truth.size(); ++i) {
      trace << io::format_double(stream.truth[i].t) << "," << stream.truth[i].true_class + 1;
      for (const auto& report : result.reports)
        trace << "," << io::format_double(report.true_class_prob[i]);
      trace << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal smoothing and fusion of class-probability streams"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key = value file");

  FilterArgs filter_args;
  CLI::App* filter_cmd =
      app.add_subcommand("filter", "Smooth a stream of classifier outputs");
  add_filter_flags(filter_cmd, filter_args.flags);
  filter_cmd->add_option("-i,--input", filter_args.input, "Input path or - for stdin");
  filter_cmd->add_option("-o,--output", filter_args.output, "Output path or - for stdout");
  filter_cmd->add_option("--format", filter_args.format, "Record format")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  filter_cmd->add_flag("--lenient", filter_args.lenient,
                       "Skip malformed records instead of aborting");
  filter_cmd->add_flag("--renormalize", filter_args.renormalize,
                       "Renormalize probability vectors that do not sum to 1");

  SimulateArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic labeled stream");
  sim_cmd->add_option("--seed", sim_args.seed, "Random seed");
  sim_cmd->add_option("--k", sim_args.k, "Number of classes")->check(CLI::Range(2, 1000));
  sim_cmd->add_option("--stay-prob", sim_args.stay_prob, "Self-transition probability per tick")
      ->check(CLI::Range(1e-12, 1.0));
  sim_cmd->add_option("--tick", sim_args.tick, "Seconds between observations")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--duration", sim_args.duration, "Total seconds")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--strong-period", sim_args.strong_period, "Strong-classifier period (s)")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--weak-period", sim_args.weak_period, "Weak-classifier period (s)")
      ->check(CLI::PositiveNumber);
  std::int64_t init_class_flag = 0;
  sim_cmd->add_option("--init-class", init_class_flag, "Initial true class (1-based)")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("-o,--output", sim_args.output, "Stream output path or - for stdout");
  sim_cmd->add_option("--truth", sim_args.truth, "Truth CSV path");
  sim_cmd->add_option("--format", sim_args.format, "Record format")
      ->check(CLI::IsMember({"jsonl", "csv"}));

  EvaluateArgs eval_args;
  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "Score filtered output against a truth file");
  eval_cmd->add_option("predictions", eval_args.predictions, "Filtered output path")->required();
  eval_cmd->add_option("truth", eval_args.truth, "Truth CSV path")->required();
  eval_cmd->add_option("--json", eval_args.json_path, "Write the report as JSON (- for stdout)");

  BenchArgs bench_args;
  bench_args.flags.gamma = default_scenario(0).filter.gamma;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "Compare smoothing methods on a synthetic scenario");
  add_filter_flags(bench_cmd, bench_args.flags);
  bench_cmd->add_option("--seed", bench_args.seed, "Random seed");
  bench_cmd->add_option("--k", bench_args.k, "Number of classes")->check(CLI::Range(2, 1000));
  bench_cmd->add_option("--stay-prob", bench_args.stay_prob, "Self-transition probability")
      ->check(CLI::Range(1e-12, 1.0));
  bench_cmd->add_option("--tick", bench_args.tick, "Seconds between observations")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--duration", bench_args.duration, "Total seconds")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--strong-period", bench_args.strong_period,
                        "Strong-classifier period (s)")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--weak-period", bench_args.weak_period, "Weak-classifier period (s)")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--window", bench_args.window, "Running-average window")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--methods", bench_args.methods,
                        "Comma-separated subset of raw,simple,single,multiple");
  bench_cmd->add_option("--trace", bench_args.trace_path,
                        "Write per-tick true-class probabilities as CSV");
  bench_cmd->add_option("--json", bench_args.json_path, "Write the comparison as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (filter_cmd->parsed()) return run_filter(filter_args);
    if (sim_cmd->parsed()) {
      if (init_class_flag > 0) sim_args.init_class_1based = static_cast<int>(init_class_flag);
      if (sim_args.init_class_1based && *sim_args.init_class_1based > sim_args.k)
        throw DataError("--init-class exceeds --k");
      return run_simulate(sim_args);
    }
    if (eval_cmd->parsed()) return run_evaluate(eval_args);
    if (bench_cmd->parsed()) return run_bench(bench_args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "dirfilt: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dirfilt: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
