// spikecycle command line tool.
//
// Exit codes: 0 success, 1 domain errors (e.g. a spec outside the
// contiguous regime handed to "test"), 2 I/O and config errors. All
// file writes are atomic (temp file + rename). SPIKECYCLE_OUT_DIR
// supplies the directory for default-named outputs; an explicit --out
// always wins, and without either the report goes to stdout.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikecycle/config.hpp"
#include "spikecycle/cycles.hpp"
#include "spikecycle/experiments.hpp"
#include "spikecycle/io.hpp"
#include "spikecycle/llr.hpp"
#include "spikecycle/model.hpp"
#include "spikecycle/sampler.hpp"

namespace {

using namespace spikecycle;

// Errors that already know their exit code (config/I-O problems).
struct CliError : std::runtime_error {
  int code;
  CliError(int code, const std::string& message)
      : std::runtime_error(message), code(code) {}
};

ParsedConfig load_config(const std::string& path) {
  ParsedConfig parsed;
  try {
    parsed = parse_config_file(path);
  } catch (const std::exception& e) {
    throw CliError(2, e.what());
  }
  if (!parsed.ok()) {
    std::string message = "config " + path + " is invalid:";
    for (const std::string& violation : parsed.violations)
      message += "\n  " + violation;
    throw CliError(2, message);
  }
  for (const std::string& warning : parsed.warnings)
    std::cerr << "warning: " << warning << "\n";
  return parsed;
}

ModelSpec model_of(const ParsedConfig& parsed) {
  return parsed.experiment ? parsed.experiment->model : *parsed.model;
}

// --out wins; then the config's own output path; then the env
// directory with a default name; empty selects stdout.
std::string resolve_out(const std::string& cli_out,
                        const std::string& config_out,
                        const std::string& default_name) {
  if (!cli_out.empty()) return cli_out;
  if (!config_out.empty()) return config_out;
  if (const char* dir = std::getenv("SPIKECYCLE_OUT_DIR"))
    if (*dir != '\0')
      return (std::filesystem::path(dir) / default_name).string();
  return "";
}

void deliver(const std::string& content, const std::string& out_path,
             bool verbose) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  atomic_write_file(out_path, content);
  if (verbose) std::cerr << "wrote " << out_path << "\n";
}

DataMatrix load_matrix(const std::string& path) {
  try {
    return load_matrix_csv(path);
  } catch (const std::exception& e) {
    throw CliError(2, e.what());
  }
}

struct Options {
  std::string config_path;
  std::string matrix_path;
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 1;
  bool seed_given = false;
  int reps = 0;     // 0 = take from config / default
  int m = 0;        // 0 = default truncation
  bool m_given = false;
  int k_max = 6;
  bool k_max_given = false;
  double alpha = 0.05;
  int threads = 1;
  bool verbose = false;
};

int run_simulate(const Options& opt) {
  const ParsedConfig parsed = load_config(opt.config_path);
  const ModelSpec model = model_of(parsed);
  Hypothesis hypothesis = Hypothesis::kAlternative;
  std::uint64_t seed = 1;
  if (parsed.experiment) {
    hypothesis = parsed.experiment->hypothesis;
    seed = parsed.experiment->master_seed;
  }
  if (opt.seed_given) seed = opt.seed;
  const DataMatrix x = sample(model, hypothesis, seed);
  deliver(to_csv(x),
          resolve_out(opt.out, "",
                      "simulate-" + std::to_string(seed) + ".csv"),
          opt.verbose);
  return 0;
}

int run_cycles(const Options& opt) {
  const DataMatrix x = load_matrix(opt.matrix_path);
  CycleOptions cycle_opts;
  cycle_opts.k_max = opt.k_max;
  cycle_opts.threads = opt.threads;
  const CycleStats stats = cycle_vector(x.values, opt.k_max, cycle_opts);
  const std::string content =
      opt.format == "json" ? to_json_string(stats) : to_csv(stats);
  deliver(content,
          resolve_out(opt.out, "", "cycles." + opt.format), opt.verbose);
  return 0;
}

int run_threshold(const Options& opt) {
  const ParsedConfig parsed = load_config(opt.config_path);
  const AsymptoticParams params =
      asymptotic_params(model_of(parsed), opt.k_max);
  std::cout << "contiguous=" << (params.contiguous ? "true" : "false")
            << " margin=" << format_double(params.margin) << "\n";
  std::cout << "gamma=" << format_double(params.gamma)
            << " sigma_b_sq=" << format_double(params.sigma_b_sq) << "\n";
  std::cout << "k  mu_k  sigma_k_sq\n";
  for (std::size_t i = 0; i < params.mu.size(); ++i)
    std::cout << (i + 1) << "  " << format_double(params.mu[i]) << "  "
              << format_double(params.sigma_k[i]) << "\n";
  if (!opt.out.empty()) {
    const std::string content =
        opt.format == "json" ? to_json_string(params) : to_csv(params);
    deliver(content, opt.out, opt.verbose);
  }
  return 0;
}

int run_test(const Options& opt) {
  const ParsedConfig parsed = load_config(opt.config_path);
  const DataMatrix x = load_matrix(opt.matrix_path);
  CycleOptions cycle_opts;
  cycle_opts.k_max = opt.k_max;
  cycle_opts.threads = opt.threads;
  const TestReport report =
      lr_test(x.values, model_of(parsed), opt.alpha, opt.m, cycle_opts);
  std::cout << "t=" << format_double(report.statistic)
            << " p_value=" << format_double(report.p_value)
            << " reject=" << (report.reject ? "true" : "false") << "\n";
  if (!opt.out.empty()) {
    const std::string content =
        opt.format == "json" ? to_json_string(report) : to_csv(report);
    deliver(content, opt.out, opt.verbose);
  }
  return 0;
}

int run_experiment(const Options& opt) {
  const ParsedConfig parsed = load_config(opt.config_path);
  if (!parsed.experiment)
    throw CliError(2,
                   "config " + opt.config_path +
                       " is a bare model; \"experiment\" needs an "
                       "experiment config (with a \"model\" key)");
  ExperimentConfig config = *parsed.experiment;
  if (opt.seed_given) config.master_seed = opt.seed;
  if (opt.reps > 0) config.reps = opt.reps;
  if (opt.m_given) config.m = opt.m;
  if (opt.k_max_given) config.k_max = opt.k_max;
  config.ensure_valid();

  std::string content;
  if (config.kind == ExperimentKind::kClt) {
    const CltReport report = clt_experiment(config, opt.threads);
    content = opt.format == "json" ? to_json_string(report) : to_csv(report);
  } else {
    const LlrReport report = llr_experiment(config, opt.threads);
    content = opt.format == "json" ? to_json_string(report) : to_csv(report);
  }
  const std::string name = to_string(config.kind) + "-" +
                           std::to_string(config.master_seed) + "." +
                           opt.format;
  deliver(content, resolve_out(opt.out, config.output_path, name),
          opt.verbose);
  return 0;
}

int run_decompose(const Options& opt) {
  const ParsedConfig parsed = load_config(opt.config_path);
  const ModelSpec model = model_of(parsed);
  int m_max = 3;
  int reps = 200;
  std::uint64_t seed = 1;
  if (parsed.experiment) {
    if (parsed.experiment->m > 0) m_max = parsed.experiment->m;
    reps = parsed.experiment->reps;
    seed = parsed.experiment->master_seed;
  }
  if (opt.m_given) m_max = opt.m;
  if (opt.reps > 0) reps = opt.reps;
  if (opt.seed_given) seed = opt.seed;
  const DecompositionReport report =
      variance_decomposition_report(model, m_max, reps, seed, opt.threads);
  const std::string content =
      opt.format == "json" ? to_json_string(report) : to_csv(report);
  deliver(content,
          resolve_out(opt.out,
                      parsed.experiment ? parsed.experiment->output_path : "",
                      "decompose-" + std::to_string(seed) + "." + opt.format),
          opt.verbose);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "spikecycle: signal detection in spiked random matrix models via "
      "bipartite signed cycle statistics"};
  app.require_subcommand(1);

  Options opt;

  auto add_common = [&](CLI::App* sub, bool with_threads) {
    sub->add_option("--out", opt.out,
                    "Output path (default: SPIKECYCLE_OUT_DIR or stdout)");
    sub->add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    if (with_threads)
      sub->add_option("--threads", opt.threads, "Worker thread cap")
          ->check(CLI::Range(1, 4096));
    sub->add_flag("-v,--verbose", opt.verbose, "Progress notes on stderr");
  };
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path,
                    "JSON model spec or experiment config")
        ->required();
  };

  CLI::App* simulate =
      app.add_subcommand("simulate", "Draw one data matrix and dump it");
  add_config(simulate);
  auto* sim_seed = simulate->add_option("--seed", opt.seed, "Sampling seed");
  add_common(simulate, false);

  CLI::App* cycles = app.add_subcommand(
      "cycles", "Signed cycle statistics B_1..B_k of a dumped matrix");
  cycles->add_option("matrix", opt.matrix_path, "Matrix CSV path")
      ->required();
  auto* cyc_kmax =
      cycles->add_option("--k-max", opt.k_max, "Largest cycle order");
  cyc_kmax->check(CLI::Range(1, 12));
  add_common(cycles, true);

  CLI::App* threshold = app.add_subcommand(
      "threshold", "Contiguity margin and limiting parameters of a model");
  add_config(threshold);
  auto* thr_kmax =
      threshold->add_option("--k-max", opt.k_max, "Moments to report");
  thr_kmax->check(CLI::Range(1, 12));
  add_common(threshold, false);

  CLI::App* test = app.add_subcommand(
      "test", "Level-alpha cycle test of a dumped matrix against a model");
  test->add_option("matrix", opt.matrix_path, "Matrix CSV path")->required();
  add_config(test);
  test->add_option("--alpha", opt.alpha, "Test level in (0, 1)");
  auto* test_m =
      test->add_option("--m", opt.m, "Truncation order (0 = default)");
  test_m->check(CLI::Range(0, 12));
  auto* test_kmax =
      test->add_option("--k-max", opt.k_max, "Cycle order cap");
  test_kmax->check(CLI::Range(1, 12));
  add_common(test, true);

  CLI::App* experiment = app.add_subcommand(
      "experiment", "Replicated CLT or LLR experiment from a config");
  add_config(experiment);
  auto* exp_seed =
      experiment->add_option("--seed", opt.seed, "Master seed override");
  auto* exp_reps =
      experiment->add_option("--reps", opt.reps, "Replicate count override");
  exp_reps->check(CLI::Range(2, 1 << 30));
  auto* exp_m = experiment->add_option(
      "--m", opt.m, "LLR truncation override (0 = default)");
  exp_m->check(CLI::Range(0, 12));
  auto* exp_kmax =
      experiment->add_option("--k-max", opt.k_max, "Cycle order cap");
  exp_kmax->check(CLI::Range(1, 12));
  add_common(experiment, true);

  CLI::App* decompose = app.add_subcommand(
      "decompose", "Variance decomposition of the LLR across cycle orders");
  add_config(decompose);
  auto* dec_m =
      decompose->add_option("--m", opt.m, "Largest truncation order");
  dec_m->check(CLI::Range(1, 12));
  auto* dec_reps =
      decompose->add_option("--reps", opt.reps, "Null replicates");
  dec_reps->check(CLI::Range(2, 1 << 30));
  auto* dec_seed =
      decompose->add_option("--seed", opt.seed, "Master seed");
  add_common(decompose, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  opt.seed_given = sim_seed->count() > 0 || exp_seed->count() > 0 ||
                   dec_seed->count() > 0;
  opt.m_given = test_m->count() > 0 || exp_m->count() > 0 ||
                dec_m->count() > 0;
  opt.k_max_given = cyc_kmax->count() > 0 || thr_kmax->count() > 0 ||
                    test_kmax->count() > 0 || exp_kmax->count() > 0;

  try {
    if (simulate->parsed()) return run_simulate(opt);
    if (cycles->parsed()) return run_cycles(opt);
    if (threshold->parsed()) return run_threshold(opt);
    if (test->parsed()) return run_test(opt);
    if (experiment->parsed()) return run_experiment(opt);
    if (decompose->parsed()) return run_decompose(opt);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;  // unreachable: a subcommand is required
}
