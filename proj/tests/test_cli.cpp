// End-to-end checks of the installed command line tool. Each case
// spawns the real binary (path injected by the build) through the
// shell, captures stdout/stderr/exit code, and compares against the
// library computing the same thing in-process.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "spikecycle/asymptotics.hpp"
#include "spikecycle/config.hpp"
#include "spikecycle/cycles.hpp"
#include "spikecycle/experiments.hpp"
#include "spikecycle/io.hpp"
#include "spikecycle/llr.hpp"
#include "spikecycle/model.hpp"
#include "spikecycle/sampler.hpp"

using namespace spikecycle;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::string content = read_file(path);
  std::remove(path.c_str());
  return content;
}

// env_prefix defaults to clearing SPIKECYCLE_OUT_DIR so an outer
// environment cannot redirect the default-output tests.
RunResult run_cli(const std::string& args,
                  const std::string& env_prefix = "SPIKECYCLE_OUT_DIR=") {
  static int counter = 0;
  const std::string out_path = "cli_stdout_" + std::to_string(counter);
  const std::string err_path = "cli_stderr_" + std::to_string(counter);
  ++counter;
  const std::string cmd = env_prefix + " \"" SPIKECYCLE_CLI_PATH "\" " +
                          args + " >" + out_path + " 2>" + err_path;
  const int raw = std::system(cmd.c_str());
  RunResult r;
  if (raw != -1 && WIFEXITED(raw)) r.code = WEXITSTATUS(raw);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

// Scalar spike with unit strength: gamma 2, margin exactly 1.
ModelSpec margin_one_model() {
  ModelSpec spec;
  spec.variant = Variant::kUnnormalized;
  spec.n = 20;
  spec.p = 40;
  spec.kappa = 1;
  spec.theta_prior = PriorSpec::scaled_rademacher(1.0);
  spec.u_prior = PriorSpec::rademacher(1);
  return spec;
}

// Spike strength 1.3: h = 1.69, margin 2 - 1.69^2 < 0.
ModelSpec non_contiguous_model() {
  ModelSpec spec = margin_one_model();
  spec.theta_prior = PriorSpec::scaled_rademacher(1.3);
  return spec;
}

ExperimentConfig small_clt_config() {
  ExperimentConfig config;
  config.kind = ExperimentKind::kClt;
  config.model = margin_one_model();
  config.model.n = 12;
  config.model.p = 24;
  config.model.theta_prior = PriorSpec::scaled_rademacher(0.8);
  config.hypothesis = Hypothesis::kNull;
  config.reps = 30;
  config.k_list = {1, 2};
  config.master_seed = 5;
  config.k_max = 3;
  return config;
}

ExperimentConfig small_llr_config() {
  ExperimentConfig config = small_clt_config();
  config.kind = ExperimentKind::kLlr;
  config.model.n = 8;
  config.model.p = 16;
  config.reps = 6;
  config.m = 1;
  config.mc_reps = 40;
  config.master_seed = 7;
  return config;
}

void write_config(const std::string& path, const ModelSpec& spec) {
  atomic_write_file(path, serialize(spec));
}

void write_config(const std::string& path, const ExperimentConfig& config) {
  atomic_write_file(path, serialize(config));
}

}  // namespace

TEST_CASE("help exits zero and names every subcommand") {
  const RunResult r = run_cli("--help");
  CHECK(r.code == 0);
  for (const char* sub :
       {"simulate", "cycles", "threshold", "test", "experiment", "decompose"})
    CHECK(r.out.find(sub) != std::string::npos);
}

TEST_CASE("usage errors exit two") {
  write_config("cli_model.json", margin_one_model());
  CHECK(run_cli("").code == 2);                   // subcommand required
  CHECK(run_cli("frobnicate").code == 2);         // unknown subcommand
  CHECK(run_cli("simulate").code == 2);           // missing --config
  CHECK(run_cli("simulate --config cli_model.json --bogus").code == 2);
  CHECK(run_cli("cycles missing.csv --k-max 0").code == 2);  // range check
  fs::remove("cli_model.json");
}

TEST_CASE("threshold prints the contiguity line first") {
  write_config("cli_model.json", margin_one_model());
  const RunResult r = run_cli("threshold --config cli_model.json --k-max 3");
  CHECK(r.code == 0);
  CHECK(first_line(r.out) == "contiguous=true margin=1");
  const std::string second =
      first_line(r.out.substr(r.out.find('\n') + 1));
  CHECK(second.rfind("gamma=2 sigma_b_sq=0.34657359", 0) == 0);
  CHECK(r.out.find("k  mu_k  sigma_k_sq") != std::string::npos);

  // Beyond the threshold the line flips but the command still succeeds.
  write_config("cli_model_hot.json", non_contiguous_model());
  const RunResult hot = run_cli("threshold --config cli_model_hot.json");
  CHECK(hot.code == 0);
  CHECK(first_line(hot.out).rfind("contiguous=false margin=-0.85", 0) == 0);

  // --out adds a machine-readable report without silencing stdout.
  const RunResult filed = run_cli(
      "threshold --config cli_model.json --out cli_threshold.csv");
  CHECK(filed.code == 0);
  CHECK(first_line(filed.out) == "contiguous=true margin=1");
  CHECK(first_line(read_file("cli_threshold.csv"))
            .rfind("# spikecycle asymptotics v1 gamma=2", 0) == 0);
  fs::remove("cli_threshold.csv");
  fs::remove("cli_model.json");
  fs::remove("cli_model_hot.json");
}

TEST_CASE("simulate is deterministic and honours the seed override") {
  write_config("cli_model.json", margin_one_model());
  const RunResult a = run_cli("simulate --config cli_model.json --seed 9");
  const RunResult b = run_cli("simulate --config cli_model.json --seed 9");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const DataMatrix x = matrix_from_csv_text(a.out);
  CHECK(x.n() == 20);
  CHECK(x.p() == 40);
  CHECK(x.seed == 9);
  CHECK(x.provenance == Hypothesis::kAlternative);

  const RunResult other = run_cli("simulate --config cli_model.json --seed 10");
  CHECK(other.out != a.out);
  // Without --seed a bare model defaults to seed 1.
  const RunResult bare = run_cli("simulate --config cli_model.json");
  CHECK(matrix_from_csv_text(bare.out).seed == 1);

  // --out with --verbose writes the file and says so on stderr.
  const RunResult filed = run_cli(
      "simulate --config cli_model.json --seed 9 --out cli_sim.csv -v");
  CHECK(filed.code == 0);
  CHECK(filed.out.empty());
  CHECK(filed.err.find("wrote cli_sim.csv") != std::string::npos);
  CHECK(read_file("cli_sim.csv") == a.out);
  CHECK(!fs::exists("cli_sim.csv.tmp-spikecycle"));
  fs::remove("cli_sim.csv");
  fs::remove("cli_model.json");
}

TEST_CASE("cycles reproduces library values byte for byte") {
  ModelSpec spec = margin_one_model();
  spec.n = 5;
  spec.p = 7;
  const DataMatrix x = sample(spec, Hypothesis::kNull, 42);
  atomic_write_file("cli_matrix.csv", to_csv(x));

  CycleOptions opts;
  opts.k_max = 4;
  const CycleStats stats = cycle_vector(x.values, 4, opts);

  const RunResult csv = run_cli("cycles cli_matrix.csv --k-max 4");
  CHECK(csv.code == 0);
  CHECK(csv.out == to_csv(stats));
  CHECK(first_line(csv.out) == "# spikecycle cycles v1 n=5 p=7");
  CHECK(csv.out.find("k,b,normalized") != std::string::npos);

  const RunResult json = run_cli("cycles cli_matrix.csv --k-max 4 --format json");
  CHECK(json.code == 0);
  CHECK(json.out == to_json_string(stats));
  CHECK(json.out.find("spikecycle.cycles.v1") != std::string::npos);

  const RunResult threaded =
      run_cli("cycles cli_matrix.csv --k-max 4 --threads 3");
  CHECK(threaded.out == csv.out);

  const RunResult missing = run_cli("cycles definitely-missing.csv");
  CHECK(missing.code == 2);
  CHECK(missing.err.find("cannot open for reading") != std::string::npos);
  fs::remove("cli_matrix.csv");
}

TEST_CASE("test reports the decision and exits by domain") {
  const ModelSpec spec = margin_one_model();
  write_config("cli_model.json", spec);
  const DataMatrix x = sample(spec, Hypothesis::kNull, 13);
  atomic_write_file("cli_matrix.csv", to_csv(x));

  CycleOptions opts;
  opts.k_max = 6;
  const TestReport want = lr_test(x.values, spec, 0.1, 2, opts);
  const RunResult r = run_cli(
      "test cli_matrix.csv --config cli_model.json --alpha 0.1 --m 2");
  CHECK(r.code == 0);
  CHECK(first_line(r.out) ==
        "t=" + format_double(want.statistic) +
            " p_value=" + format_double(want.p_value) +
            " reject=" + (want.reject ? "true" : "false"));

  const RunResult filed = run_cli(
      "test cli_matrix.csv --config cli_model.json --out cli_test.csv");
  CHECK(filed.code == 0);
  CHECK(first_line(read_file("cli_test.csv")) == "# spikecycle test v1");
  fs::remove("cli_test.csv");

  // A spike beyond the contiguity threshold is a domain error: exit 1.
  write_config("cli_model_hot.json", non_contiguous_model());
  const RunResult hot =
      run_cli("test cli_matrix.csv --config cli_model_hot.json");
  CHECK(hot.code == 1);
  CHECK(hot.err.find("contiguity_margin") != std::string::npos);
  fs::remove("cli_model_hot.json");
  fs::remove("cli_model.json");
  fs::remove("cli_matrix.csv");
}

TEST_CASE("malformed configs exit two and write nothing") {
  atomic_write_file("cli_bad.json", "{nope");
  const RunResult bad = run_cli(
      "simulate --config cli_bad.json --out cli_should_not_exist.csv");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("not valid JSON") != std::string::npos);
  CHECK(!fs::exists("cli_should_not_exist.csv"));
  fs::remove("cli_bad.json");

  atomic_write_file("cli_incomplete.json", "{\"p\": 4}");
  const RunResult incomplete = run_cli(
      "simulate --config cli_incomplete.json --out cli_should_not_exist.csv");
  CHECK(incomplete.code == 2);
  CHECK(incomplete.err.find("is invalid") != std::string::npos);
  CHECK(incomplete.err.find("$.n: required") != std::string::npos);
  CHECK(!fs::exists("cli_should_not_exist.csv"));
  fs::remove("cli_incomplete.json");

  const RunResult absent = run_cli("threshold --config definitely-missing.json");
  CHECK(absent.code == 2);
  CHECK(absent.err.find("cannot open for reading") != std::string::npos);
}

TEST_CASE("experiment runs both kinds with overrides and formats") {
  write_config("cli_clt.json", small_clt_config());
  const RunResult csv = run_cli("experiment --config cli_clt.json");
  CHECK(csv.code == 0);
  CHECK(first_line(csv.out).rfind("# spikecycle clt v1", 0) == 0);
  const RunResult again = run_cli("experiment --config cli_clt.json");
  CHECK(again.out == csv.out);
  const RunResult threaded =
      run_cli("experiment --config cli_clt.json --threads 2");
  CHECK(threaded.out == csv.out);

  const RunResult json =
      run_cli("experiment --config cli_clt.json --format json");
  CHECK(json.code == 0);
  CHECK(json.out.find("spikecycle.clt.v1") != std::string::npos);
  // The seed override lands in the echoed config.
  const RunResult reseeded =
      run_cli("experiment --config cli_clt.json --format json --seed 77");
  CHECK(reseeded.out.find("\"master_seed\": 77") != std::string::npos);
  CHECK(reseeded.out != json.out);

  write_config("cli_llr.json", small_llr_config());
  const RunResult llr = run_cli("experiment --config cli_llr.json");
  CHECK(llr.code == 0);
  CHECK(first_line(llr.out).rfind("# spikecycle llr v1", 0) == 0);

  // A bare model is not an experiment.
  write_config("cli_model.json", margin_one_model());
  const RunResult bare = run_cli("experiment --config cli_model.json");
  CHECK(bare.code == 2);
  CHECK(bare.err.find("needs an experiment config") != std::string::npos);
  fs::remove("cli_model.json");
  fs::remove("cli_llr.json");
  fs::remove("cli_clt.json");
}

TEST_CASE("decompose emits the decomposition schema deterministically") {
  write_config("cli_model.json", margin_one_model());
  const RunResult a =
      run_cli("decompose --config cli_model.json --m 2 --reps 10 --seed 4");
  CHECK(a.code == 0);
  CHECK(first_line(a.out).rfind("# spikecycle decomposition v1 reps=10", 0) ==
        0);
  const RunResult b =
      run_cli("decompose --config cli_model.json --m 2 --reps 10 --seed 4");
  CHECK(b.out == a.out);
  const RunResult json = run_cli(
      "decompose --config cli_model.json --m 2 --reps 10 --seed 4 "
      "--format json");
  CHECK(json.out.find("spikecycle.decomposition.v1") != std::string::npos);
  fs::remove("cli_model.json");
}

TEST_CASE("default output names land in SPIKECYCLE_OUT_DIR") {
  fs::remove_all("cli_out_dir");
  fs::create_directory("cli_out_dir");
  const std::string env = "SPIKECYCLE_OUT_DIR=cli_out_dir";
  write_config("cli_model.json", margin_one_model());
  write_config("cli_clt.json", small_clt_config());

  const RunResult sim =
      run_cli("simulate --config cli_model.json --seed 9", env);
  CHECK(sim.code == 0);
  CHECK(sim.out.empty());
  CHECK(fs::exists("cli_out_dir/simulate-9.csv"));

  atomic_write_file("cli_matrix.csv",
                    to_csv(sample(margin_one_model(), Hypothesis::kNull, 3)));
  const RunResult cyc =
      run_cli("cycles cli_matrix.csv --k-max 2 --format json", env);
  CHECK(cyc.code == 0);
  CHECK(fs::exists("cli_out_dir/cycles.json"));

  const RunResult exp = run_cli("experiment --config cli_clt.json", env);
  CHECK(exp.code == 0);
  CHECK(fs::exists("cli_out_dir/clt-5.csv"));

  const RunResult dec = run_cli(
      "decompose --config cli_model.json --m 2 --reps 10 --seed 3", env);
  CHECK(dec.code == 0);
  CHECK(fs::exists("cli_out_dir/decompose-3.csv"));

  // An explicit --out always beats the environment directory.
  const RunResult explicit_out = run_cli(
      "simulate --config cli_model.json --seed 11 --out cli_explicit.csv",
      env);
  CHECK(explicit_out.code == 0);
  CHECK(fs::exists("cli_explicit.csv"));
  CHECK(!fs::exists("cli_out_dir/simulate-11.csv"));
  fs::remove("cli_explicit.csv");

  // threshold keeps its report on stdout even with the directory set.
  const RunResult thr = run_cli("threshold --config cli_model.json", env);
  CHECK(thr.code == 0);
  CHECK(!thr.out.empty());

  fs::remove("cli_matrix.csv");
  fs::remove("cli_clt.json");
  fs::remove("cli_model.json");
  fs::remove_all("cli_out_dir");
}

TEST_CASE("experiment config output_path is the fallback destination") {
  ExperimentConfig config = small_clt_config();
  config.output_path = "cli_cfg_named.csv";
  write_config("cli_clt_named.json", config);
  const RunResult r = run_cli("experiment --config cli_clt_named.json");
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(first_line(read_file("cli_cfg_named.csv"))
            .rfind("# spikecycle clt v1", 0) == 0);
  fs::remove("cli_cfg_named.csv");
  fs::remove("cli_clt_named.json");
}
