// Replicated experiments over the samplers and statistics, with
// deterministic seeds and reports.
//
// Replicate r of an experiment uses derive_rep_seed(master_seed, r);
// nothing is shared between replicates, so the loop parallelizes
// freely and a config (including master_seed) pins every output byte.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spikecycle/asymptotics.hpp"
#include "spikecycle/cycles.hpp"
#include "spikecycle/llr.hpp"
#include "spikecycle/model.hpp"

namespace spikecycle {

enum class ExperimentKind { kClt, kLlr };

[[nodiscard]] std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kClt;
  ModelSpec model;
  Hypothesis hypothesis = Hypothesis::kNull;
  int reps = 1000;
  std::vector<int> k_list = {1, 2, 3};  // clt: orders to standardize
  int m = 0;                            // llr: truncation, 0 = default_m(n)
  int mc_reps = 2000;                   // llr: Monte Carlo draws per rep
  std::uint64_t master_seed = 1;
  int k_max = 6;
  std::string output_path;  // optional; used by the CLI

  [[nodiscard]] std::vector<std::string> validate() const;
  void ensure_valid() const;
};

struct MomentSummary {
  double mean = 0.0;
  double mean_se = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;
  double skewness = 0.0;
  double skewness_se = 0.0;
  double ks = 0.0;  // distance to N(0,1); meaningful for standardized data
};

// Moments of one sample; ks compares against the standard normal.
[[nodiscard]] MomentSummary summarize_moments(const std::vector<double>& xs);

// Kolmogorov-Smirnov distance between the empirical law of xs and a
// reference CDF (continuous, nondecreasing); the overload without a
// callable compares against N(0,1). Input need not be sorted.
[[nodiscard]] double ks_statistic(std::vector<double> xs,
                                  const std::function<double(double)>& cdf);
[[nodiscard]] double ks_statistic(std::vector<double> xs);

// E[Z^m] for Z ~ N(0,1): the number of pair partitions of m points,
// (m-1)!! for even m and 0 for odd m. Counted by explicit pairing
// enumeration for m <= 10 and by the double factorial beyond.
[[nodiscard]] double wick_moment(int m);

struct CltReport {
  ExperimentConfig config;
  // standardized[i][r]: replicate r of order k_list[i], centered and
  // scaled by sqrt(2 k gamma_hat^k); under the alternative mu_k is
  // subtracted as well.
  std::vector<std::vector<double>> raw;
  std::vector<std::vector<double>> standardized;
  std::vector<MomentSummary> moments;  // per k_list entry
  Matrix correlation;                  // between standardized orders
};

[[nodiscard]] CltReport clt_experiment(const ExperimentConfig& config,
                                       int threads = 1);

struct LlrReport {
  ExperimentConfig config;
  int m = 1;               // truncation actually used
  double sigma_m_sq = 0.0; // truncated variance at gamma = p/n
  double sigma_b_sq = 0.0; // full series (NaN outside the regime)
  std::vector<double> t_values;  // per rep
  std::vector<double> log_mc;    // per rep
  std::vector<double> gap;       // |log_mc - t|
  MomentSummary t_moments;
  double mean_log_mc = 0.0;
  double mean_log_mc_se = 0.0;
  double gap_p50 = 0.0;
  double gap_p90 = 0.0;
  // 3-sigma order-statistic bracket around the 90th percentile.
  double gap_p90_lo = 0.0;
  double gap_p90_hi = 0.0;
};

[[nodiscard]] LlrReport llr_experiment(const ExperimentConfig& config,
                                       int threads = 1);

struct DecompositionRow {
  int m = 0;
  double mu = 0.0;          // mu_m
  double term = 0.0;        // mu_m^2 / (2 m gamma^m)
  double cumulative = 0.0;  // sigma_m^2
  double fraction = 0.0;    // sigma_m^2 / sigma_b^2
  double empirical_var = 0.0;     // var of T_m over null replicates
  double empirical_var_se = 0.0;
};

struct DecompositionReport {
  ModelSpec model;
  int reps = 0;
  std::uint64_t master_seed = 0;
  double sigma_b_sq = 0.0;
  std::vector<DecompositionRow> rows;
};

// How much of the limiting LLR variance the first m cycle orders
// carry, next to the empirical variance of the truncated statistic
// over null replicates.
[[nodiscard]] DecompositionReport variance_decomposition_report(
    const ModelSpec& model, int m_max, int reps, std::uint64_t master_seed,
    int threads = 1);

// ===== deterministic renderers =============================================
// Same input produces the same bytes; doubles print with 17 significant
// digits in CSV and shortest-round-trip form in JSON.

[[nodiscard]] std::string to_csv(const CltReport& report);
[[nodiscard]] std::string to_csv(const LlrReport& report);
[[nodiscard]] std::string to_csv(const DecompositionReport& report);
[[nodiscard]] std::string to_csv(const CycleStats& stats);
[[nodiscard]] std::string to_csv(const AsymptoticParams& params);
[[nodiscard]] std::string to_csv(const TestReport& report);

[[nodiscard]] std::string to_json_string(const CltReport& report);
[[nodiscard]] std::string to_json_string(const LlrReport& report);
[[nodiscard]] std::string to_json_string(const DecompositionReport& report);
[[nodiscard]] std::string to_json_string(const CycleStats& stats);
[[nodiscard]] std::string to_json_string(const AsymptoticParams& params);
[[nodiscard]] std::string to_json_string(const TestReport& report);

}  // namespace spikecycle
