#include "spikecycle/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "json_support.hpp"
#include "spikecycle/io.hpp"
#include "spikecycle/normal.hpp"
#include "spikecycle/parallel.hpp"
#include "spikecycle/rng.hpp"
#include "spikecycle/sampler.hpp"

namespace spikecycle {
namespace {

// Central moment sum_r (x_r - mean)^pow / n via a fixed pairwise tree.
double central_moment(const std::vector<double>& xs, double mean, int pow) {
  std::vector<double> devs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    devs[i] = std::pow(xs[i] - mean, pow);
  return pairwise_sum(devs) / static_cast<double>(xs.size());
}

// Type-1 empirical quantile: the ceil(q n)-th order statistic.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<long long>(std::ceil(q * n));
  rank = std::clamp<long long>(rank, 1, sorted.size());
  return sorted[static_cast<std::size_t>(rank - 1)];
}

int count_pairings(std::vector<bool>& used) {
  std::size_t first = used.size();
  for (std::size_t i = 0; i < used.size(); ++i)
    if (!used[i]) {
      first = i;
      break;
    }
  if (first == used.size()) return 1;
  used[first] = true;
  int total = 0;
  for (std::size_t j = first + 1; j < used.size(); ++j)
    if (!used[j]) {
      used[j] = true;
      total += count_pairings(used);
      used[j] = false;
    }
  used[first] = false;
  return total;
}

double truncated_variance(const std::vector<double>& mu, int m,
                          double gamma) {
  std::vector<double> terms(m);
  for (int k = 1; k <= m; ++k)
    terms[k - 1] =
        mu[k - 1] * mu[k - 1] / (2.0 * k * std::pow(gamma, k));
  return pairwise_sum(terms);
}

// T_m assembled from precomputed cycles; shared by the experiments so
// every report prices the statistic identically.
double anova_from_cycles(const CycleStats& cycles,
                         const std::vector<double>& mu, int m, int p) {
  std::vector<double> terms(m);
  for (int k = 1; k <= m; ++k) {
    const double centered =
        cycles.b[k - 1] - (k == 1 ? static_cast<double>(p) : 0.0);
    terms[k - 1] = (2.0 * mu[k - 1] * centered - mu[k - 1] * mu[k - 1]) /
                   (4.0 * k * std::pow(cycles.gamma_hat, k));
  }
  return pairwise_sum(terms);
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const std::string& part : parts) {
    if (!out.empty()) out += "; ";
    out += part;
  }
  return out;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kClt:
      return "clt";
    case ExperimentKind::kLlr:
      return "llr";
  }
  throw std::logic_error("to_string: unknown experiment kind");
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> violations;
  for (const std::string& v : model.validate())
    violations.push_back("model: " + v);
  if (reps < 2) violations.push_back("reps must be at least 2");
  if (k_max < 1 || k_max > 12)
    violations.push_back("k_max must be in [1, 12]");
  if (k_list.empty()) violations.push_back("k_list must not be empty");
  for (int k : k_list)
    if (k < 1 || k > k_max) {
      violations.push_back("k_list entries must lie in [1, k_max]");
      break;
    }
  if (m < 0 || m > k_max)
    violations.push_back("m must be in [0, k_max] (0 selects the default)");
  if (mc_reps < 2) violations.push_back("mc_reps must be at least 2");
  return violations;
}

void ExperimentConfig::ensure_valid() const {
  const std::vector<std::string> violations = validate();
  if (!violations.empty())
    throw std::invalid_argument("invalid experiment config: " +
                                join(violations));
}

double ks_statistic(std::vector<double> xs,
                    const std::function<double(double)>& cdf) {
  if (xs.empty())
    throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(xs.begin(), xs.end());
  const auto n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double ks_statistic(std::vector<double> xs) {
  return ks_statistic(std::move(xs),
                      [](double x) { return norm_cdf(x); });
}

double wick_moment(int m) {
  if (m < 0 || m > 20)
    throw std::domain_error("wick_moment: m must be in [0, 20]");
  if (m % 2 == 1) return 0.0;
  if (m == 0) return 1.0;
  if (m <= 10) {
    std::vector<bool> used(m, false);
    return static_cast<double>(count_pairings(used));
  }
  double result = 1.0;
  for (int i = m - 1; i > 1; i -= 2) result *= i;
  return result;
}

MomentSummary summarize_moments(const std::vector<double>& xs) {
  if (xs.size() < 2)
    throw std::invalid_argument("summarize_moments: need at least 2 samples");
  const auto n = static_cast<double>(xs.size());
  MomentSummary out;
  out.mean = pairwise_sum(xs) / n;
  const double m2 = central_moment(xs, out.mean, 2);
  const double m3 = central_moment(xs, out.mean, 3);
  const double m4 = central_moment(xs, out.mean, 4);
  out.variance = m2 * n / (n - 1.0);
  out.mean_se = std::sqrt(out.variance / n);
  // Delta method: Var(s^2) ~= (m4 - (n-3)/(n-1) s^4) / n.
  const double var_of_var =
      (m4 - (n - 3.0) / (n - 1.0) * out.variance * out.variance) / n;
  out.variance_se = std::sqrt(std::max(var_of_var, 0.0));
  out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  out.skewness_se =
      n > 3.0 ? std::sqrt(6.0 * n * (n - 1.0) /
                          ((n - 2.0) * (n + 1.0) * (n + 3.0)))
              : 0.0;
  out.ks = ks_statistic(xs);
  return out;
}

CltReport clt_experiment(const ExperimentConfig& config, int threads) {
  config.ensure_valid();
  const ModelSpec& model = config.model;
  const int reps = config.reps;
  const int orders = static_cast<int>(config.k_list.size());
  const int deepest = *std::max_element(config.k_list.begin(),
                                        config.k_list.end());
  const double gamma_hat = model.gamma();

  std::vector<double> mu(deepest, 0.0);
  if (config.hypothesis == Hypothesis::kAlternative)
    for (int k = 1; k <= deepest; ++k) mu[k - 1] = mu_k(model, k);

  CltReport report;
  report.config = config;
  report.raw.assign(orders, std::vector<double>(reps, 0.0));
  report.standardized.assign(orders, std::vector<double>(reps, 0.0));

  CycleOptions opts;
  opts.k_max = config.k_max;
  opts.threads = 1;  // replicates are the parallel axis
  parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    const std::uint64_t seed =
        derive_rep_seed(config.master_seed, static_cast<std::uint64_t>(r));
    const DataMatrix x = sample(model, config.hypothesis, seed);
    const CycleStats cycles = cycle_vector(x.values, deepest, opts);
    for (int i = 0; i < orders; ++i) {
      const int k = config.k_list[i];
      const double raw = cycles.b[k - 1];
      double centered = raw - (k == 1 ? static_cast<double>(model.p) : 0.0);
      centered -= mu[k - 1];
      report.raw[i][r] = raw;
      report.standardized[i][r] =
          centered / std::sqrt(2.0 * k * std::pow(gamma_hat, k));
    }
  });

  report.moments.reserve(orders);
  for (int i = 0; i < orders; ++i)
    report.moments.push_back(summarize_moments(report.standardized[i]));

  report.correlation = Matrix::Identity(orders, orders);
  for (int i = 0; i < orders; ++i)
    for (int j = i + 1; j < orders; ++j) {
      const double mi = pairwise_sum(report.standardized[i]) / reps;
      const double mj = pairwise_sum(report.standardized[j]) / reps;
      std::vector<double> cross(reps), sqi(reps), sqj(reps);
      for (int r = 0; r < reps; ++r) {
        const double di = report.standardized[i][r] - mi;
        const double dj = report.standardized[j][r] - mj;
        cross[r] = di * dj;
        sqi[r] = di * di;
        sqj[r] = dj * dj;
      }
      const double denom =
          std::sqrt(pairwise_sum(sqi)) * std::sqrt(pairwise_sum(sqj));
      const double corr = denom > 0.0 ? pairwise_sum(cross) / denom : 0.0;
      report.correlation(i, j) = corr;
      report.correlation(j, i) = corr;
    }
  return report;
}

LlrReport llr_experiment(const ExperimentConfig& config, int threads) {
  config.ensure_valid();
  const ModelSpec& model = config.model;
  const AsymptoticParams params = asymptotic_params(model, config.k_max);
  if (!params.contiguous)
    throw std::domain_error(
        "llr_experiment: spec is outside the contiguous regime (margin " +
        format_double(params.margin) + ")");

  LlrReport report;
  report.config = config;
  report.m = config.m == 0 ? default_m(model.n, config.k_max) : config.m;
  report.sigma_m_sq = truncated_variance(params.mu, report.m, params.gamma);
  report.sigma_b_sq = params.sigma_b_sq;

  const int reps = config.reps;
  report.t_values.assign(reps, 0.0);
  report.log_mc.assign(reps, 0.0);
  report.gap.assign(reps, 0.0);

  CycleOptions opts;
  opts.k_max = config.k_max;
  opts.threads = 1;
  parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    const std::uint64_t x_seed =
        derive_rep_seed(config.master_seed, static_cast<std::uint64_t>(r));
    const DataMatrix x = sample(model, config.hypothesis, x_seed);
    const CycleStats cycles = cycle_vector(x.values, report.m, opts);
    const double t = anova_from_cycles(cycles, params.mu, report.m, model.p);
    // A fixed offset keeps the likelihood stream disjoint from the
    // replicate stream.
    const std::uint64_t mc_seed = derive_rep_seed(x_seed, 999983);
    const LikelihoodEstimate like =
        mc_likelihood(x.values, model, config.mc_reps, mc_seed, 1);
    report.t_values[r] = t;
    report.log_mc[r] = like.log_estimate;
    report.gap[r] = std::abs(like.log_estimate - t);
  });

  report.t_moments = summarize_moments(report.t_values);
  report.mean_log_mc = pairwise_sum(report.log_mc) / reps;
  std::vector<double> devs(reps);
  for (int r = 0; r < reps; ++r) {
    const double d = report.log_mc[r] - report.mean_log_mc;
    devs[r] = d * d;
  }
  report.mean_log_mc_se =
      std::sqrt(pairwise_sum(devs) / (reps - 1.0) / reps);

  std::vector<double> sorted_gap = report.gap;
  std::sort(sorted_gap.begin(), sorted_gap.end());
  report.gap_p50 = quantile_sorted(sorted_gap, 0.5);
  report.gap_p90 = quantile_sorted(sorted_gap, 0.9);
  // 3-sigma binomial bracket on the 90th percentile's rank.
  const double rank_sd = std::sqrt(reps * 0.9 * 0.1);
  const auto base = static_cast<long long>(std::ceil(0.9 * reps));
  const auto lo = std::clamp<long long>(
      base - static_cast<long long>(std::ceil(3.0 * rank_sd)), 1, reps);
  const auto hi = std::clamp<long long>(
      base + static_cast<long long>(std::ceil(3.0 * rank_sd)), 1, reps);
  report.gap_p90_lo = sorted_gap[static_cast<std::size_t>(lo - 1)];
  report.gap_p90_hi = sorted_gap[static_cast<std::size_t>(hi - 1)];
  return report;
}

DecompositionReport variance_decomposition_report(const ModelSpec& model,
                                                  int m_max, int reps,
                                                  std::uint64_t master_seed,
                                                  int threads) {
  model.ensure_valid();
  if (m_max < 1 || m_max > 12)
    throw std::invalid_argument(
        "variance_decomposition_report: m_max must be in [1, 12]");
  if (reps < 2)
    throw std::invalid_argument(
        "variance_decomposition_report: reps must be at least 2");
  const AsymptoticParams params = asymptotic_params(model, m_max);
  if (!params.contiguous)
    throw std::domain_error(
        "variance_decomposition_report: spec is outside the contiguous "
        "regime (margin " +
        format_double(params.margin) + ")");

  DecompositionReport report;
  report.model = model;
  report.reps = reps;
  report.master_seed = master_seed;
  report.sigma_b_sq = params.sigma_b_sq;

  // t_by_m[m-1][r]: the m-truncated statistic on null replicate r.
  std::vector<std::vector<double>> t_by_m(
      m_max, std::vector<double>(reps, 0.0));
  CycleOptions opts;
  opts.k_max = std::max(m_max, 6);
  opts.threads = 1;
  parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    const std::uint64_t seed =
        derive_rep_seed(master_seed, static_cast<std::uint64_t>(r));
    const DataMatrix x = sample(model, Hypothesis::kNull, seed);
    const CycleStats cycles = cycle_vector(x.values, m_max, opts);
    for (int m = 1; m <= m_max; ++m)
      t_by_m[m - 1][r] = anova_from_cycles(cycles, params.mu, m, model.p);
  });

  double cumulative = 0.0;
  for (int m = 1; m <= m_max; ++m) {
    DecompositionRow row;
    row.m = m;
    row.mu = params.mu[m - 1];
    row.term =
        row.mu * row.mu / (2.0 * m * std::pow(params.gamma, m));
    cumulative += row.term;
    row.cumulative = cumulative;
    row.fraction = cumulative / report.sigma_b_sq;
    const MomentSummary moments = summarize_moments(t_by_m[m - 1]);
    row.empirical_var = moments.variance;
    row.empirical_var_se = moments.variance_se;
    report.rows.push_back(row);
  }
  return report;
}

// ===== renderers ============================================================

namespace {

using nlohmann::json;

std::string csv_header_tail(const ModelSpec& model) {
  std::ostringstream out;
  out << " n=" << model.n << " p=" << model.p
      << " variant=" << to_string(model.variant);
  return out.str();
}

json moments_to_json(const MomentSummary& m) {
  json j;
  j["mean"] = m.mean;
  j["mean_se"] = m.mean_se;
  j["variance"] = m.variance;
  j["variance_se"] = m.variance_se;
  j["skewness"] = m.skewness;
  j["skewness_se"] = m.skewness_se;
  j["ks"] = m.ks;
  return j;
}

json params_to_json(const AsymptoticParams& params) {
  json j;
  j["gamma"] = params.gamma;
  json h = json::array();
  for (int i = 0; i < params.h.size(); ++i) h.push_back(params.h(i));
  j["h"] = std::move(h);
  j["mu"] = params.mu;
  j["sigma_k_sq"] = params.sigma_k;
  j["sigma_b_sq"] = params.sigma_b_sq;
  j["margin"] = params.margin;
  j["contiguous"] = params.contiguous;
  return j;
}

}  // namespace

std::string to_csv(const CltReport& report) {
  std::ostringstream out;
  out << "# spikecycle clt v1 reps=" << report.config.reps
      << " seed=" << report.config.master_seed
      << " hypothesis=" << to_string(report.config.hypothesis)
      << csv_header_tail(report.config.model) << "\n";
  out << "rep,k,raw,standardized\n";
  for (int r = 0; r < report.config.reps; ++r)
    for (std::size_t i = 0; i < report.config.k_list.size(); ++i)
      out << r << "," << report.config.k_list[i] << ","
          << format_double(report.raw[i][r]) << ","
          << format_double(report.standardized[i][r]) << "\n";
  return out.str();
}

std::string to_csv(const LlrReport& report) {
  std::ostringstream out;
  out << "# spikecycle llr v1 reps=" << report.config.reps
      << " seed=" << report.config.master_seed
      << " hypothesis=" << to_string(report.config.hypothesis) << " m="
      << report.m << " mc_reps=" << report.config.mc_reps
      << csv_header_tail(report.config.model) << "\n";
  out << "rep,t,log_mc_likelihood,abs_gap\n";
  for (int r = 0; r < report.config.reps; ++r)
    out << r << "," << format_double(report.t_values[r]) << ","
        << format_double(report.log_mc[r]) << ","
        << format_double(report.gap[r]) << "\n";
  return out.str();
}

std::string to_csv(const DecompositionReport& report) {
  std::ostringstream out;
  out << "# spikecycle decomposition v1 reps=" << report.reps
      << " seed=" << report.master_seed << " sigma_b_sq="
      << format_double(report.sigma_b_sq) << csv_header_tail(report.model)
      << "\n";
  out << "m,mu,term,cumulative,fraction,empirical_var,empirical_var_se\n";
  for (const DecompositionRow& row : report.rows)
    out << row.m << "," << format_double(row.mu) << ","
        << format_double(row.term) << "," << format_double(row.cumulative)
        << "," << format_double(row.fraction) << ","
        << format_double(row.empirical_var) << ","
        << format_double(row.empirical_var_se) << "\n";
  return out.str();
}

std::string to_csv(const CycleStats& stats) {
  std::ostringstream out;
  out << "# spikecycle cycles v1 n=" << stats.n << " p=" << stats.p << "\n";
  out << "k,b,normalized\n";
  for (std::size_t i = 0; i < stats.b.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    const double centered =
        stats.b[i] - (k == 1 ? static_cast<double>(stats.p) : 0.0);
    const double scale = std::sqrt(2.0 * k * std::pow(stats.gamma_hat, k));
    out << k << "," << format_double(stats.b[i]) << ","
        << format_double(centered / scale) << "\n";
  }
  return out.str();
}

std::string to_csv(const AsymptoticParams& params) {
  std::ostringstream out;
  out << "# spikecycle asymptotics v1 gamma=" << format_double(params.gamma)
      << " margin=" << format_double(params.margin)
      << " contiguous=" << (params.contiguous ? "true" : "false")
      << " sigma_b_sq=" << format_double(params.sigma_b_sq) << "\n";
  out << "k,mu,sigma_k_sq\n";
  for (std::size_t i = 0; i < params.mu.size(); ++i)
    out << (i + 1) << "," << format_double(params.mu[i]) << ","
        << format_double(params.sigma_k[i]) << "\n";
  return out.str();
}

std::string to_csv(const TestReport& report) {
  std::ostringstream out;
  out << "# spikecycle test v1\n";
  out << "field,value\n";
  out << "statistic," << format_double(report.statistic) << "\n";
  out << "m," << report.m << "\n";
  out << "alpha," << format_double(report.alpha) << "\n";
  out << "p_value," << format_double(report.p_value) << "\n";
  out << "reject," << (report.reject ? "true" : "false") << "\n";
  out << "sigma_m_sq," << format_double(report.sigma_m_sq) << "\n";
  out << "power," << format_double(report.power) << "\n";
  out << "margin," << format_double(report.params.margin) << "\n";
  out << "sigma_b_sq," << format_double(report.params.sigma_b_sq) << "\n";
  return out.str();
}

std::string to_json_string(const CltReport& report) {
  json j;
  j["schema"] = "spikecycle.clt.v1";
  j["config"] = detail::experiment_to_json(report.config);
  json moments = json::array();
  for (std::size_t i = 0; i < report.moments.size(); ++i) {
    json entry = moments_to_json(report.moments[i]);
    entry["k"] = report.config.k_list[i];
    moments.push_back(std::move(entry));
  }
  j["moments"] = std::move(moments);
  j["correlation"] = detail::matrix_to_json(report.correlation);
  return j.dump(2) + "\n";
}

std::string to_json_string(const LlrReport& report) {
  json j;
  j["schema"] = "spikecycle.llr.v1";
  j["config"] = detail::experiment_to_json(report.config);
  j["m"] = report.m;
  j["sigma_m_sq"] = report.sigma_m_sq;
  j["sigma_b_sq"] = report.sigma_b_sq;
  j["t_moments"] = moments_to_json(report.t_moments);
  j["mean_log_mc"] = report.mean_log_mc;
  j["mean_log_mc_se"] = report.mean_log_mc_se;
  j["gap_p50"] = report.gap_p50;
  j["gap_p90"] = report.gap_p90;
  j["gap_p90_lo"] = report.gap_p90_lo;
  j["gap_p90_hi"] = report.gap_p90_hi;
  return j.dump(2) + "\n";
}

std::string to_json_string(const DecompositionReport& report) {
  json j;
  j["schema"] = "spikecycle.decomposition.v1";
  j["model"] = detail::model_to_json(report.model);
  j["reps"] = report.reps;
  j["master_seed"] = report.master_seed;
  j["sigma_b_sq"] = report.sigma_b_sq;
  json rows = json::array();
  for (const DecompositionRow& row : report.rows) {
    json entry;
    entry["m"] = row.m;
    entry["mu"] = row.mu;
    entry["term"] = row.term;
    entry["cumulative"] = row.cumulative;
    entry["fraction"] = row.fraction;
    entry["empirical_var"] = row.empirical_var;
    entry["empirical_var_se"] = row.empirical_var_se;
    rows.push_back(std::move(entry));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string to_json_string(const CycleStats& stats) {
  json j;
  j["schema"] = "spikecycle.cycles.v1";
  j["n"] = stats.n;
  j["p"] = stats.p;
  j["gamma_hat"] = stats.gamma_hat;
  j["b"] = stats.b;
  return j.dump(2) + "\n";
}

std::string to_json_string(const AsymptoticParams& params) {
  json j = params_to_json(params);
  j["schema"] = "spikecycle.asymptotics.v1";
  return j.dump(2) + "\n";
}

std::string to_json_string(const TestReport& report) {
  json j;
  j["schema"] = "spikecycle.test.v1";
  j["statistic"] = report.statistic;
  j["m"] = report.m;
  j["alpha"] = report.alpha;
  j["p_value"] = report.p_value;
  j["reject"] = report.reject;
  j["sigma_m_sq"] = report.sigma_m_sq;
  j["power"] = report.power;
  j["params"] = params_to_json(report.params);
  return j.dump(2) + "\n";
}

}  // namespace spikecycle
