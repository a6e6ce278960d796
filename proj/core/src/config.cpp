#include "spikecycle/config.hpp"

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "json_support.hpp"
#include "spikecycle/io.hpp"

namespace spikecycle {
namespace {

using nlohmann::json;

std::optional<PriorKind> prior_kind_from_string(const std::string& s) {
  if (s == "gaussian-rows") return PriorKind::kGaussianRows;
  if (s == "rademacher-rows") return PriorKind::kRademacherRows;
  if (s == "bounded-discrete-rows") return PriorKind::kBoundedDiscreteRows;
  return std::nullopt;
}

std::optional<Variant> variant_from_string(const std::string& s) {
  if (s == "unnormalized") return Variant::kUnnormalized;
  if (s == "normalized") return Variant::kNormalized;
  return std::nullopt;
}

std::optional<Hypothesis> hypothesis_from_string(const std::string& s) {
  if (s == "null") return Hypothesis::kNull;
  if (s == "alternative") return Hypothesis::kAlternative;
  return std::nullopt;
}

std::optional<ExperimentKind> experiment_kind_from_string(
    const std::string& s) {
  if (s == "clt") return ExperimentKind::kClt;
  if (s == "llr") return ExperimentKind::kLlr;
  return std::nullopt;
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed,
                std::vector<std::string>& warnings) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      warnings.push_back(path + "." + item.key() + ": unknown key ignored");
  }
}

// Integer field in [lo, hi]; absent -> fallback, malformed -> violation.
long long get_int(const json& j, const char* key, long long fallback,
                  long long lo, long long hi, const std::string& path,
                  std::vector<std::string>& violations) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    violations.push_back(path + "." + key + ": expected an integer");
    return fallback;
  }
  const long long value = v.get<long long>();
  if (value < lo || value > hi) {
    violations.push_back(path + "." + key + ": must be in [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return fallback;
  }
  return value;
}

std::optional<std::uint64_t> get_u64(const json& j, const char* key,
                                     const std::string& path,
                                     std::vector<std::string>& violations) {
  if (!j.contains(key)) return std::nullopt;
  const json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0)
    return static_cast<std::uint64_t>(v.get<long long>());
  violations.push_back(path + "." + key +
                       ": expected a non-negative integer");
  return std::nullopt;
}

std::optional<std::string> get_string(const json& j, const char* key,
                                      const std::string& path,
                                      std::vector<std::string>& violations) {
  if (!j.contains(key)) return std::nullopt;
  const json& v = j.at(key);
  if (!v.is_string()) {
    violations.push_back(path + "." + key + ": expected a string");
    return std::nullopt;
  }
  return v.get<std::string>();
}

std::optional<Matrix> matrix_from_json(const json& v, const std::string& path,
                                       std::vector<std::string>& violations) {
  if (!v.is_array()) {
    violations.push_back(path + ": expected an array of numeric rows");
    return std::nullopt;
  }
  const int rows = static_cast<int>(v.size());
  int cols = -1;
  for (int r = 0; r < rows; ++r) {
    if (!v[r].is_array()) {
      violations.push_back(path + "[" + std::to_string(r) +
                           "]: expected an array of numbers");
      return std::nullopt;
    }
    if (cols < 0) cols = static_cast<int>(v[r].size());
    if (static_cast<int>(v[r].size()) != cols) {
      violations.push_back(path + ": rows must all have the same length");
      return std::nullopt;
    }
    for (int c = 0; c < cols; ++c)
      if (!v[r][c].is_number()) {
        violations.push_back(path + "[" + std::to_string(r) + "][" +
                             std::to_string(c) + "]: expected a number");
        return std::nullopt;
      }
  }
  Matrix out(rows, std::max(cols, 0));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < out.cols(); ++c) out(r, c) = v[r][c].get<double>();
  return out;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

namespace detail {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json prior_to_json(const PriorSpec& prior) {
  json j;
  j["family"] = to_string(prior.kind);
  j["dim"] = prior.dim;
  j["covariance"] = matrix_to_json(prior.covariance);
  j["variance_proxy"] = matrix_to_json(prior.variance_proxy);
  if (prior.kind == PriorKind::kBoundedDiscreteRows) {
    json atoms = json::array();
    for (const Vector& a : prior.atoms) atoms.push_back(vector_to_json(a));
    j["atoms"] = std::move(atoms);
    j["weights"] = prior.weights;
  }
  return j;
}

json model_to_json(const ModelSpec& spec) {
  json j;
  j["variant"] = to_string(spec.variant);
  j["n"] = spec.n;
  j["p"] = spec.p;
  j["kappa"] = spec.kappa;
  j["theta_prior"] = prior_to_json(spec.theta_prior);
  j["u_prior"] = prior_to_json(spec.u_prior);
  return j;
}

json experiment_to_json(const ExperimentConfig& config) {
  json j;
  j["kind"] = to_string(config.kind);
  j["model"] = model_to_json(config.model);
  j["hypothesis"] = to_string(config.hypothesis);
  j["reps"] = config.reps;
  j["k_list"] = config.k_list;
  j["m"] = config.m;
  j["mc_reps"] = config.mc_reps;
  j["master_seed"] = config.master_seed;
  j["k_max"] = config.k_max;
  j["output_path"] = config.output_path;
  return j;
}

PriorSpec prior_from_json(const json& j, const std::string& path,
                          std::vector<std::string>& violations,
                          std::vector<std::string>& warnings) {
  PriorSpec out;
  if (!j.is_object()) {
    violations.push_back(path + ": expected an object");
    return out;
  }
  check_keys(j, path,
             {"family", "dim", "covariance", "variance_proxy", "atoms",
              "weights"},
             warnings);

  const auto family = get_string(j, "family", path, violations);
  if (!family) {
    violations.push_back(path + ".family: required, one of "
                         "\"gaussian-rows\", \"rademacher-rows\", "
                         "\"bounded-discrete-rows\"");
    return out;
  }
  const auto kind = prior_kind_from_string(*family);
  if (!kind) {
    violations.push_back(path + ".family: unknown family \"" + *family +
                         "\"");
    return out;
  }

  const int dim = static_cast<int>(
      get_int(j, "dim", 0, 1, 1 << 20, path, violations));

  switch (*kind) {
    case PriorKind::kGaussianRows: {
      if (!j.contains("covariance")) {
        violations.push_back(path +
                             ".covariance: required for gaussian rows");
        return out;
      }
      const auto cov =
          matrix_from_json(j.at("covariance"), path + ".covariance",
                           violations);
      if (!cov) return out;
      out = PriorSpec::gaussian(*cov);
      break;
    }
    case PriorKind::kRademacherRows: {
      if (dim == 0) {
        violations.push_back(path + ".dim: required for rademacher rows");
        return out;
      }
      out = PriorSpec::rademacher(dim);
      break;
    }
    case PriorKind::kBoundedDiscreteRows: {
      if (!j.contains("atoms") || !j.contains("weights")) {
        violations.push_back(
            path + ": bounded discrete rows need \"atoms\" and \"weights\"");
        return out;
      }
      const auto atoms_m =
          matrix_from_json(j.at("atoms"), path + ".atoms", violations);
      if (!atoms_m) return out;
      const json& jw = j.at("weights");
      if (!jw.is_array()) {
        violations.push_back(path + ".weights: expected an array of numbers");
        return out;
      }
      std::vector<double> weights;
      for (const auto& w : jw) {
        if (!w.is_number()) {
          violations.push_back(path +
                               ".weights: expected an array of numbers");
          return out;
        }
        weights.push_back(w.get<double>());
      }
      if (static_cast<int>(weights.size()) != atoms_m->rows()) {
        violations.push_back(path +
                             ": atoms and weights must have equal length");
        return out;
      }
      std::vector<Vector> atoms;
      for (int r = 0; r < atoms_m->rows(); ++r)
        atoms.push_back(atoms_m->row(r).transpose());
      try {
        out = PriorSpec::bounded_discrete(std::move(atoms),
                                          std::move(weights));
      } catch (const std::exception& e) {
        violations.push_back(path + ": " + e.what());
        return out;
      }
      break;
    }
  }

  if (dim != 0 && dim != out.dim)
    violations.push_back(path + ".dim: " + std::to_string(dim) +
                         " does not match the implied dimension " +
                         std::to_string(out.dim));
  if (j.contains("covariance") && *kind != PriorKind::kGaussianRows) {
    const auto cov = matrix_from_json(j.at("covariance"),
                                      path + ".covariance", violations);
    if (cov) out.covariance = *cov;
  }
  if (j.contains("variance_proxy")) {
    const auto proxy = matrix_from_json(j.at("variance_proxy"),
                                        path + ".variance_proxy", violations);
    if (proxy) out.variance_proxy = *proxy;
  }
  return out;
}

ModelSpec model_from_json(const json& j, const std::string& path,
                          std::vector<std::string>& violations,
                          std::vector<std::string>& warnings) {
  ModelSpec spec;
  if (!j.is_object()) {
    violations.push_back(path + ": expected an object");
    return spec;
  }
  check_keys(j, path, {"variant", "n", "p", "kappa", "theta_prior", "u_prior"},
             warnings);

  if (const auto variant = get_string(j, "variant", path, violations)) {
    if (const auto parsed = variant_from_string(*variant))
      spec.variant = *parsed;
    else
      violations.push_back(path + ".variant: unknown variant \"" + *variant +
                           "\" (expected \"unnormalized\" or \"normalized\")");
  }
  spec.n = static_cast<int>(get_int(j, "n", 0, 1, 1 << 30, path, violations));
  spec.p = static_cast<int>(get_int(j, "p", 0, 1, 1 << 30, path, violations));
  if (!j.contains("n")) violations.push_back(path + ".n: required");
  if (!j.contains("p")) violations.push_back(path + ".p: required");
  spec.kappa =
      static_cast<int>(get_int(j, "kappa", 1, 1, 1 << 20, path, violations));

  if (j.contains("theta_prior"))
    spec.theta_prior = prior_from_json(j.at("theta_prior"),
                                       path + ".theta_prior", violations,
                                       warnings);
  else
    violations.push_back(path + ".theta_prior: required");
  if (j.contains("u_prior"))
    spec.u_prior = prior_from_json(j.at("u_prior"), path + ".u_prior",
                                   violations, warnings);
  else
    violations.push_back(path + ".u_prior: required");
  return spec;
}

ExperimentConfig experiment_from_json(const json& j, const std::string& path,
                                      std::vector<std::string>& violations,
                                      std::vector<std::string>& warnings) {
  ExperimentConfig config;
  if (!j.is_object()) {
    violations.push_back(path + ": expected an object");
    return config;
  }
  check_keys(j, path,
             {"kind", "model", "hypothesis", "reps", "k_list", "m", "mc_reps",
              "master_seed", "k_max", "output_path"},
             warnings);

  if (const auto kind = get_string(j, "kind", path, violations)) {
    if (const auto parsed = experiment_kind_from_string(*kind))
      config.kind = *parsed;
    else
      violations.push_back(path + ".kind: unknown kind \"" + *kind +
                           "\" (expected \"clt\" or \"llr\")");
  }
  if (j.contains("model"))
    config.model =
        model_from_json(j.at("model"), path + ".model", violations, warnings);
  else
    violations.push_back(path + ".model: required");
  if (const auto hyp = get_string(j, "hypothesis", path, violations)) {
    if (const auto parsed = hypothesis_from_string(*hyp))
      config.hypothesis = *parsed;
    else
      violations.push_back(path + ".hypothesis: unknown hypothesis \"" +
                           *hyp +
                           "\" (expected \"null\" or \"alternative\")");
  }
  config.reps = static_cast<int>(
      get_int(j, "reps", config.reps, 2, 1 << 30, path, violations));
  if (j.contains("k_list")) {
    const json& jk = j.at("k_list");
    if (!jk.is_array() || jk.empty()) {
      violations.push_back(path +
                           ".k_list: expected a non-empty array of integers");
    } else {
      std::vector<int> ks;
      bool ok = true;
      for (const auto& v : jk) {
        if (!v.is_number_integer() && !v.is_number_unsigned()) {
          violations.push_back(
              path + ".k_list: expected a non-empty array of integers");
          ok = false;
          break;
        }
        ks.push_back(v.get<int>());
      }
      if (ok) config.k_list = std::move(ks);
    }
  }
  config.m =
      static_cast<int>(get_int(j, "m", config.m, 0, 12, path, violations));
  config.mc_reps = static_cast<int>(
      get_int(j, "mc_reps", config.mc_reps, 2, 1 << 30, path, violations));
  if (const auto seed = get_u64(j, "master_seed", path, violations))
    config.master_seed = *seed;
  config.k_max = static_cast<int>(
      get_int(j, "k_max", config.k_max, 1, 12, path, violations));
  if (const auto out = get_string(j, "output_path", path, violations))
    config.output_path = *out;
  return config;
}

}  // namespace detail

ParsedConfig parse_config_text(const std::string& text) {
  ParsedConfig out;
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    out.violations.push_back(std::string("$: not valid JSON: ") + e.what());
    return out;
  }
  if (!j.is_object()) {
    out.violations.push_back("$: expected a JSON object");
    return out;
  }
  // An experiment wraps a model; a bare model has no "model" key.
  if (j.contains("model")) {
    ExperimentConfig config =
        detail::experiment_from_json(j, "$", out.violations, out.warnings);
    if (out.violations.empty())
      for (const std::string& v : config.validate())
        out.violations.push_back("$: " + v);
    for (const std::string& w : config.model.warnings())
      out.warnings.push_back("$.model: " + w);
    out.experiment = std::move(config);
  } else {
    ModelSpec spec =
        detail::model_from_json(j, "$", out.violations, out.warnings);
    if (out.violations.empty())
      for (const std::string& v : spec.validate())
        out.violations.push_back("$: " + v);
    for (const std::string& w : spec.warnings())
      out.warnings.push_back("$: " + w);
    out.model = std::move(spec);
  }
  return out;
}

ParsedConfig parse_config_file(const std::string& path) {
  return parse_config_text(read_file(path));
}

std::string serialize(const ModelSpec& spec) {
  return detail::model_to_json(spec).dump(2) + "\n";
}

std::string serialize(const ExperimentConfig& config) {
  return detail::experiment_to_json(config).dump(2) + "\n";
}

}  // namespace spikecycle
