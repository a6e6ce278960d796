// Internal JSON conversions (not installed; public headers stay free
// of the vendored json dependency).
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "spikecycle/experiments.hpp"
#include "spikecycle/model.hpp"

namespace spikecycle::detail {

nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json prior_to_json(const PriorSpec& prior);
nlohmann::json model_to_json(const ModelSpec& spec);
nlohmann::json experiment_to_json(const ExperimentConfig& config);

// Parsers accumulate violations instead of throwing; on violation the
// returned object is best-effort.
PriorSpec prior_from_json(const nlohmann::json& j, const std::string& path,
                          std::vector<std::string>& violations,
                          std::vector<std::string>& warnings);
ModelSpec model_from_json(const nlohmann::json& j, const std::string& path,
                          std::vector<std::string>& violations,
                          std::vector<std::string>& warnings);
ExperimentConfig experiment_from_json(const nlohmann::json& j,
                                      const std::string& path,
                                      std::vector<std::string>& violations,
                                      std::vector<std::string>& warnings);

}  // namespace spikecycle::detail
