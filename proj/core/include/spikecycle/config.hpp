// JSON configuration parsing and serialization.
//
// A config document is either a model spec or an experiment config
// (detected by the presence of a "model" key). Parsing never stops at
// the first problem: every violation is collected with a JSON-path
// style location, so a bad file is fixable in one pass.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spikecycle/experiments.hpp"
#include "spikecycle/model.hpp"

namespace spikecycle {

struct ParsedConfig {
  std::optional<ModelSpec> model;
  std::optional<ExperimentConfig> experiment;
  std::vector<std::string> violations;  // empty means usable
  std::vector<std::string> warnings;

  [[nodiscard]] bool ok() const { return violations.empty(); }
};

[[nodiscard]] ParsedConfig parse_config_text(const std::string& text);
[[nodiscard]] ParsedConfig parse_config_file(const std::string& path);

// Canonical JSON forms; parse(serialize(x)) reproduces x.
[[nodiscard]] std::string serialize(const ModelSpec& spec);
[[nodiscard]] std::string serialize(const ExperimentConfig& config);

}  // namespace spikecycle
