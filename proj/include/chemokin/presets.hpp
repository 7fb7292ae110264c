#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chemokin/config.hpp"

namespace chemokin {

struct Preset {
  std::string name;
  std::string description;
  std::string json;
};

// Built-in configurations, in a fixed order.
const std::vector<Preset>& presets();
std::optional<Preset> find_preset(const std::string& name);

// A preset name or a path to a JSON file. Throws ConfigError for unknown
// names, unreadable files and invalid documents.
ExperimentConfig load_config(const std::string& name_or_path);

}  // namespace chemokin
