#pragma once

#include <string>

#include "nsstab/experiment.hpp"

namespace nsstab {

/// Full CLI-side configuration: the experiment plus output controls.
struct CliConfig {
    ExperimentConfig experiment;
    int threads = 0;  // 0 = available parallelism
    std::string out_dir = "out";
    bool quiet = false;
};

/// Thrown for malformed or invalid configuration input; the message names
/// the offending key and the violated constraint.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Parse an INI-style experiment config (sections, key = value pairs,
/// '#' comments). Unknown sections or keys are rejected, all physical
/// parameters are validated before any compute.
CliConfig parse_config_file(const std::string& path);
CliConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

}  // namespace nsstab
