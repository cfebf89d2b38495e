#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fiberdeco/config.hpp"

namespace fiberdeco {

/// Numerical/convergence failure while running an experiment (CLI exit 3, as
/// opposed to config errors which exit 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// In-memory experiment result: (file suffix, file content). The CLI writes
/// each entry to <prefix>_<suffix>, atomically, after the run completes.
struct ExperimentOutput {
  std::vector<std::pair<std::string, std::string>> files;
};

struct ConfigKeySpec {
  const char* key;
  const char* value;  // default, as config text
  const char* help;
};

const std::vector<std::string>& experiment_names();
const std::vector<ConfigKeySpec>& config_keys(const std::string& experiment);

/// Default config as parseable text (key = value lines with comments).
std::string default_config_text(const std::string& experiment);

ExperimentOutput run_depolarize(const KeyValueConfig& config);
ExperimentOutput run_roundtrip(const KeyValueConfig& config);
ExperimentOutput run_pmd_scan(const KeyValueConfig& config);
ExperimentOutput run_franson_sweep(const KeyValueConfig& config);

/// Dispatch by experiment name (depolarize | roundtrip | pmd-scan |
/// franson-sweep).
ExperimentOutput run_experiment(const std::string& experiment,
                                const KeyValueConfig& config);

}  // namespace fiberdeco
