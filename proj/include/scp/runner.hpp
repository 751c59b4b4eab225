#pragma once

#include <string>
#include <vector>

#include "scp/config.hpp"

namespace scp {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kRngName = "philox4x32-10";

struct RunResult {
    std::vector<std::string> outputs;  // artifact file names, relative to out_dir
    std::string summary;               // one-paragraph headline for the CLI
};

// Execute the configured experiment and write its artifact bundle (CSV/JSON
// plus a manifest that allows a bit-identical rerun) into out_dir.
RunResult run_experiment(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace scp
