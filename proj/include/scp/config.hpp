#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scp/density.hpp"
#include "scp/domain.hpp"

namespace scp {

// Data source for the concrete experiment.
struct CsvDataConfig {
    std::string csv_path;
    double age_lo = 0.0, age_hi = 25.0;
    double r_lo = 0.2, r_hi = 0.4;
    double noise_sd = 5.0;
    std::size_t bootstrap_count = 100000;
};

// Convenience description of a shrinking stage sequence: truncated-Gaussian
// mixtures at the atoms with per-stage scale.
struct ShrinkConfig {
    std::vector<DiracAtom> atoms;
    std::vector<double> scales;
};

// Fully resolved experiment description; one config drives one CLI run.
struct ExperimentConfig {
    std::string experiment;  // solve | stability | local_limit | weak | audit | concrete

    std::string map_id = "ellipse";
    double powerlaw_r = 0.3;
    BoxDomain domain;
    DensitySpec prior;

    std::optional<DensitySpec> tgd;    // synthetic observed-data source
    std::optional<DensitySpec> tgd_b;  // stability partner
    std::vector<DensitySpec> stages;   // local_limit / weak sequence (explicit)
    std::optional<ShrinkConfig> shrink;
    std::optional<DensitySpec> limit;
    std::vector<std::string> test_functions;  // weak mode; default l1, l2, l1l2
    std::optional<CsvDataConfig> data;        // concrete mode

    std::size_t n_observed = 100000;
    std::size_t n_prior = 100000;
    int n_bins = 100;
    std::vector<int> grid_cells = {100, 100};
    std::uint64_t seed = 20200913;
    int replicates = 1;
    std::optional<double> shell_width;
    std::size_t n_solution_samples = 10000;
    std::size_t n_probes = 10000;  // audit mode
};

// Parse a config JSON document (or a manifest JSON, whose embedded "config"
// object is used instead). Structural problems raise ConfigError with the
// offending key path in the message.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& json_text);

// Serialized forms used by both configs and manifests.
std::string config_to_json(const ExperimentConfig& config);

}  // namespace scp
