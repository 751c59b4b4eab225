#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scp/errors.hpp"

namespace scp {

// One row of the compressive-strength dataset. Only the columns the power-law
// experiment needs are interpreted; other source columns are ignored.
struct ConcreteRecord {
    double cement = 0.0;
    double slag = 0.0;
    double fly_ash = 0.0;
    double water = 0.0;
    double age = 0.0;       // days
    double strength = 0.0;  // megapascals

    double binder() const { return cement + slag + fly_ash; }
    double water_binder_ratio() const { return water / binder(); }
};

// Load and filter the dataset: keep records with age in [age_lo, age_hi] and
// water/binder ratio in [r_lo, r_hi]. Column headers are matched by keyword
// ("cement", "slag", "ash", "water", "age", "strength"), which covers both
// the published headers and the plain fixture schema. Missing columns raise
// SchemaError; an empty filter result raises EmptyFilterError.
std::vector<ConcreteRecord> load_concrete_csv(const std::string& path, double age_lo,
                                              double age_hi, double r_lo, double r_hi);

// Bootstrap resampling of the strength values with additive Gaussian noise:
// `count` draws with replacement, each plus an independent N(0, noise_sd^2).
std::vector<double> bootstrap_noise(const std::vector<ConcreteRecord>& records,
                                    std::size_t count, double noise_sd, std::uint64_t seed);

}  // namespace scp
