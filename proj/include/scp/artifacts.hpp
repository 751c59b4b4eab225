#pragma once

#include <string>

#include "scp/partition.hpp"
#include "scp/solver.hpp"

namespace scp {

// Shortest round-trip text form of a double (%.17g).
std::string format_double(double v);

// All artifact writes go through a temp file plus rename.
void write_text_atomic(const std::string& path, const std::string& content);

// CSV schemas
//   binned density:  bin_left, bin_right, height
//   heatmap:         cell_i, cell_j, center_l1, center_l2, mass, density
//   samples:         one row per point, one column per coordinate
std::string binned_density_csv(const BinnedDensity& d);
std::string heatmap_csv(const ScpSolution& solution);
std::string samples_csv(const SampleSet& samples);

}  // namespace scp
