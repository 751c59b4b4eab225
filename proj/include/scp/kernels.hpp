#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scp/density.hpp"
#include "scp/grid.hpp"
#include "scp/partition.hpp"
#include "scp/qoi_map.hpp"

namespace scp::kernels {

// Every kernel has a plain serial reference implementation and an OpenMP
// variant. Both produce bit-identical results: random draws use one
// counter-based stream per sample index and histogram tallies are integers,
// so thread count and scheduling never change the output.
enum class Exec { serial, parallel };

Exec default_exec();
void set_default_exec(Exec mode);

// i.i.d. draws, one Philox stream per index. Returns count*dim doubles.
std::vector<double> sample_points_serial(const Sampler& sampler, int dim, std::size_t count,
                                         std::uint64_t seed);
std::vector<double> sample_points_parallel(const Sampler& sampler, int dim, std::size_t count,
                                           std::uint64_t seed);
std::vector<double> sample_points(const Sampler& sampler, int dim, std::size_t count,
                                  std::uint64_t seed);
std::vector<double> sample_points(const Sampler& sampler, int dim, std::size_t count,
                                  std::uint64_t seed, Exec mode);

// Map evaluation over a flattened point array.
std::vector<double> eval_map_points_serial(const QoiMap& map, std::span<const double> pts,
                                           int dim);
std::vector<double> eval_map_points_parallel(const QoiMap& map, std::span<const double> pts,
                                             int dim);
std::vector<double> eval_map_points(const QoiMap& map, std::span<const double> pts, int dim);
std::vector<double> eval_map_points(const QoiMap& map, std::span<const double> pts, int dim,
                                    Exec mode);

// Density evaluation over a flattened point array.
std::vector<double> density_points_serial(const DensityEvaluator& density,
                                          std::span<const double> pts, int dim);
std::vector<double> density_points_parallel(const DensityEvaluator& density,
                                            std::span<const double> pts, int dim);
std::vector<double> density_points(const DensityEvaluator& density, std::span<const double> pts,
                                   int dim);
std::vector<double> density_points(const DensityEvaluator& density, std::span<const double> pts,
                                   int dim, Exec mode);

struct BinCounts {
    std::vector<long long> counts;
    long long outside = 0;
};

BinCounts bin_counts_serial(const OutputPartition& partition, std::span<const double> q);
BinCounts bin_counts_parallel(const OutputPartition& partition, std::span<const double> q);
BinCounts bin_counts(const OutputPartition& partition, std::span<const double> q);
BinCounts bin_counts(const OutputPartition& partition, std::span<const double> q, Exec mode);

// Joint (output bin, input cell) occupancy of sample points and their map
// values; the backbone of the importance-sampling assembly.
struct JointCounts {
    std::vector<long long> joint;       // n_bins * n_cells, bin-major
    std::vector<long long> bin_totals;  // n_bins
    long long outside = 0;              // q outside the partition
};

JointCounts joint_counts_serial(const OutputPartition& partition, const InputGrid& grid,
                                std::span<const double> pts, std::span<const double> q);
JointCounts joint_counts_parallel(const OutputPartition& partition, const InputGrid& grid,
                                  std::span<const double> pts, std::span<const double> q);
JointCounts joint_counts(const OutputPartition& partition, const InputGrid& grid,
                         std::span<const double> pts, std::span<const double> q);
JointCounts joint_counts(const OutputPartition& partition, const InputGrid& grid,
                         std::span<const double> pts, std::span<const double> q, Exec mode);

std::vector<long long> cell_counts_serial(const InputGrid& grid, std::span<const double> pts);
std::vector<long long> cell_counts_parallel(const InputGrid& grid, std::span<const double> pts);
std::vector<long long> cell_counts(const InputGrid& grid, std::span<const double> pts);
std::vector<long long> cell_counts(const InputGrid& grid, std::span<const double> pts, Exec mode);

// cell_mass[c] = sum_i bin_mass[i] * joint[i][c] / bin_totals[i], skipping
// bins with no prior occupancy. Parallel over cells with an ordered inner
// loop, so the floating-point result is identical to the serial reference.
std::vector<double> assemble_cell_mass_serial(std::span<const double> bin_mass,
                                              const JointCounts& joint, long n_cells);
std::vector<double> assemble_cell_mass_parallel(std::span<const double> bin_mass,
                                                const JointCounts& joint, long n_cells);
std::vector<double> assemble_cell_mass(std::span<const double> bin_mass,
                                       const JointCounts& joint, long n_cells);
std::vector<double> assemble_cell_mass(std::span<const double> bin_mass,
                                       const JointCounts& joint, long n_cells, Exec mode);

}  // namespace scp::kernels
