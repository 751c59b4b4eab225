#pragma once

#include <optional>

#include "scp/density.hpp"
#include "scp/grid.hpp"
#include "scp/partition.hpp"
#include "scp/pushforward.hpp"
#include "scp/qoi_map.hpp"

namespace scp {

// Gridded calibration solution: cell masses assembled by importance sampling,
// plus the pointwise density evaluator and enough context to sample from it.
class ScpSolution {
public:
    InputGrid grid;
    std::vector<double> cell_mass;   // sums to 1 after renormalization
    std::vector<int> flagged_bins;   // observed mass with zero prior occupancy
    double unassigned_mass = 0.0;    // observed mass dropped before renormalization
    BinnedDensity rho_D;             // observed pushforward histogram (mass 1)
    BinnedDensity rho_pD;            // prior pushforward histogram (in-range mass 1)
    double prior_in_range = 1.0;     // fraction of prior draws inside the partition
    DensitySpec prior;
    QoiMap map;

    // Pointwise solution density: rho_D(Q(x)) * rho_p(x) / rho_pD(Q(x)),
    // with the prior pushforward scaled to the full prior (not just the
    // in-partition part) and flagged bins contributing zero, so the values
    // integrate to ~1 and match the cell masses. Requires prepare().
    double density_at(std::span<const double> x) const;
    void prepare();  // builds the cached prior evaluator

private:
    std::shared_ptr<const DensityEvaluator> prior_density_;
};

// Pointwise update formula with binned lookups at q = Q(x). Returns 0 when
// the observed histogram is 0 at q (including q outside the partition);
// throws SupportMismatchError when observed mass sits where the prior
// pushforward estimate vanishes.
double update_density(std::span<const double> x, const DensityEvaluator& prior_density,
                      const BinnedDensity& rho_D, const BinnedDensity& rho_pD,
                      const QoiMap& map);
double update_density(std::span<const double> x, const DensitySpec& prior,
                      const BoxDomain& domain, const BinnedDensity& rho_D,
                      const BinnedDensity& rho_pD, const QoiMap& map);

// Importance-sampling assembly over the output partition. Bins carrying
// observed mass but no prior samples are flagged and their mass reported as
// unassigned; more than 20% unassigned raises SupportMismatchError.
ScpSolution solve_cells(const SampleSet& prior_samples, std::span<const double> observed_q,
                        const OutputPartition& partition, const InputGrid& grid,
                        const QoiMap& map);

// Accept-reject over fresh prior draws with weights proportional to
// rho_D(Q) / rho_pD(Q). Acceptance below 1e-4 raises WeightDegeneracyError.
SampleSet sample_solution(const ScpSolution& solution, const DensitySpec& prior,
                          std::size_t count, std::uint64_t seed);

// Prior samples restricted to the shell |Q - q*| <= shell_width / 2; the
// empirical stand-in for the conditional measure on the contour. Fewer than
// 500 retained samples raises ShellStarvationError.
SampleSet contour_conditional(const SampleSet& prior_samples, const QoiMap& map, double q_star,
                              double shell_width);

}  // namespace scp
