#pragma once

#include <functional>
#include <optional>
#include <string>

#include "scp/solver.hpp"

namespace scp {

// Total variation between mass vectors on a shared partition or grid:
// half the L1 distance. Shape mismatches raise PartitionMismatchError.
double tv_distance(std::span<const double> mass_a, std::span<const double> mass_b);
double tv_distance(const BinnedDensity& a, const BinnedDensity& b);

// Shared setup for the stability and convergence experiments: one prior,
// map, domain, grid and output partition resolution. The experiments build a
// single partition from the union of all observed samples so every solve is
// comparable.
struct SharedExperiment {
    BoxDomain domain;
    QoiMap map;
    DensitySpec prior;
    std::size_t n_observed = 100000;
    std::size_t n_prior = 100000;
    int n_bins = 100;
    std::vector<int> grid_cells = {100, 100};
    std::optional<double> shell_width;  // default: partition bin width
};

// One solve of a synthetic experiment: observed data drawn from the TGD.
ScpSolution solve_synthetic(const DensitySpec& tgd, const SharedExperiment& shared,
                            std::uint64_t seed);

struct StabilityReport {
    double tv_solutions = 0.0;
    double tv_pushforwards = 0.0;
    double tv_tgds = 0.0;
    double identity_gap = 0.0;      // |tv_solutions - tv_pushforwards|
    double inequality_slack = 0.0;  // tv_tgds - tv_pushforwards
};

// Two full solves on a common partition and grid, sharing the prior draws.
// Checks the stability identity tv(solutions) = tv(pushforwards) and the
// bound tv(pushforwards) <= tv(TGDs); the TGD distance is computed from the
// analytic densities on the grid (midpoint rule), not from samples.
StabilityReport stability_experiment(const DensitySpec& tgd_a, const DensitySpec& tgd_b,
                                     const SharedExperiment& shared, std::uint64_t seed);

struct LocalLimitStage {
    int stage = 0;
    double tv_to_limit = 0.0;
    double tv_pushforward_to_limit = 0.0;
};

// Solves every stage TGD and the limit TGD on one partition and reports
// per-stage solution TV to the limit solution.
std::vector<LocalLimitStage> local_limit_experiment(const std::vector<DensitySpec>& sequence,
                                                    const DensitySpec& limit,
                                                    const SharedExperiment& shared,
                                                    std::uint64_t seed);

struct TestFunction {
    std::string name;
    std::function<double(std::span<const double>)> fn;
    double lipschitz = 0.0;  // on the bundled domain; used for quadrature error bounds
};

// Coordinate maps, their product, and a smooth bump.
std::vector<TestFunction> bundled_test_functions();
TestFunction bundled_test_function(const std::string& name);

struct WeakStage {
    int stage = 0;
    std::vector<double> integrals;  // cell-mass weighted sums, one per test function
    std::vector<double> errors;     // |integral - reference|
};

struct WeakTrace {
    std::vector<std::string> function_names;
    std::vector<double> reference;  // integrals of f under the constructed limit
    std::vector<WeakStage> stages;
    double shell_width = 0.0;
};

// Integrals of test functions against the solution cells compared against
// the constructed limit: a direct solve for density limits, shell-conditioned
// prior means for Dirac atoms, and weighted mixtures of the two.
WeakTrace weak_convergence_experiment(const std::vector<DensitySpec>& sequence,
                                      const DensitySpec& limit,
                                      const std::vector<TestFunction>& test_functions,
                                      const SharedExperiment& shared, std::uint64_t seed);

// Cell-center quadrature of f against the solution cells.
double integrate_cells(const ScpSolution& solution,
                       const std::function<double(std::span<const double>)>& f);

struct AuditReport {
    bool box_valid = false;
    double box_volume = 0.0;
    std::size_t n_probes = 0;
    std::size_t degenerate_hits = 0;
    double degenerate_fraction = 0.0;
    double min_gram = 0.0;
    int n_bins = 0;
    std::vector<int> flagged_bins;  // observed mass where the prior pushforward is zero
    double flagged_observed_mass = 0.0;
    int zero_pushforward_bins = 0;
    double min_pushforward_height = 0.0;
    std::string k_clause = "empirically untested";  // the infinitely-many-k condition
};

// Report-only checks of the standing assumptions: box validity, sampled
// rank-degeneracy of the map, and prior pushforward positivity against the
// observed data.
AuditReport assumption_audit(const QoiMap& map, const BoxDomain& domain,
                             const DensitySpec& prior, const DensitySpec& tgd,
                             std::size_t n_probes, std::size_t n_observed,
                             std::size_t n_prior, int n_bins, std::uint64_t seed);

}  // namespace scp
