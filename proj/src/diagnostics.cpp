#include "scp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scp/kernels.hpp"

namespace scp {

double tv_distance(std::span<const double> mass_a, std::span<const double> mass_b) {
    if (mass_a.size() != mass_b.size())
        throw PartitionMismatchError("mass vectors differ in length");
    double s = 0.0;
    for (std::size_t i = 0; i < mass_a.size(); ++i) s += std::fabs(mass_a[i] - mass_b[i]);
    return 0.5 * s;
}

double tv_distance(const BinnedDensity& a, const BinnedDensity& b) {
    if (!(a.partition == b.partition))
        throw PartitionMismatchError("binned densities live on different partitions");
    double s = 0.0;
    for (int i = 0; i < a.partition.n_bins(); ++i)
        s += std::fabs(a.values[i] - b.values[i]) * a.partition.width(i);
    return 0.5 * s;
}

namespace {

constexpr std::uint64_t kTagObserved = 11;
constexpr std::uint64_t kTagPrior = 13;
constexpr std::uint64_t kTagLimit = 17;
constexpr std::uint64_t kTagProbe = 19;
constexpr std::uint64_t kTagStage = 1000;

std::vector<double> observed_values(const DensitySpec& tgd, const SharedExperiment& shared,
                                    std::uint64_t seed) {
    const SampleSet s = sample(tgd, shared.domain, shared.n_observed, seed);
    return kernels::eval_map_points(shared.map, s.points, shared.domain.dim());
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<double> normalized_midpoint_masses(const DensitySpec& spec, const InputGrid& grid) {
    std::vector<double> m = grid_masses_midpoint(spec, grid);
    double s = 0.0;
    for (double v : m) s += v;
    if (s > 0.0)
        for (double& v : m) v /= s;
    return m;
}

}  // namespace

ScpSolution solve_synthetic(const DensitySpec& tgd, const SharedExperiment& shared,
                            std::uint64_t seed) {
    const std::vector<double> obs =
        observed_values(tgd, shared, split_seed(seed, kTagObserved));
    const OutputPartition partition = make_partition(obs, shared.n_bins);
    const SampleSet prior_set =
        sample(shared.prior, shared.domain, shared.n_prior, split_seed(seed, kTagPrior));
    const InputGrid grid(shared.domain, shared.grid_cells);
    return solve_cells(prior_set, obs, partition, grid, shared.map);
}

StabilityReport stability_experiment(const DensitySpec& tgd_a, const DensitySpec& tgd_b,
                                     const SharedExperiment& shared, std::uint64_t seed) {
    const std::vector<double> obs_a =
        observed_values(tgd_a, shared, split_seed(seed, kTagObserved));
    const std::vector<double> obs_b =
        observed_values(tgd_b, shared, split_seed(seed, kTagObserved + 1));

    std::vector<double> all(obs_a);
    all.insert(all.end(), obs_b.begin(), obs_b.end());
    const OutputPartition partition = make_partition(all, shared.n_bins);

    const SampleSet prior_set =
        sample(shared.prior, shared.domain, shared.n_prior, split_seed(seed, kTagPrior));
    const InputGrid grid(shared.domain, shared.grid_cells);

    const ScpSolution sol_a = solve_cells(prior_set, obs_a, partition, grid, shared.map);
    const ScpSolution sol_b = solve_cells(prior_set, obs_b, partition, grid, shared.map);

    StabilityReport r;
    r.tv_solutions = tv_distance(sol_a.cell_mass, sol_b.cell_mass);
    r.tv_pushforwards = tv_distance(sol_a.rho_D, sol_b.rho_D);
    r.tv_tgds = clamp01(tv_distance(normalized_midpoint_masses(tgd_a, grid),
                                    normalized_midpoint_masses(tgd_b, grid)));
    r.identity_gap = std::fabs(r.tv_solutions - r.tv_pushforwards);
    r.inequality_slack = r.tv_tgds - r.tv_pushforwards;
    return r;
}

std::vector<LocalLimitStage> local_limit_experiment(const std::vector<DensitySpec>& sequence,
                                                    const DensitySpec& limit,
                                                    const SharedExperiment& shared,
                                                    std::uint64_t seed) {
    if (sequence.empty()) throw std::invalid_argument("local_limit requires at least one stage");
    if (!limit.has_density()) throw NoDensityError("local_limit limit must have a density");
    for (const auto& stage : sequence)
        if (!stage.has_density()) throw NoDensityError("every stage TGD must have a density");

    std::vector<std::vector<double>> obs(sequence.size());
    for (std::size_t i = 0; i < sequence.size(); ++i)
        obs[i] = observed_values(sequence[i], shared, split_seed(seed, kTagStage + i));
    const std::vector<double> obs_lim =
        observed_values(limit, shared, split_seed(seed, kTagLimit));

    std::vector<double> all(obs_lim);
    for (const auto& o : obs) all.insert(all.end(), o.begin(), o.end());
    const OutputPartition partition = make_partition(all, shared.n_bins);

    const SampleSet prior_set =
        sample(shared.prior, shared.domain, shared.n_prior, split_seed(seed, kTagPrior));
    const InputGrid grid(shared.domain, shared.grid_cells);

    const ScpSolution sol_lim = solve_cells(prior_set, obs_lim, partition, grid, shared.map);

    std::vector<LocalLimitStage> out;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        const ScpSolution sol = solve_cells(prior_set, obs[i], partition, grid, shared.map);
        LocalLimitStage st;
        st.stage = static_cast<int>(i);
        st.tv_to_limit = tv_distance(sol.cell_mass, sol_lim.cell_mass);
        st.tv_pushforward_to_limit = tv_distance(sol.rho_D, sol_lim.rho_D);
        out.push_back(st);
    }
    return out;
}

std::vector<TestFunction> bundled_test_functions() {
    std::vector<TestFunction> fs;
    fs.push_back({"l1", [](std::span<const double> x) { return x[0]; }, 1.0});
    fs.push_back({"l2", [](std::span<const double> x) { return x[1]; }, 1.0});
    fs.push_back({"l1l2", [](std::span<const double> x) { return x[0] * x[1]; },
                  7.0711});  // sup of ||(x2, x1)|| on [-5,5]^2
    fs.push_back({"bump",
                  [](std::span<const double> x) {
                      double r2 = 0.0;
                      for (double v : x) r2 += v * v;
                      return std::exp(-r2 / 8.0);
                  },
                  0.3033});  // max gradient norm of exp(-r^2/8), attained at r = 2
    return fs;
}

TestFunction bundled_test_function(const std::string& name) {
    for (auto& f : bundled_test_functions())
        if (f.name == name) return f;
    throw ConfigError("unknown test function '" + name + "'");
}

double integrate_cells(const ScpSolution& solution,
                       const std::function<double(std::span<const double>)>& f) {
    double s = 0.0;
    for (long c = 0; c < solution.grid.n_cells(); ++c) {
        const double m = solution.cell_mass[c];
        if (m == 0.0) continue;
        s += m * f(solution.grid.cell_center(c));
    }
    return s;
}

namespace {

// Integral of each test function under the constructed limit measure:
// direct solve for density parts, shell-conditioned prior means for Dirac
// atoms, weighted recursion for convex combinations.
std::vector<double> limit_reference(const DensitySpec& limit,
                                    const std::vector<TestFunction>& fs,
                                    const SharedExperiment& shared, const SampleSet& prior_set,
                                    const OutputPartition& partition, double shell_width,
                                    std::uint64_t seed) {
    std::vector<double> ref(fs.size(), 0.0);
    switch (limit.kind) {
        case DensityKind::uniform:
        case DensityKind::gaussian_mixture: {
            const std::vector<double> obs =
                observed_values(limit, shared, split_seed(seed, kTagLimit));
            const InputGrid grid(shared.domain, shared.grid_cells);
            const ScpSolution sol = solve_cells(prior_set, obs, partition, grid, shared.map);
            for (std::size_t k = 0; k < fs.size(); ++k) ref[k] = integrate_cells(sol, fs[k].fn);
            return ref;
        }
        case DensityKind::dirac_mixture: {
            for (const auto& atom : limit.atoms) {
                const double q_star = evaluate(shared.map, atom.center);
                const SampleSet shell =
                    contour_conditional(prior_set, shared.map, q_star, shell_width);
                for (std::size_t k = 0; k < fs.size(); ++k) {
                    double mean = 0.0;
                    for (std::size_t i = 0; i < shell.count(); ++i)
                        mean += fs[k].fn(shell.point(i));
                    ref[k] += atom.weight * mean / static_cast<double>(shell.count());
                }
            }
            return ref;
        }
        case DensityKind::convex_combination: {
            for (std::size_t p = 0; p < limit.parts.size(); ++p) {
                if (limit.part_weights[p] == 0.0) continue;
                const std::vector<double> part_ref =
                    limit_reference(*limit.parts[p], fs, shared, prior_set, partition,
                                    shell_width, split_seed(seed, kTagLimit + 100 + p));
                for (std::size_t k = 0; k < fs.size(); ++k)
                    ref[k] += limit.part_weights[p] * part_ref[k];
            }
            return ref;
        }
    }
    return ref;
}

}  // namespace

WeakTrace weak_convergence_experiment(const std::vector<DensitySpec>& sequence,
                                      const DensitySpec& limit,
                                      const std::vector<TestFunction>& test_functions,
                                      const SharedExperiment& shared, std::uint64_t seed) {
    if (sequence.empty()) throw std::invalid_argument("weak experiment requires stages");
    for (const auto& stage : sequence)
        if (!stage.has_density()) throw NoDensityError("every stage TGD must have a density");

    std::vector<std::vector<double>> obs(sequence.size());
    for (std::size_t i = 0; i < sequence.size(); ++i)
        obs[i] = observed_values(sequence[i], shared, split_seed(seed, kTagStage + i));

    std::vector<double> all;
    for (const auto& o : obs) all.insert(all.end(), o.begin(), o.end());
    const OutputPartition partition = make_partition(all, shared.n_bins);

    const SampleSet prior_set =
        sample(shared.prior, shared.domain, shared.n_prior, split_seed(seed, kTagPrior));
    const InputGrid grid(shared.domain, shared.grid_cells);

    WeakTrace trace;
    trace.shell_width = shared.shell_width.value_or(partition.width(0));
    for (const auto& f : test_functions) trace.function_names.push_back(f.name);
    trace.reference = limit_reference(limit, test_functions, shared, prior_set, partition,
                                      trace.shell_width, seed);

    for (std::size_t i = 0; i < sequence.size(); ++i) {
        const ScpSolution sol = solve_cells(prior_set, obs[i], partition, grid, shared.map);
        WeakStage st;
        st.stage = static_cast<int>(i);
        for (std::size_t k = 0; k < test_functions.size(); ++k) {
            const double v = integrate_cells(sol, test_functions[k].fn);
            st.integrals.push_back(v);
            st.errors.push_back(std::fabs(v - trace.reference[k]));
        }
        trace.stages.push_back(std::move(st));
    }
    return trace;
}

AuditReport assumption_audit(const QoiMap& map, const BoxDomain& domain,
                             const DensitySpec& prior, const DensitySpec& tgd,
                             std::size_t n_probes, std::size_t n_observed,
                             std::size_t n_prior, int n_bins, std::uint64_t seed) {
    AuditReport rep;
    rep.box_valid = true;  // BoxDomain construction enforces the invariants
    rep.box_volume = domain.volume();
    rep.n_probes = n_probes;

    const SampleSet probes =
        sample(DensitySpec::uniform(), domain, n_probes, split_seed(seed, kTagProbe));
    double min_gram = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < probes.count(); ++i) {
        try {
            min_gram = std::min(min_gram, gram_factor(map, probes.point(i)));
        } catch (const DegenerateJacobianError&) {
            ++rep.degenerate_hits;
        }
    }
    rep.degenerate_fraction =
        static_cast<double>(rep.degenerate_hits) / static_cast<double>(n_probes);
    rep.min_gram = std::isfinite(min_gram) ? min_gram : 0.0;

    const SampleSet tgd_set = sample(tgd, domain, n_observed, split_seed(seed, kTagObserved));
    const std::vector<double> obs = kernels::eval_map_points(map, tgd_set.points, domain.dim());
    const OutputPartition partition = make_partition(obs, n_bins);
    const BinnedDensity observed = histogram_density(obs, partition);

    // Tally the prior pushforward directly: a full support mismatch (no prior
    // sample in range) must surface as flagged bins, not as an error.
    const SampleSet prior_set = sample(prior, domain, n_prior, split_seed(seed, kTagPrior));
    const std::vector<double> prior_q =
        kernels::eval_map_points(map, prior_set.points, domain.dim());
    const auto prior_counts = kernels::bin_counts(partition, prior_q);

    rep.n_bins = n_bins;
    rep.min_pushforward_height = std::numeric_limits<double>::infinity();
    for (int b = 0; b < n_bins; ++b) {
        const double height = static_cast<double>(prior_counts.counts[b]) /
                              (static_cast<double>(n_prior) * partition.width(b));
        rep.min_pushforward_height = std::min(rep.min_pushforward_height, height);
        if (prior_counts.counts[b] == 0) {
            ++rep.zero_pushforward_bins;
            if (observed.values[b] > 0.0) {
                rep.flagged_bins.push_back(b);
                rep.flagged_observed_mass += observed.mass(b);
            }
        }
    }
    return rep;
}

}  // namespace scp
