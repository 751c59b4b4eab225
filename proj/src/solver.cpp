#include "scp/solver.hpp"

#include <cmath>

#include "scp/kernels.hpp"

namespace scp {

namespace {

void require_shared_partition(const BinnedDensity& a, const BinnedDensity& b) {
    if (!(a.partition == b.partition))
        throw PartitionMismatchError("binned densities must share one output partition");
}

// Draw a block of prior points with per-index streams and decide acceptance
// from the per-bin weight ratio. Index-addressed randomness keeps the accept
// set identical whether the block is processed serially or in parallel.
void draw_accept_block(const Sampler& sampler, const QoiMap& map,
                       const OutputPartition& partition, const std::vector<double>& ratio,
                       std::uint64_t seed, std::size_t base, std::size_t block, int dim,
                       std::vector<double>& pts, std::vector<char>& accept) {
    std::exception_ptr err;
    const bool serial = kernels::default_exec() == kernels::Exec::serial;
#pragma omp parallel for schedule(static) if (!serial)
    for (long long i = 0; i < static_cast<long long>(block); ++i) {
        if (err) continue;
        try {
            PhiloxStream stream(seed, base + static_cast<std::uint64_t>(i));
            const std::span<double> p{pts.data() + i * dim, static_cast<std::size_t>(dim)};
            sampler.draw(stream, p);
            const double q = evaluate(map, p);
            const int b = partition.find_bin(q);
            const double r = b < 0 ? 0.0 : ratio[b];
            accept[i] = (r > 0.0 && stream.next_double() < r) ? 1 : 0;
        } catch (...) {
#pragma omp critical(scp_draw_accept)
            {
                if (!err) err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace

double update_density(std::span<const double> x, const DensityEvaluator& prior_density,
                      const BinnedDensity& rho_D, const BinnedDensity& rho_pD,
                      const QoiMap& map) {
    require_shared_partition(rho_D, rho_pD);
    const double q = evaluate(map, x);
    const double observed = rho_D.value_at(q);
    if (observed == 0.0) return 0.0;
    const double scaling = rho_pD.value_at(q);
    if (scaling == 0.0)
        throw SupportMismatchError(
            "observed mass where the prior pushforward estimate vanishes (zero scaling factor)");
    return observed * prior_density(x) / scaling;
}

double update_density(std::span<const double> x, const DensitySpec& prior,
                      const BoxDomain& domain, const BinnedDensity& rho_D,
                      const BinnedDensity& rho_pD, const QoiMap& map) {
    const DensityEvaluator prior_density(prior, domain);
    return update_density(x, prior_density, rho_D, rho_pD, map);
}

void ScpSolution::prepare() {
    prior_density_ = std::make_shared<const DensityEvaluator>(prior, grid.box);
}

double ScpSolution::density_at(std::span<const double> x) const {
    const double q = evaluate(map, x);
    const int bin = rho_D.partition.find_bin(q);
    if (bin < 0) return 0.0;
    const double observed = rho_D.values[bin];
    if (observed == 0.0) return 0.0;
    const double scaling = rho_pD.values[bin] * prior_in_range;
    if (scaling == 0.0) return 0.0;  // flagged bin: its mass was dropped
    const double renorm = unassigned_mass < 1.0 ? 1.0 / (1.0 - unassigned_mass) : 1.0;
    return renorm * observed * (*prior_density_)(x) / scaling;
}

ScpSolution solve_cells(const SampleSet& prior_samples, std::span<const double> observed_q,
                        const OutputPartition& partition, const InputGrid& grid,
                        const QoiMap& map) {
    if (observed_q.empty()) throw std::invalid_argument("solve_cells requires observed data");
    if (prior_samples.count() < 10 * static_cast<std::size_t>(partition.n_bins()))
        throw std::invalid_argument("solve_cells requires at least 10 prior samples per bin");
    if (!prior_samples.source.has_density())
        throw NoDensityError("prior sample set must come from a density");

    ScpSolution sol;
    sol.grid = grid;
    sol.map = map;
    sol.prior = prior_samples.source;

    sol.rho_D = histogram_density(observed_q, partition);
    const std::vector<double> observed_mass = sol.rho_D.masses();

    const std::vector<double> prior_q =
        kernels::eval_map_points(map, prior_samples.points, grid.box.dim());
    const kernels::JointCounts joint =
        kernels::joint_counts(partition, grid, prior_samples.points, prior_q);

    long long prior_inside = 0;
    for (long long t : joint.bin_totals) prior_inside += t;
    if (prior_inside == 0)
        throw SupportMismatchError("no prior sample maps into the output partition");
    sol.prior_in_range =
        static_cast<double>(prior_inside) / static_cast<double>(prior_samples.count());

    // prior pushforward histogram (in-range mass 1), reusing the joint tallies
    sol.rho_pD.partition = partition;
    sol.rho_pD.values.resize(partition.n_bins());
    double pf_mass = 0.0;
    for (int b = 0; b < partition.n_bins(); ++b) {
        const double w = partition.width(b);
        sol.rho_pD.values[b] =
            static_cast<double>(joint.bin_totals[b]) / (static_cast<double>(prior_inside) * w);
        pf_mass += sol.rho_pD.values[b] * w;
    }
    sol.rho_pD.total_mass = pf_mass;
    sol.rho_pD.outside_count =
        static_cast<long long>(prior_samples.count()) - prior_inside;

    double unassigned = 0.0;
    for (int b = 0; b < partition.n_bins(); ++b) {
        if (observed_mass[b] > 0.0 && joint.bin_totals[b] == 0) {
            sol.flagged_bins.push_back(b);
            unassigned += observed_mass[b];
        }
    }
    sol.unassigned_mass = unassigned;
    if (unassigned > 0.2)
        throw SupportMismatchError(
            "more than 20% of observed mass falls in bins with no prior support");

    sol.cell_mass = kernels::assemble_cell_mass(observed_mass, joint, grid.n_cells());
    double total = 0.0;
    for (double m : sol.cell_mass) total += m;
    if (total > 0.0) {
        const double inv = 1.0 / total;
        for (double& m : sol.cell_mass) m *= inv;
    }
    sol.prepare();
    return sol;
}

SampleSet sample_solution(const ScpSolution& solution, const DensitySpec& prior,
                          std::size_t count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_solution requires count >= 1");
    require_shared_partition(solution.rho_D, solution.rho_pD);
    const BoxDomain& box = solution.grid.box;
    const int dim = box.dim();

    // per-bin acceptance ratio rho_D / rho_pD, scaled by its maximum
    const int nb = solution.rho_D.partition.n_bins();
    std::vector<double> ratio(nb, 0.0);
    double max_ratio = 0.0;
    for (int b = 0; b < nb; ++b) {
        const double pf = solution.rho_pD.values[b];
        if (pf > 0.0 && solution.rho_D.values[b] > 0.0) {
            ratio[b] = solution.rho_D.values[b] / pf;
            max_ratio = std::max(max_ratio, ratio[b]);
        }
    }
    if (!(max_ratio > 0.0))
        throw WeightDegeneracyError("all acceptance weights are zero");
    for (double& r : ratio) r /= max_ratio;

    const Sampler sampler(prior, box);
    const std::uint64_t draw_seed = split_seed(seed, 0x50111u);

    SampleSet out;
    out.dim = dim;
    out.seed = seed;
    out.source = prior;
    out.points.reserve(count * dim);

    const std::size_t block = std::max<std::size_t>(4096, count);
    std::size_t next_index = 0;
    std::size_t attempts = 0;
    while (out.points.size() < count * dim) {
        // draw a block in parallel, then accept in index order
        std::vector<double> pts(block * dim);
        std::vector<char> accept(block, 0);
        draw_accept_block(sampler, solution.map, solution.rho_D.partition, ratio, draw_seed,
                          next_index, block, dim, pts, accept);
        for (std::size_t i = 0; i < block && out.points.size() < count * dim; ++i) {
            ++attempts;
            if (accept[i])
                out.points.insert(out.points.end(), pts.begin() + i * dim,
                                  pts.begin() + (i + 1) * dim);
        }
        next_index += block;
        if (attempts >= 100000 &&
            static_cast<double>(out.points.size() / dim) < 1e-4 * static_cast<double>(attempts))
            throw WeightDegeneracyError("acceptance rate below 1e-4 while sampling the solution");
    }
    return out;
}

SampleSet contour_conditional(const SampleSet& prior_samples, const QoiMap& map, double q_star,
                              double shell_width) {
    if (!(shell_width > 0.0))
        throw std::invalid_argument("contour_conditional requires a positive shell width");
    const int dim = prior_samples.dim;
    const std::vector<double> q =
        kernels::eval_map_points(map, prior_samples.points, dim);
    SampleSet out;
    out.dim = dim;
    out.seed = prior_samples.seed;
    out.source = prior_samples.source;
    const double half = 0.5 * shell_width;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (std::fabs(q[i] - q_star) <= half) {
            const auto p = prior_samples.point(i);
            out.points.insert(out.points.end(), p.begin(), p.end());
        }
    }
    if (out.count() < 500)
        throw ShellStarvationError(
            "fewer than 500 prior samples in the shell; widen it or draw more prior samples");
    return out;
}

}  // namespace scp
