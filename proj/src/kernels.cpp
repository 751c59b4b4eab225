#include "scp/kernels.hpp"

#include <exception>
#include <cstddef>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace scp::kernels {

namespace {
Exec g_default = Exec::parallel;

// Exceptions may not escape an OpenMP region; capture the first one and
// rethrow after the join.
struct ErrorLatch {
    std::exception_ptr err;
    void capture() {
#pragma omp critical(scp_error_latch)
        {
            if (!err) err = std::current_exception();
        }
    }
    void rethrow() const {
        if (err) std::rethrow_exception(err);
    }
};
}  // namespace

Exec default_exec() { return g_default; }
void set_default_exec(Exec mode) { g_default = mode; }

// ---------------------------------------------------------------------------
// sampling

std::vector<double> sample_points_serial(const Sampler& sampler, int dim, std::size_t count,
                                         std::uint64_t seed) {
    std::vector<double> pts(count * dim);
    for (std::size_t i = 0; i < count; ++i) {
        PhiloxStream stream(seed, i);
        sampler.draw(stream, {pts.data() + i * dim, static_cast<std::size_t>(dim)});
    }
    return pts;
}

std::vector<double> sample_points_parallel(const Sampler& sampler, int dim, std::size_t count,
                                           std::uint64_t seed) {
    std::vector<double> pts(count * dim);
    ErrorLatch latch;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
        if (latch.err) continue;
        try {
            PhiloxStream stream(seed, static_cast<std::uint64_t>(i));
            sampler.draw(stream, {pts.data() + i * dim, static_cast<std::size_t>(dim)});
        } catch (...) {
            latch.capture();
        }
    }
    latch.rethrow();
    return pts;
}

std::vector<double> sample_points(const Sampler& sampler, int dim, std::size_t count,
                                  std::uint64_t seed, Exec mode) {
    return mode == Exec::serial ? sample_points_serial(sampler, dim, count, seed)
                                : sample_points_parallel(sampler, dim, count, seed);
}
std::vector<double> sample_points(const Sampler& sampler, int dim, std::size_t count,
                                  std::uint64_t seed) {
    return sample_points(sampler, dim, count, seed, g_default);
}

// ---------------------------------------------------------------------------
// pointwise maps

std::vector<double> eval_map_points_serial(const QoiMap& map, std::span<const double> pts,
                                           int dim) {
    const std::size_t count = pts.size() / dim;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = evaluate(map, pts.subspan(i * dim, dim));
    return out;
}

std::vector<double> eval_map_points_parallel(const QoiMap& map, std::span<const double> pts,
                                             int dim) {
    const std::size_t count = pts.size() / dim;
    std::vector<double> out(count);
    ErrorLatch latch;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
        if (latch.err) continue;
        try {
            out[i] = evaluate(map, pts.subspan(i * dim, dim));
        } catch (...) {
            latch.capture();
        }
    }
    latch.rethrow();
    return out;
}

std::vector<double> eval_map_points(const QoiMap& map, std::span<const double> pts, int dim,
                                    Exec mode) {
    return mode == Exec::serial ? eval_map_points_serial(map, pts, dim)
                                : eval_map_points_parallel(map, pts, dim);
}
std::vector<double> eval_map_points(const QoiMap& map, std::span<const double> pts, int dim) {
    return eval_map_points(map, pts, dim, g_default);
}

std::vector<double> density_points_serial(const DensityEvaluator& density,
                                          std::span<const double> pts, int dim) {
    const std::size_t count = pts.size() / dim;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = density(pts.subspan(i * dim, dim));
    return out;
}

std::vector<double> density_points_parallel(const DensityEvaluator& density,
                                            std::span<const double> pts, int dim) {
    const std::size_t count = pts.size() / dim;
    std::vector<double> out(count);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(count); ++i)
        out[i] = density(pts.subspan(i * dim, dim));
    return out;
}

std::vector<double> density_points(const DensityEvaluator& density, std::span<const double> pts,
                                   int dim, Exec mode) {
    return mode == Exec::serial ? density_points_serial(density, pts, dim)
                                : density_points_parallel(density, pts, dim);
}
std::vector<double> density_points(const DensityEvaluator& density, std::span<const double> pts,
                                   int dim) {
    return density_points(density, pts, dim, g_default);
}

// ---------------------------------------------------------------------------
// integer tallies

BinCounts bin_counts_serial(const OutputPartition& partition, std::span<const double> q) {
    BinCounts out;
    out.counts.assign(partition.n_bins(), 0);
    for (double v : q) {
        const int i = partition.find_bin(v);
        if (i < 0)
            ++out.outside;
        else
            ++out.counts[i];
    }
    return out;
}

BinCounts bin_counts_parallel(const OutputPartition& partition, std::span<const double> q) {
    const int nb = partition.n_bins();
    BinCounts out;
    out.counts.assign(nb, 0);
#pragma omp parallel
    {
        std::vector<long long> local(nb, 0);
        long long local_out = 0;
#pragma omp for schedule(static) nowait
        for (long long i = 0; i < static_cast<long long>(q.size()); ++i) {
            const int b = partition.find_bin(q[i]);
            if (b < 0)
                ++local_out;
            else
                ++local[b];
        }
#pragma omp critical(scp_bin_counts)
        {
            for (int b = 0; b < nb; ++b) out.counts[b] += local[b];
            out.outside += local_out;
        }
    }
    return out;
}

BinCounts bin_counts(const OutputPartition& partition, std::span<const double> q, Exec mode) {
    return mode == Exec::serial ? bin_counts_serial(partition, q)
                                : bin_counts_parallel(partition, q);
}
BinCounts bin_counts(const OutputPartition& partition, std::span<const double> q) {
    return bin_counts(partition, q, g_default);
}

JointCounts joint_counts_serial(const OutputPartition& partition, const InputGrid& grid,
                                std::span<const double> pts, std::span<const double> q) {
    const int nb = partition.n_bins();
    const long nc = grid.n_cells();
    const int dim = grid.box.dim();
    JointCounts out;
    out.joint.assign(static_cast<std::size_t>(nb) * nc, 0);
    out.bin_totals.assign(nb, 0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        const int b = partition.find_bin(q[i]);
        if (b < 0) {
            ++out.outside;
            continue;
        }
        const long c = grid.cell_of(pts.subspan(i * dim, dim));
        if (c < 0) continue;  // sample sets always lie in the box
        ++out.joint[static_cast<std::size_t>(b) * nc + c];
        ++out.bin_totals[b];
    }
    return out;
}

JointCounts joint_counts_parallel(const OutputPartition& partition, const InputGrid& grid,
                                  std::span<const double> pts, std::span<const double> q) {
    const int nb = partition.n_bins();
    const long nc = grid.n_cells();
    const int dim = grid.box.dim();
    const std::size_t flat = static_cast<std::size_t>(nb) * nc;
    JointCounts out;
    out.joint.assign(flat, 0);
    out.bin_totals.assign(nb, 0);

    int n_threads = 1;
#ifdef _OPENMP
    n_threads = omp_get_max_threads();
#endif
    // per-thread tallies merged slice-wise in a second parallel pass; a
    // single critical-section merge of the nb*nc table dominates at
    // experiment scale
    std::vector<std::vector<long long>> locals(n_threads);
    std::vector<std::vector<long long>> local_tots(n_threads);
    std::vector<long long> local_out(n_threads, 0);
#pragma omp parallel
    {
        int tid = 0;
#ifdef _OPENMP
        tid = omp_get_thread_num();
#endif
        locals[tid].assign(flat, 0);
        local_tots[tid].assign(nb, 0);
#pragma omp for schedule(static)
        for (long long i = 0; i < static_cast<long long>(q.size()); ++i) {
            const int b = partition.find_bin(q[i]);
            if (b < 0) {
                ++local_out[tid];
                continue;
            }
            const long c = grid.cell_of(pts.subspan(i * dim, dim));
            if (c < 0) continue;
            ++locals[tid][static_cast<std::size_t>(b) * nc + c];
            ++local_tots[tid][b];
        }
#pragma omp for schedule(static)
        for (long long k = 0; k < static_cast<long long>(flat); ++k) {
            long long s = 0;
            for (int t = 0; t < n_threads; ++t) s += locals[t][k];
            out.joint[k] = s;
        }
    }
    for (int t = 0; t < n_threads; ++t) {
        for (int b = 0; b < nb; ++b) out.bin_totals[b] += local_tots[t][b];
        out.outside += local_out[t];
    }
    return out;
}

JointCounts joint_counts(const OutputPartition& partition, const InputGrid& grid,
                         std::span<const double> pts, std::span<const double> q, Exec mode) {
    // merge-bound below one point per table entry; the serial tally wins there
    const std::size_t flat =
        static_cast<std::size_t>(partition.n_bins()) * static_cast<std::size_t>(grid.n_cells());
    if (mode == Exec::serial || q.size() < flat)
        return joint_counts_serial(partition, grid, pts, q);
    return joint_counts_parallel(partition, grid, pts, q);
}
JointCounts joint_counts(const OutputPartition& partition, const InputGrid& grid,
                         std::span<const double> pts, std::span<const double> q) {
    return joint_counts(partition, grid, pts, q, g_default);
}

std::vector<long long> cell_counts_serial(const InputGrid& grid, std::span<const double> pts) {
    const int dim = grid.box.dim();
    std::vector<long long> counts(grid.n_cells(), 0);
    const std::size_t count = pts.size() / dim;
    for (std::size_t i = 0; i < count; ++i) {
        const long c = grid.cell_of(pts.subspan(i * dim, dim));
        if (c >= 0) ++counts[c];
    }
    return counts;
}

std::vector<long long> cell_counts_parallel(const InputGrid& grid, std::span<const double> pts) {
    const int dim = grid.box.dim();
    std::vector<long long> counts(grid.n_cells(), 0);
    const std::size_t count = pts.size() / dim;
#pragma omp parallel
    {
        std::vector<long long> local(counts.size(), 0);
#pragma omp for schedule(static) nowait
        for (long long i = 0; i < static_cast<long long>(count); ++i) {
            const long c = grid.cell_of(pts.subspan(i * dim, dim));
            if (c >= 0) ++local[c];
        }
#pragma omp critical(scp_cell_counts)
        {
            for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += local[k];
        }
    }
    return counts;
}

std::vector<long long> cell_counts(const InputGrid& grid, std::span<const double> pts,
                                   Exec mode) {
    return mode == Exec::serial ? cell_counts_serial(grid, pts)
                                : cell_counts_parallel(grid, pts);
}
std::vector<long long> cell_counts(const InputGrid& grid, std::span<const double> pts) {
    return cell_counts(grid, pts, g_default);
}

// ---------------------------------------------------------------------------
// importance-sampling assembly

std::vector<double> assemble_cell_mass_serial(std::span<const double> bin_mass,
                                              const JointCounts& joint, long n_cells) {
    const int nb = static_cast<int>(bin_mass.size());
    std::vector<double> mass(n_cells, 0.0);
    for (long c = 0; c < n_cells; ++c) {
        double m = 0.0;
        for (int b = 0; b < nb; ++b) {
            const long long t = joint.bin_totals[b];
            if (t == 0 || bin_mass[b] == 0.0) continue;
            const long long j = joint.joint[static_cast<std::size_t>(b) * n_cells + c];
            if (j != 0) m += bin_mass[b] * (static_cast<double>(j) / static_cast<double>(t));
        }
        mass[c] = m;
    }
    return mass;
}

std::vector<double> assemble_cell_mass_parallel(std::span<const double> bin_mass,
                                                const JointCounts& joint, long n_cells) {
    const int nb = static_cast<int>(bin_mass.size());
    std::vector<double> mass(n_cells, 0.0);
#pragma omp parallel for schedule(static)
    for (long c = 0; c < n_cells; ++c) {
        double m = 0.0;
        for (int b = 0; b < nb; ++b) {
            const long long t = joint.bin_totals[b];
            if (t == 0 || bin_mass[b] == 0.0) continue;
            const long long j = joint.joint[static_cast<std::size_t>(b) * n_cells + c];
            if (j != 0) m += bin_mass[b] * (static_cast<double>(j) / static_cast<double>(t));
        }
        mass[c] = m;
    }
    return mass;
}

std::vector<double> assemble_cell_mass(std::span<const double> bin_mass,
                                       const JointCounts& joint, long n_cells, Exec mode) {
    return mode == Exec::serial ? assemble_cell_mass_serial(bin_mass, joint, n_cells)
                                : assemble_cell_mass_parallel(bin_mass, joint, n_cells);
}
std::vector<double> assemble_cell_mass(std::span<const double> bin_mass,
                                       const JointCounts& joint, long n_cells) {
    return assemble_cell_mass(bin_mass, joint, n_cells, g_default);
}

}  // namespace scp::kernels
