// Timing harness comparing the serial reference kernels against the OpenMP
// variants at the gaussian-mixture experiment scale. Usage: scp_bench [n].
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "scp/diagnostics.hpp"
#include "scp/kernels.hpp"
#include "scp/solver.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace scp;
using namespace scp::kernels;

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const std::string& name, double serial_ms, double parallel_ms) {
    std::printf("%-28s %10.1f ms %10.1f ms %8.2fx\n", name.c_str(), serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::stoull(argv[1]) : 1000000;
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run the same serial code\n");
#endif
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    const BoxDomain box({-5.0, -5.0}, {5.0, 5.0});
    const DensitySpec tgd = DensitySpec::gaussian_mixture(
        {{0.5, {-1.0, -1.0}, {0.01, 0.0, 0.0, 0.01}}, {0.5, {2.0, 2.0}, {0.01, 0.0, 0.0, 0.01}}});
    const DensitySpec prior = DensitySpec::gaussian({1.25, 1.25}, 1.0);
    const QoiMap map = make_ellipse_map();
    const Sampler sampler(tgd, box);
    const Sampler prior_sampler(prior, box);

    std::vector<double> pts;
    report("sample_points",
           time_ms([&] { pts = sample_points_serial(sampler, 2, n, 1); }),
           time_ms([&] { pts = sample_points_parallel(sampler, 2, n, 1); }));

    std::vector<double> q;
    report("eval_map_points",
           time_ms([&] { q = eval_map_points_serial(map, pts, 2); }),
           time_ms([&] { q = eval_map_points_parallel(map, pts, 2); }));

    const DensityEvaluator density(prior, box);
    report("density_points",
           time_ms([&] { density_points_serial(density, pts, 2); }),
           time_ms([&] { density_points_parallel(density, pts, 2); }));

    const OutputPartition partition = make_partition(q, 100);
    report("bin_counts",
           time_ms([&] { bin_counts_serial(partition, q); }),
           time_ms([&] { bin_counts_parallel(partition, q); }));

    const InputGrid grid(box, {100, 100});
    JointCounts joint;
    report("joint_counts",
           time_ms([&] { joint = joint_counts_serial(partition, grid, pts, q); }),
           time_ms([&] { joint = joint_counts_parallel(partition, grid, pts, q); }));

    std::vector<double> bin_mass(100, 0.01);
    report("assemble_cell_mass",
           time_ms([&] { assemble_cell_mass_serial(bin_mass, joint, grid.n_cells()); }),
           time_ms([&] { assemble_cell_mass_parallel(bin_mass, joint, grid.n_cells()); }));

    // end-to-end solve at the experiment scale
    const std::size_t n_exp = std::min<std::size_t>(n, 100000);
    const SampleSet obs_set = sample(tgd, box, n_exp, 2);
    const std::vector<double> obs = eval_map_points(map, obs_set.points, 2);
    const OutputPartition part_exp = make_partition(obs, 100);
    const SampleSet prior_set = sample(prior, box, n_exp, 3);
    double s_ms = 0.0, p_ms = 0.0;
    set_default_exec(Exec::serial);
    s_ms = time_ms([&] { solve_cells(prior_set, obs, part_exp, grid, map); });
    set_default_exec(Exec::parallel);
    p_ms = time_ms([&] { solve_cells(prior_set, obs, part_exp, grid, map); });
    report("solve_cells (end to end)", s_ms, p_ms);
    return 0;
}
