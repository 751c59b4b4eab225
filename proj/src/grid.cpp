#include "scp/grid.hpp"

#include <cmath>

#include "scp/kernels.hpp"

namespace scp {

InputGrid::InputGrid(BoxDomain b, std::vector<int> cells)
    : box(std::move(b)), cells_per_axis(std::move(cells)) {
    if (static_cast<int>(cells_per_axis.size()) != box.dim())
        throw InvalidSpecError("grid resolution dimension mismatch");
    for (int c : cells_per_axis)
        if (c < 1) throw InvalidSpecError("grid needs at least one cell per axis");
}

long InputGrid::n_cells() const {
    long n = 1;
    for (int c : cells_per_axis) n *= c;
    return n;
}

double InputGrid::cell_volume() const {
    double v = 1.0;
    for (int k = 0; k < box.dim(); ++k) v *= box.width(k) / cells_per_axis[k];
    return v;
}

long InputGrid::cell_of(std::span<const double> x) const {
    long idx = 0;
    for (int k = 0; k < box.dim(); ++k) {
        if (x[k] < box.lower[k] || x[k] > box.upper[k]) return -1;
        int i = static_cast<int>((x[k] - box.lower[k]) / box.width(k) * cells_per_axis[k]);
        if (i >= cells_per_axis[k]) i = cells_per_axis[k] - 1;  // closed top cell
        idx = idx * cells_per_axis[k] + i;
    }
    return idx;
}

std::vector<int> InputGrid::cell_coords(long cell) const {
    std::vector<int> coords(box.dim());
    for (int k = box.dim() - 1; k >= 0; --k) {
        coords[k] = static_cast<int>(cell % cells_per_axis[k]);
        cell /= cells_per_axis[k];
    }
    return coords;
}

std::vector<double> InputGrid::cell_center(long cell) const {
    const std::vector<int> coords = cell_coords(cell);
    std::vector<double> c(box.dim());
    for (int k = 0; k < box.dim(); ++k)
        c[k] = box.lower[k] + (coords[k] + 0.5) * box.width(k) / cells_per_axis[k];
    return c;
}

std::vector<double> grid_masses(const SampleSet& samples, const InputGrid& grid) {
    const auto counts = kernels::cell_counts(grid, samples.points);
    std::vector<double> m(counts.size());
    const double inv = 1.0 / static_cast<double>(samples.count());
    for (std::size_t i = 0; i < counts.size(); ++i) m[i] = static_cast<double>(counts[i]) * inv;
    return m;
}

std::vector<double> grid_masses_midpoint(const DensitySpec& spec, const InputGrid& grid) {
    const DensityEvaluator density(spec, grid.box);
    const long nc = grid.n_cells();
    std::vector<double> centers(static_cast<std::size_t>(nc) * grid.box.dim());
    for (long c = 0; c < nc; ++c) {
        const auto center = grid.cell_center(c);
        for (int k = 0; k < grid.box.dim(); ++k)
            centers[static_cast<std::size_t>(c) * grid.box.dim() + k] = center[k];
    }
    std::vector<double> vals = kernels::density_points(density, centers, grid.box.dim());
    const double vol = grid.cell_volume();
    for (double& v : vals) v *= vol;
    return vals;
}

}  // namespace scp
