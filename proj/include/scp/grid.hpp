#pragma once

#include <span>
#include <vector>

#include "scp/density.hpp"
#include "scp/domain.hpp"

namespace scp {

// Homogeneous rectangular tiling of the box. Cells are right-open per axis
// with the final cell closed, mirroring the output partition convention.
struct InputGrid {
    BoxDomain box;
    std::vector<int> cells_per_axis;

    InputGrid() = default;
    InputGrid(BoxDomain b, std::vector<int> cells);

    long n_cells() const;
    double cell_volume() const;

    // Linear cell index of an in-box point; -1 outside the box.
    long cell_of(std::span<const double> x) const;
    std::vector<double> cell_center(long cell) const;
    // Per-axis indices of a linear cell.
    std::vector<int> cell_coords(long cell) const;
};

// Empirical cell masses (counts / total) of a sample set on the grid.
std::vector<double> grid_masses(const SampleSet& samples, const InputGrid& grid);

// Analytic cell masses by midpoint rule: density(center) * cell volume.
std::vector<double> grid_masses_midpoint(const DensitySpec& spec, const InputGrid& grid);

}  // namespace scp
