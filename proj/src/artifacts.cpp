#include "scp/artifacts.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace scp {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write to '" + tmp + "'");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::string binned_density_csv(const BinnedDensity& d) {
    std::string out = "bin_left,bin_right,height\n";
    for (int i = 0; i < d.partition.n_bins(); ++i) {
        out += format_double(d.partition.edges[i]);
        out += ',';
        out += format_double(d.partition.edges[i + 1]);
        out += ',';
        out += format_double(d.values[i]);
        out += '\n';
    }
    return out;
}

std::string heatmap_csv(const ScpSolution& solution) {
    std::string out = "cell_i,cell_j,center_l1,center_l2,mass,density\n";
    const double inv_vol = 1.0 / solution.grid.cell_volume();
    for (long c = 0; c < solution.grid.n_cells(); ++c) {
        const auto coords = solution.grid.cell_coords(c);
        const auto center = solution.grid.cell_center(c);
        out += std::to_string(coords[0]);
        out += ',';
        out += std::to_string(coords.size() > 1 ? coords[1] : 0);
        out += ',';
        out += format_double(center[0]);
        out += ',';
        out += format_double(center.size() > 1 ? center[1] : 0.0);
        out += ',';
        out += format_double(solution.cell_mass[c]);
        out += ',';
        out += format_double(solution.cell_mass[c] * inv_vol);
        out += '\n';
    }
    return out;
}

std::string samples_csv(const SampleSet& samples) {
    std::string out;
    for (int k = 0; k < samples.dim; ++k) {
        if (k) out += ',';
        out += "l" + std::to_string(k + 1);
    }
    out += '\n';
    for (std::size_t i = 0; i < samples.count(); ++i) {
        const auto p = samples.point(i);
        for (int k = 0; k < samples.dim; ++k) {
            if (k) out += ',';
            out += format_double(p[k]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace scp
