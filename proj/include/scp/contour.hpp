#pragma once

#include <cstddef>
#include <vector>

#include "scp/domain.hpp"
#include "scp/qoi_map.hpp"

namespace scp {

// One connected piece of a level set Q^-1(q) intersected with the box:
// either a closed loop or an open arc with both endpoints on the boundary.
struct ContourComponent {
    std::vector<double> points;   // flattened 2-vectors
    std::vector<double> seg_len;  // per-segment lengths; closed loops include the wrap segment
    bool closed = false;

    std::size_t n_points() const { return points.size() / 2; }
    double length() const;
};

struct ContourPolyline {
    double q_value = 0.0;
    std::vector<ContourComponent> components;

    double total_arc_length() const;
    std::size_t total_points() const;
};

// Residual tolerance each traced point satisfies after Newton refinement.
inline constexpr double kContourResidualTol = 1e-8;

// Predictor-corrector tracing of the 2-D level set q, clipped to the box.
// n_points is the per-component resolution target. Throws EmptyContourError
// when the level set misses the box and ContourTraceError when refinement
// stalls.
ContourPolyline trace_contour(const QoiMap& map, const BoxDomain& domain, double q,
                              int n_points);

}  // namespace scp
