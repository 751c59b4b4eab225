#pragma once

#include <span>
#include <vector>

#include "scp/errors.hpp"

namespace scp {

// Axis-aligned compact parameter box. Immutable after construction.
struct BoxDomain {
    std::vector<double> lower;
    std::vector<double> upper;

    BoxDomain() = default;
    BoxDomain(std::vector<double> lo, std::vector<double> hi);

    int dim() const { return static_cast<int>(lower.size()); }
    double volume() const;
    double width(int axis) const { return upper[axis] - lower[axis]; }
    double diameter() const;

    bool contains(std::span<const double> x) const;
    // Clamp a point onto the closed box.
    void clamp(std::span<double> x) const;
};

}  // namespace scp
