#pragma once

#include <span>
#include <vector>

#include "scp/errors.hpp"

namespace scp {

// Strictly increasing bin edges on the output axis. Bins are right-open with
// the final bin closed, so every value in [front, back] lands in a bin.
struct OutputPartition {
    std::vector<double> edges;

    int n_bins() const { return static_cast<int>(edges.size()) - 1; }
    double lo() const { return edges.front(); }
    double hi() const { return edges.back(); }
    double width(int i) const { return edges[i + 1] - edges[i]; }

    // Bin index of q, or -1 when q is outside [lo, hi].
    int find_bin(double q) const;

    bool operator==(const OutputPartition& other) const { return edges == other.edges; }
};

// Equal-width bins spanning the sample range.
OutputPartition make_partition(std::span<const double> q_samples, int n_bins);
OutputPartition make_partition_range(double lo, double hi, int n_bins);

// Piecewise-constant density on an output partition. values are heights
// (mass per unit width); for probability histograms the in-range mass is 1.
struct BinnedDensity {
    OutputPartition partition;
    std::vector<double> values;
    double total_mass = 0.0;
    long long outside_count = 0;

    double value_at(double q) const {
        const int i = partition.find_bin(q);
        return i < 0 ? 0.0 : values[i];
    }
    double mass(int i) const { return values[i] * partition.width(i); }
    std::vector<double> masses() const;
};

// Normalized histogram of the in-range samples; out-of-range samples are
// counted and excluded from the mass. Throws EmptyHistogramError when no
// sample lands inside the partition.
BinnedDensity histogram_density(std::span<const double> q_samples,
                                const OutputPartition& partition);

}  // namespace scp
