#include "scp/partition.hpp"

#include <algorithm>
#include <cmath>

#include "scp/kernels.hpp"

namespace scp {

int OutputPartition::find_bin(double q) const {
    if (!(q >= edges.front()) || !(q <= edges.back())) return -1;  // NaN-safe
    if (q == edges.back()) return n_bins() - 1;
    const auto it = std::upper_bound(edges.begin(), edges.end(), q);
    return static_cast<int>(it - edges.begin()) - 1;
}

OutputPartition make_partition_range(double lo, double hi, int n_bins) {
    if (n_bins < 2) throw std::invalid_argument("make_partition requires n_bins >= 2");
    if (!(hi > lo)) throw DegenerateRangeError("sample range has zero width");
    OutputPartition p;
    p.edges.resize(n_bins + 1);
    const double w = (hi - lo) / n_bins;
    for (int i = 0; i <= n_bins; ++i) p.edges[i] = lo + w * i;
    p.edges[0] = lo;
    p.edges[n_bins] = hi;
    return p;
}

OutputPartition make_partition(std::span<const double> q_samples, int n_bins) {
    if (q_samples.empty()) throw DegenerateRangeError("no samples to build a partition from");
    double lo = q_samples[0], hi = q_samples[0];
    for (double q : q_samples) {
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    return make_partition_range(lo, hi, n_bins);
}

std::vector<double> BinnedDensity::masses() const {
    std::vector<double> m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        m[i] = values[i] * partition.width(static_cast<int>(i));
    return m;
}

BinnedDensity histogram_density(std::span<const double> q_samples,
                                const OutputPartition& partition) {
    auto counts = kernels::bin_counts(partition, q_samples);
    long long inside = 0;
    for (long long c : counts.counts) inside += c;
    if (inside == 0) throw EmptyHistogramError("all samples fall outside the partition");

    BinnedDensity d;
    d.partition = partition;
    d.outside_count = counts.outside;
    d.values.resize(counts.counts.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < counts.counts.size(); ++i) {
        const double w = partition.width(static_cast<int>(i));
        d.values[i] = static_cast<double>(counts.counts[i]) / (static_cast<double>(inside) * w);
        mass += d.values[i] * w;
    }
    d.total_mass = mass;
    return d;
}

}  // namespace scp
