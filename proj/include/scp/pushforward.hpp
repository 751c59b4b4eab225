#pragma once

#include <functional>

#include "scp/contour.hpp"
#include "scp/density.hpp"
#include "scp/partition.hpp"
#include "scp/qoi_map.hpp"

namespace scp {

// Monte-Carlo estimate of the prior pushforward density on the partition:
// histogram of Q over prior draws. This is the scaling-factor estimator the
// solver consumes.
BinnedDensity prior_pushforward_mc(const DensitySpec& prior, const QoiMap& map,
                                   const BoxDomain& domain, const OutputPartition& partition,
                                   std::size_t n_samples, std::uint64_t seed);

// Pointwise pushforward density at q by contour quadrature:
//   integral over Q^-1(q) of  w / sqrt(det(J J^T))  ds
// with w = prior density (scaling factor) or w = 1 (volume pushforward).
// Kept independent of the histogram path; it exists to cross-check it.
// The quadrature is validated by doubling the resolution; refinements that
// keep disagreeing by more than 1% raise QuadratureError.
double surface_density_at(const DensitySpec& prior, const QoiMap& map, const BoxDomain& domain,
                          double q);
double surface_density_at_lebesgue(const QoiMap& map, const BoxDomain& domain, double q);

// Conditional expectation of f on the contour via the same quadrature:
//   (integral of f * rho_p / gram) / (integral of rho_p / gram).
double surface_expectation(const DensitySpec& prior, const QoiMap& map, const BoxDomain& domain,
                           double q, const std::function<double(std::span<const double>)>& f);

}  // namespace scp
