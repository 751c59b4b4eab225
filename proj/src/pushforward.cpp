#include "scp/pushforward.hpp"

#include <cmath>

#include "scp/kernels.hpp"

namespace scp {

BinnedDensity prior_pushforward_mc(const DensitySpec& prior, const QoiMap& map,
                                   const BoxDomain& domain, const OutputPartition& partition,
                                   std::size_t n_samples, std::uint64_t seed) {
    if (!prior.has_density()) throw NoDensityError("prior must have a density");
    const SampleSet s = sample(prior, domain, n_samples, seed);
    const std::vector<double> q = kernels::eval_map_points(map, s.points, domain.dim());
    return histogram_density(q, partition);
}

namespace {

using Weight = std::function<double(std::span<const double>)>;

// Trapezoid rule of w/gram along every component of the traced polyline.
double integrate_polyline(const ContourPolyline& poly, const QoiMap& map, const Weight& w) {
    double total = 0.0;
    for (const auto& comp : poly.components) {
        const std::size_t n = comp.n_points();
        if (n < 2) continue;
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::span<const double> p{comp.points.data() + 2 * i, 2};
            f[i] = w(p) / gram_factor(map, p);
        }
        for (std::size_t i = 0; i + 1 < n; ++i)
            total += 0.5 * (f[i] + f[i + 1]) * comp.seg_len[i];
        if (comp.closed && comp.seg_len.size() == n)
            total += 0.5 * (f[n - 1] + f[0]) * comp.seg_len[n - 1];
    }
    return total;
}

double surface_integral(const QoiMap& map, const BoxDomain& domain, double q, const Weight& w) {
    constexpr int kBasePoints = 512;
    double prev = integrate_polyline(trace_contour(map, domain, q, kBasePoints), map, w);
    int n_points = kBasePoints * 2;
    for (int refinement = 0; refinement < 3; ++refinement, n_points *= 2) {
        const double cur = integrate_polyline(trace_contour(map, domain, q, n_points), map, w);
        const double denom = std::max(std::fabs(cur), 1e-300);
        if (std::fabs(cur - prev) / denom <= 0.01) return cur;
        prev = cur;
    }
    throw QuadratureError("contour quadrature refinements kept disagreeing by more than 1%");
}

}  // namespace

double surface_density_at(const DensitySpec& prior, const QoiMap& map, const BoxDomain& domain,
                          double q) {
    const DensityEvaluator density(prior, domain);
    return surface_integral(map, domain, q,
                            [&](std::span<const double> p) { return density(p); });
}

double surface_density_at_lebesgue(const QoiMap& map, const BoxDomain& domain, double q) {
    return surface_integral(map, domain, q, [](std::span<const double>) { return 1.0; });
}

double surface_expectation(const DensitySpec& prior, const QoiMap& map, const BoxDomain& domain,
                           double q, const std::function<double(std::span<const double>)>& f) {
    const DensityEvaluator density(prior, domain);
    const double numer = surface_integral(
        map, domain, q, [&](std::span<const double> p) { return f(p) * density(p); });
    const double denom = surface_integral(
        map, domain, q, [&](std::span<const double> p) { return density(p); });
    if (!(denom > 0.0))
        throw SupportMismatchError("prior carries no mass on the requested contour");
    return numer / denom;
}

}  // namespace scp
