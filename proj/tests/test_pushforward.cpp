#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "scp/kernels.hpp"
#include "scp/pushforward.hpp"
#include "test_oracles.hpp"

using namespace scp;

namespace {
const BoxDomain kBox({-5.0, -5.0}, {5.0, 5.0});

DensitySpec mixture_sd(double sd) {
    return DensitySpec::gaussian_mixture({{0.5, {-1.0, -1.0}, {sd * sd, 0.0, 0.0, sd * sd}},
                                          {0.5, {2.0, 2.0}, {sd * sd, 0.0, 0.0, sd * sd}}});
}

// Chunked Monte-Carlo histogram of Q over draws from spec.
BinnedDensity mc_pushforward(const DensitySpec& spec, const QoiMap& map,
                             const OutputPartition& partition, std::size_t n,
                             std::uint64_t seed) {
    const Sampler sampler(spec, kBox);
    std::vector<long long> counts(partition.n_bins(), 0);
    long long inside = 0;
    const std::size_t chunk = 1000000;
    for (std::size_t base = 0; base < n; base += chunk) {
        const std::size_t m = std::min(chunk, n - base);
        std::vector<double> pts(m * 2);
        for (std::size_t i = 0; i < m; ++i) {
            PhiloxStream stream(seed, base + i);
            sampler.draw(stream, {pts.data() + 2 * i, 2});
        }
        const std::vector<double> q = kernels::eval_map_points(map, pts, 2);
        const auto c = kernels::bin_counts(partition, q);
        for (int b = 0; b < partition.n_bins(); ++b) {
            counts[b] += c.counts[b];
            inside += c.counts[b];
        }
    }
    BinnedDensity d;
    d.partition = partition;
    d.values.resize(counts.size());
    for (std::size_t b = 0; b < counts.size(); ++b)
        d.values[b] = static_cast<double>(counts[b]) /
                      (static_cast<double>(inside) * partition.width(static_cast<int>(b)));
    d.total_mass = 1.0;
    return d;
}
}  // namespace

TEST_CASE("make_partition spans the samples with equal bins") {
    const std::vector<double> samples{0.0, 25.0, 100.0};
    const OutputPartition p = make_partition(samples, 100);
    REQUIRE(p.n_bins() == 100);
    for (int i = 0; i < 100; ++i) CHECK(p.width(i) == doctest::Approx(1.0));
    CHECK(p.find_bin(0.0) == 0);
    CHECK(p.find_bin(100.0) == 99);  // closed top edge
    CHECK(p.find_bin(100.5) == -1);
    CHECK(p.find_bin(-0.5) == -1);
}

TEST_CASE("degenerate partitions are rejected") {
    CHECK_THROWS_AS(make_partition(std::vector<double>{1.0, 2.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_partition(std::vector<double>{3.0, 3.0, 3.0}, 10),
                    DegenerateRangeError);
}

TEST_CASE("uniform histogram heights sit at 1/range") {
    const OutputPartition p = make_partition_range(0.0, 10.0, 50);
    std::vector<double> q(1000000);
    for (std::size_t i = 0; i < q.size(); ++i) {
        PhiloxStream stream(2024, i);
        q[i] = 10.0 * stream.next_double();
    }
    const BinnedDensity d = histogram_density(q, p);
    CHECK(d.total_mass == doctest::Approx(1.0).epsilon(1e-9));
    const double pbin = 1.0 / 50.0;
    const double sigma_height =
        std::sqrt(pbin * (1.0 - pbin) / 1000000.0) / p.width(0);
    for (double h : d.values) CHECK(std::fabs(h - 0.1) <= 4.0 * sigma_height);
}

TEST_CASE("point mass lands in a single bin") {
    const OutputPartition p = make_partition_range(0.0, 10.0, 10);
    const std::vector<double> q(500, 3.5);
    const BinnedDensity d = histogram_density(q, p);
    for (int b = 0; b < 10; ++b) CHECK(d.values[b] == (b == 3 ? doctest::Approx(1.0) : 0.0));
    CHECK(d.total_mass == doctest::Approx(1.0));
    CHECK(d.mass(3) == doctest::Approx(1.0));
}

TEST_CASE("out-of-range samples are counted and excluded; empty histograms throw") {
    const OutputPartition p = make_partition_range(0.0, 1.0, 4);
    const std::vector<double> q{0.1, 0.2, 5.0, -1.0};
    const BinnedDensity d = histogram_density(q, p);
    CHECK(d.outside_count == 2);
    CHECK(d.total_mass == doctest::Approx(1.0));
    CHECK_THROWS_AS(histogram_density(std::vector<double>{7.0, 8.0}, p), EmptyHistogramError);
}

TEST_CASE("mixture pushforward histogram matches the contour-integral oracle") {
    const QoiMap map = make_ellipse_map();
    const DensitySpec tgd = mixture_sd(0.1);
    const SampleSet s = sample(tgd, kBox, 1000000, 314);
    const std::vector<double> q = kernels::eval_map_points(map, s.points, 2);
    const OutputPartition partition = make_partition(q, 100);
    const BinnedDensity hist = histogram_density(q, partition);

    // oracle: per-bin mass from the analytic level-set line integral
    double tv = 0.0;
    for (int b = 0; b < partition.n_bins(); ++b) {
        const double oracle_mass = oracles::simpson(
            [&](double qq) {
                return 0.5 * oracles::ellipse_pushforward_density(qq, -1.0, -1.0, 0.1) +
                       0.5 * oracles::ellipse_pushforward_density(qq, 2.0, 2.0, 0.1);
            },
            partition.edges[b], partition.edges[b + 1], 16);
        tv += std::fabs(hist.mass(b) - oracle_mass);
    }
    CHECK(tv * 0.5 <= 0.02);
}

TEST_CASE("uniform-prior pushforward follows the level-set area oracle") {
    const QoiMap map = make_ellipse_map();
    const OutputPartition partition = make_partition_range(0.0, 100.0, 100);
    const BinnedDensity pf =
        prior_pushforward_mc(DensitySpec::uniform(), map, kBox, partition, 100000, 55);
    double tv = 0.0;
    for (int b = 0; b < 100; ++b) {
        const double oracle_mass = (oracles::ellipse_region_area(partition.edges[b + 1]) -
                                    oracles::ellipse_region_area(partition.edges[b])) /
                                   100.0;
        tv += std::fabs(pf.mass(b) - oracle_mass);
        CHECK(pf.values[b] >= 0.0);
    }
    CHECK(tv * 0.5 <= 0.02);
    // positive mass everywhere on (0, 100]
    for (int b = 0; b < 100; ++b) CHECK(pf.values[b] > 0.0);
}

TEST_CASE("gaussian-prior pushforward is positive where the experiments need it") {
    const QoiMap map = make_ellipse_map();
    const DensitySpec prior = DensitySpec::gaussian({1.25, 1.25}, 1.0);
    const SampleSet s = sample(prior, kBox, 100000, 91);
    const std::vector<double> q = kernels::eval_map_points(map, s.points, 2);
    const OutputPartition partition = make_partition(q, 100);
    const BinnedDensity pf = histogram_density(q, partition);
    const BinnedDensity oracle = mc_pushforward(prior, map, partition, 1000000, 92);
    for (int b = 0; b < 100; ++b) {
        if (partition.edges[b + 1] < 0.1 || partition.edges[b] > 60.0) continue;
        CHECK(pf.values[b] > 0.0);
        CHECK(oracle.values[b] > 0.0);
    }
}

TEST_CASE("surface density with Lebesgue weight matches a large MC histogram") {
    const QoiMap map = make_ellipse_map();
    const OutputPartition partition = make_partition_range(0.0, 100.0, 100);
    const BinnedDensity mc =
        mc_pushforward(DensitySpec::uniform(), map, partition, 10000000, 8);
    const double surf = surface_density_at_lebesgue(map, kBox, 4.5);
    const double mc_height = mc.value_at(4.5) * kBox.volume();
    CHECK(std::fabs(surf - mc_height) / mc_height <= 0.03);
    // independent analytic anchor: d/dq of pi q / sqrt(3) = pi / sqrt(3)
    CHECK(surf == doctest::Approx(3.14159265358979324 / std::sqrt(3.0)).epsilon(0.005));
}

TEST_CASE("constant prior weight factors out of the surface integral") {
    const QoiMap map = make_ellipse_map();
    const double a = surface_density_at(DensitySpec::uniform(), map, kBox, 12.0);
    const double b = surface_density_at_lebesgue(map, kBox, 12.0);
    CHECK(a * kBox.volume() == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("surface density outside the range is an empty contour") {
    CHECK_THROWS_AS(surface_density_at_lebesgue(make_ellipse_map(), kBox, -3.0),
                    EmptyContourError);
}

TEST_CASE("surface scaling factor agrees with MC heights for the bundled prior") {
    const QoiMap map = make_ellipse_map();
    const DensitySpec prior = DensitySpec::gaussian({1.25, 1.25}, 1.0);
    const OutputPartition partition = make_partition_range(0.0, 40.0, 40);
    const BinnedDensity mc = mc_pushforward(prior, map, partition, 1000000, 17);
    for (double q : {2.5, 6.5, 15.5}) {
        const double surf = surface_density_at(prior, map, kBox, q);
        const double height = mc.value_at(q);
        CHECK(std::fabs(surf - height) / height <= 0.05);
    }
}

TEST_CASE("the q-integral of contour integrals recovers the total mass") {
    // volume integrals of a density equal the output-space integral of its
    // contour integrals; with a probability density the total must be 1
    const QoiMap map = make_ellipse_map();
    const DensitySpec bump = DensitySpec::gaussian({0.0, 0.0}, 2.0);
    auto f = [&](double q) { return surface_density_at(bump, map, kBox, q); };
    // piecewise because the contour topology changes at q = 25 and q = 75
    double total = 0.0;
    total += oracles::simpson(f, 1e-4, 25.0, 24);
    total += oracles::simpson(f, 25.0, 75.0, 24);
    total += oracles::simpson(f, 75.0, 99.99, 16);
    CHECK(total == doctest::Approx(1.0).epsilon(0.005));
}

TEST_CASE("near-corner levels split into four arcs") {
    const ContourPolyline poly = trace_contour(make_ellipse_map(), kBox, 90.0, 512);
    CHECK(poly.components.size() == 4);
    for (const auto& comp : poly.components) CHECK(!comp.closed);
}

TEST_CASE("doubling bins and samples moves the scaling factor by under 2% TV") {
    const QoiMap map = make_ellipse_map();
    const DensitySpec prior = DensitySpec::gaussian({1.25, 1.25}, 1.0);
    const OutputPartition p100 = make_partition_range(0.0, 50.0, 100);
    const OutputPartition p200 = make_partition_range(0.0, 50.0, 200);
    const BinnedDensity a = prior_pushforward_mc(prior, map, kBox, p100, 100000, 3);
    const BinnedDensity b = prior_pushforward_mc(prior, map, kBox, p200, 200000, 4);
    double tv = 0.0;
    for (int i = 0; i < 100; ++i)
        tv += std::fabs(a.mass(i) - (b.mass(2 * i) + b.mass(2 * i + 1)));
    CHECK(tv * 0.5 <= 0.02);
}
