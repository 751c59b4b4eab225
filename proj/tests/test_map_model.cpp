#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "scp/contour.hpp"
#include "scp/philox.hpp"
#include "scp/qoi_map.hpp"
#include "test_oracles.hpp"

using namespace scp;

namespace {
const BoxDomain kBox({-5.0, -5.0}, {5.0, 5.0});

double fd_gram(const QoiMap& map, std::span<const double> x) {
    // independent central-difference route
    std::vector<double> p(x.begin(), x.end());
    double s = 0.0;
    for (int k = 0; k < map.dim; ++k) {
        const double h = 1e-6 * (1.0 + std::fabs(x[k]));
        const double xk = p[k];
        p[k] = xk + h;
        const double qp = map.eval(p);
        p[k] = xk - h;
        const double qm = map.eval(p);
        p[k] = xk;
        const double g = (qp - qm) / (2.0 * h);
        s += g * g;
    }
    return std::sqrt(s);
}
}  // namespace

TEST_CASE("ellipse map evaluates the bundled points") {
    const QoiMap m = make_ellipse_map();
    CHECK(evaluate(m, std::vector<double>{-1.0, -1.0}) == doctest::Approx(4.0));
    CHECK(evaluate(m, std::vector<double>{2.0, 2.0}) == doctest::Approx(16.0));
    CHECK(evaluate(m, std::vector<double>{0.0, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("non-finite map output raises MapEvaluationError") {
    QoiMap bad;
    bad.id = "bad";
    bad.dim = 2;
    bad.eval = [](std::span<const double>) { return std::nan(""); };
    CHECK_THROWS_AS(evaluate(bad, std::vector<double>{0.0, 0.0}), MapEvaluationError);
}

TEST_CASE("gram factor is the gradient norm") {
    const QoiMap m = make_ellipse_map();
    CHECK(gram_factor(m, std::vector<double>{1.0, 0.0}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(gram_factor(m, std::vector<double>{0.0, 0.0}), DegenerateJacobianError);
}

TEST_CASE("powerlaw gram matches the finite-difference oracle") {
    const QoiMap m = make_powerlaw_map(0.3);
    const std::vector<double> x{7.0, -1.5};
    const double analytic = gram_factor(m, x);
    CHECK(std::fabs(analytic - fd_gram(m, x)) / analytic <= 1e-5);
}

TEST_CASE("analytic gradients agree with central differences at random interior points") {
    PhiloxStream stream(123, 0);
    for (const auto& m : {make_ellipse_map(), make_powerlaw_map(0.3)}) {
        const BoxDomain box = m.id == "ellipse" ? kBox : BoxDomain({4.0, -3.0}, {14.0, -0.1});
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> x(2);
            for (int k = 0; k < 2; ++k)
                x[k] = box.lower[k] + box.width(k) * stream.next_double();
            const double g = [&] {
                try {
                    return gram_factor(m, x);
                } catch (const DegenerateJacobianError&) {
                    return 0.0;
                }
            }();
            if (g < 1e-6) continue;
            CHECK(std::fabs(g - fd_gram(m, x)) / g <= 1e-5);
        }
    }
}

TEST_CASE("contour q=20 is the expected ellipse") {
    const QoiMap m = make_ellipse_map();
    const ContourPolyline poly = trace_contour(m, kBox, 20.0, 512);
    REQUIRE(poly.components.size() == 1);
    CHECK(poly.components[0].closed);

    double max_x = 0.0, max_y = 0.0;
    for (std::size_t i = 0; i < poly.components[0].n_points(); ++i) {
        const double* p = poly.components[0].points.data() + 2 * i;
        const double q = p[0] * p[0] + 3.0 * p[1] * p[1];
        CHECK(std::fabs(q - 20.0) <= kContourResidualTol);
        max_x = std::max(max_x, std::fabs(p[0]));
        max_y = std::max(max_y, std::fabs(p[1]));
    }
    CHECK(max_x == doctest::Approx(std::sqrt(20.0)).epsilon(1e-3));
    CHECK(max_y == doctest::Approx(std::sqrt(20.0 / 3.0)).epsilon(1e-3));
}

TEST_CASE("contour below the range is empty") {
    CHECK_THROWS_AS(trace_contour(make_ellipse_map(), kBox, -1.0, 256), EmptyContourError);
    CHECK_THROWS_AS(trace_contour(make_ellipse_map(), kBox, 101.0, 256), EmptyContourError);
}

TEST_CASE("contour q=4 arc length matches the quadrature perimeter oracle") {
    const double expected = oracles::ellipse_perimeter(2.0, 2.0 / std::sqrt(3.0));
    const ContourPolyline poly = trace_contour(make_ellipse_map(), kBox, 4.0, 1024);
    CHECK(std::fabs(poly.total_arc_length() - expected) / expected <= 1e-3);
}

TEST_CASE("arc length is stable under doubling the resolution") {
    for (double q : {4.0, 20.0, 60.0}) {
        const double l1 =
            trace_contour(make_ellipse_map(), kBox, q, 512).total_arc_length();
        const double l2 =
            trace_contour(make_ellipse_map(), kBox, q, 1024).total_arc_length();
        CHECK(std::fabs(l1 - l2) / l2 <= 0.01);
    }
}

TEST_CASE("clipped contours split into boundary-to-boundary arcs") {
    // q = 60: the ellipse leaves the box through the left/right edges
    const ContourPolyline poly = trace_contour(make_ellipse_map(), kBox, 60.0, 512);
    CHECK(poly.components.size() == 2);
    for (const auto& comp : poly.components) {
        CHECK(!comp.closed);
        REQUIRE(comp.n_points() >= 2);
        const double* first = comp.points.data();
        const double* last = comp.points.data() + 2 * (comp.n_points() - 1);
        CHECK(std::max(std::fabs(first[0]), std::fabs(first[1])) == doctest::Approx(5.0));
        CHECK(std::max(std::fabs(last[0]), std::fabs(last[1])) == doctest::Approx(5.0));
    }
}

TEST_CASE("custom maps are selectable once registered") {
    CHECK_THROWS_AS(make_map("saddle"), ConfigError);
    QoiMap saddle;
    saddle.id = "saddle";
    saddle.dim = 2;
    saddle.eval = [](std::span<const double> x) { return x[0] * x[0] - x[1] * x[1]; };
    register_map("saddle", saddle);
    CHECK(evaluate(make_map("saddle"), std::vector<double>{3.0, 1.0}) == doctest::Approx(8.0));
    CHECK_THROWS_AS(register_map("ellipse", saddle), ConfigError);
}

TEST_CASE("open powerlaw contours trace across the domain") {
    const QoiMap m = make_powerlaw_map(0.3);
    const BoxDomain box({4.0, -3.0}, {14.0, -0.1});
    const ContourPolyline poly = trace_contour(m, box, 40.0, 512);
    REQUIRE(poly.components.size() == 1);
    CHECK(!poly.components[0].closed);
    for (std::size_t i = 0; i < poly.components[0].n_points(); ++i) {
        const double* p = poly.components[0].points.data() + 2 * i;
        CHECK(std::fabs(m.eval(std::span<const double>(p, 2)) - 40.0) <= kContourResidualTol);
    }
}
