#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scp/domain.hpp"

namespace scp {

// Scalar-valued quantity-of-interest map on the parameter box, together with
// the differential data the solver and diagnostics need. All bundled maps
// have one output; the Gram factor sqrt(det(J J^T)) reduces to the gradient
// norm in that case.
struct QoiMap {
    std::string id;
    int dim = 2;
    std::function<double(std::span<const double>)> eval;
    // Optional analytic gradient; central finite differences otherwise.
    std::function<std::vector<double>(std::span<const double>)> grad;
    // Componentwise step scale for finite differences: h_k = scale*(1+|x_k|).
    double fd_step_scale = 1e-6;
    // Optional predicate marking points where the Jacobian loses rank.
    std::function<bool(std::span<const double>)> degenerate_locus;
};

// Threshold below which the Gram factor is treated as rank-deficient.
inline constexpr double kDegenerateGramThreshold = 1e-12;

double evaluate(const QoiMap& map, std::span<const double> x);

// Gradient, analytic when available, otherwise central differences.
std::vector<double> gradient(const QoiMap& map, std::span<const double> x);

double gram_factor(const QoiMap& map, std::span<const double> x);

// Bundled maps addressable from configs. "ellipse": x1^2 + 3*x2^2.
// "powerlaw": a * r^b with r fixed at construction.
QoiMap make_ellipse_map();
QoiMap make_powerlaw_map(double r);
QoiMap make_map(const std::string& id, double powerlaw_r = 0.3);

// Programmatic registration of custom maps; registered ids shadow nothing
// and become selectable wherever a map id is accepted.
void register_map(const std::string& id, QoiMap map);

}  // namespace scp
