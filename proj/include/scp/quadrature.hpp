#pragma once

#include <span>
#include <vector>

#include "scp/domain.hpp"

namespace scp {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre rule computed by Newton iteration on the Legendre recurrence.
GaussRule gauss_legendre(int n);

// Mass of a multivariate normal over an axis-aligned box, by tensor-product
// panel quadrature. Panels are placed around the component center at
// +-1, 3, 6 and 10 marginal standard deviations so that components far
// tighter than the box are still resolved.
double gaussian_box_mass(std::span<const double> center, std::span<const double> chol,
                         int dim, const BoxDomain& box);

}  // namespace scp
