#include "scp/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "scp/linalg.hpp"

namespace scp {

GaussRule gauss_legendre(int n) {
    GaussRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        rule.x[i] = -z;
        rule.x[n - 1 - i] = z;
        rule.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.w[n - 1 - i] = rule.w[i];
    }
    return rule;
}

namespace {

// Per-axis quadrature nodes: GL-16 on panels split around the center.
void axis_nodes(double lo, double hi, double c, double sigma, const GaussRule& gl,
                std::vector<double>& nodes, std::vector<double>& weights) {
    std::vector<double> cuts{lo, hi};
    for (double k : {1.0, 3.0, 6.0, 10.0}) {
        for (double s : {-k, k}) {
            const double b = c + s * sigma;
            if (b > lo && b < hi) cuts.push_back(b);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    nodes.clear();
    weights.clear();
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double a = cuts[p], b = cuts[p + 1];
        if (!(b > a)) continue;
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (std::size_t i = 0; i < gl.x.size(); ++i) {
            nodes.push_back(mid + half * gl.x[i]);
            weights.push_back(half * gl.w[i]);
        }
    }
}

}  // namespace

double gaussian_box_mass(std::span<const double> center, std::span<const double> chol,
                         int dim, const BoxDomain& box) {
    static const GaussRule gl = gauss_legendre(16);
    const double log_norm = mvn_log_norm(chol, dim);

    std::vector<std::vector<double>> nodes(dim), weights(dim);
    for (int k = 0; k < dim; ++k) {
        const double sigma = std::sqrt(chol_marginal_var(chol, dim, k));
        axis_nodes(box.lower[k], box.upper[k], center[k], sigma, gl, nodes[k], weights[k]);
    }

    std::vector<std::size_t> idx(dim, 0);
    std::vector<double> x(dim);
    double total = 0.0;
    while (true) {
        double w = 1.0;
        for (int k = 0; k < dim; ++k) {
            x[k] = nodes[k][idx[k]];
            w *= weights[k][idx[k]];
        }
        total += w * mvn_pdf(x, center, chol, dim, log_norm);
        int k = 0;
        while (k < dim && ++idx[k] == nodes[k].size()) {
            idx[k] = 0;
            ++k;
        }
        if (k == dim) break;
    }
    return total;
}

}  // namespace scp
