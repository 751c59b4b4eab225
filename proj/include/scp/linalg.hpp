#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "scp/errors.hpp"

namespace scp {

// Dense row-major helpers for the small (n <= 3 in practice) covariance
// matrices carried by density specs.

// Lower-triangular Cholesky factor of a SPD matrix; throws InvalidSpecError
// if the matrix is not positive definite.
inline std::vector<double> cholesky(std::span<const double> a, int n) {
    std::vector<double> L(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= L[static_cast<std::size_t>(i) * n + k] * L[static_cast<std::size_t>(j) * n + k];
            if (i == j) {
                if (s <= 0.0)
                    throw InvalidSpecError("covariance matrix is not positive definite");
                L[static_cast<std::size_t>(i) * n + j] = std::sqrt(s);
            } else {
                L[static_cast<std::size_t>(i) * n + j] = s / L[static_cast<std::size_t>(j) * n + j];
            }
        }
    }
    return L;
}

// Solve L y = x for lower-triangular L (forward substitution).
inline void solve_lower(std::span<const double> L, int n, std::span<double> x) {
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= L[static_cast<std::size_t>(i) * n + k] * x[k];
        x[i] = s / L[static_cast<std::size_t>(i) * n + i];
    }
}

// Marginal variance Sigma_kk recovered from the Cholesky factor.
inline double chol_marginal_var(std::span<const double> L, int n, int k) {
    double s = 0.0;
    for (int j = 0; j <= k; ++j) {
        const double v = L[static_cast<std::size_t>(k) * n + j];
        s += v * v;
    }
    return s;
}

inline double chol_log_det(std::span<const double> L, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::log(L[static_cast<std::size_t>(i) * n + i]);
    return 2.0 * s;
}

// Multivariate normal pdf with a precomputed Cholesky factor of the covariance
// and its precomputed log normalisation -0.5*(n*log(2*pi) + log det Sigma).
// Dimension is capped at 8; the solver itself never goes past 3.
inline double mvn_pdf(std::span<const double> x, std::span<const double> center,
                      std::span<const double> L, int n, double log_norm) {
    double y[8];
    for (int i = 0; i < n; ++i) y[i] = x[i] - center[i];
    std::span<double> ys(y, static_cast<std::size_t>(n));
    solve_lower(L, n, ys);
    double q = 0.0;
    for (int i = 0; i < n; ++i) q += y[i] * y[i];
    return std::exp(log_norm - 0.5 * q);
}

inline double mvn_log_norm(std::span<const double> L, int n) {
    return -0.5 * (n * 1.8378770664093454836 + chol_log_det(L, n));
}

inline double mvn_pdf(std::span<const double> x, std::span<const double> center,
                      std::span<const double> L, int n) {
    return mvn_pdf(x, center, L, n, mvn_log_norm(L, n));
}

}  // namespace scp
