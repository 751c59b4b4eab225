#include "scp/domain.hpp"

#include <algorithm>
#include <cmath>

namespace scp {

BoxDomain::BoxDomain(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.empty() || lower.size() != upper.size())
        throw InvalidSpecError("box bounds must be non-empty and of equal dimension");
    for (std::size_t k = 0; k < lower.size(); ++k) {
        if (!std::isfinite(lower[k]) || !std::isfinite(upper[k]) || !(lower[k] < upper[k]))
            throw InvalidSpecError("box requires finite lower < upper on every axis");
    }
}

double BoxDomain::volume() const {
    double v = 1.0;
    for (int k = 0; k < dim(); ++k) v *= width(k);
    return v;
}

double BoxDomain::diameter() const {
    double s = 0.0;
    for (int k = 0; k < dim(); ++k) s += width(k) * width(k);
    return std::sqrt(s);
}

bool BoxDomain::contains(std::span<const double> x) const {
    for (int k = 0; k < dim(); ++k)
        if (!(x[k] >= lower[k]) || !(x[k] <= upper[k])) return false;  // NaN-safe
    return true;
}

void BoxDomain::clamp(std::span<double> x) const {
    for (int k = 0; k < dim(); ++k) x[k] = std::clamp(x[k], lower[k], upper[k]);
}

}  // namespace scp
