#include "scp/qoi_map.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace scp {

namespace {
std::mutex g_registry_mutex;
std::map<std::string, QoiMap>& registry() {
    static std::map<std::string, QoiMap> maps;
    return maps;
}
}  // namespace

double evaluate(const QoiMap& map, std::span<const double> x) {
    const double q = map.eval(x);
    if (!std::isfinite(q)) throw MapEvaluationError("map '" + map.id + "' returned a non-finite value");
    return q;
}

std::vector<double> gradient(const QoiMap& map, std::span<const double> x) {
    if (map.grad) return map.grad(x);
    const int n = map.dim;
    std::vector<double> g(n), p(x.begin(), x.end());
    for (int k = 0; k < n; ++k) {
        const double h = map.fd_step_scale * (1.0 + std::fabs(x[k]));
        const double xk = p[k];
        p[k] = xk + h;
        const double qp = evaluate(map, p);
        p[k] = xk - h;
        const double qm = evaluate(map, p);
        p[k] = xk;
        g[k] = (qp - qm) / (2.0 * h);
    }
    return g;
}

double gram_factor(const QoiMap& map, std::span<const double> x) {
    if (map.degenerate_locus && map.degenerate_locus(x))
        throw DegenerateJacobianError("map '" + map.id + "' is rank-deficient at the requested point");
    const std::vector<double> g = gradient(map, x);
    double s = 0.0;
    for (double gk : g) s += gk * gk;
    const double factor = std::sqrt(s);
    if (factor < kDegenerateGramThreshold)
        throw DegenerateJacobianError("Gram factor underflow at the requested point");
    return factor;
}

QoiMap make_ellipse_map() {
    QoiMap m;
    m.id = "ellipse";
    m.dim = 2;
    m.eval = [](std::span<const double> x) { return x[0] * x[0] + 3.0 * x[1] * x[1]; };
    m.grad = [](std::span<const double> x) {
        return std::vector<double>{2.0 * x[0], 6.0 * x[1]};
    };
    m.degenerate_locus = [](std::span<const double> x) {
        return 4.0 * x[0] * x[0] + 36.0 * x[1] * x[1] < kDegenerateGramThreshold * kDegenerateGramThreshold;
    };
    return m;
}

QoiMap make_powerlaw_map(double r) {
    if (!(r > 0.0)) throw InvalidSpecError("powerlaw map requires r > 0");
    QoiMap m;
    m.id = "powerlaw";
    m.dim = 2;
    const double log_r = std::log(r);
    m.eval = [r](std::span<const double> x) { return x[0] * std::pow(r, x[1]); };
    m.grad = [r, log_r](std::span<const double> x) {
        const double rb = std::pow(r, x[1]);
        return std::vector<double>{rb, x[0] * rb * log_r};
    };
    // gram = r^b * sqrt(1 + a^2 log(r)^2) >= r^b > 0: no degenerate locus.
    return m;
}

QoiMap make_map(const std::string& id, double powerlaw_r) {
    if (id == "ellipse") return make_ellipse_map();
    if (id == "powerlaw") return make_powerlaw_map(powerlaw_r);
    {
        std::lock_guard<std::mutex> lock(g_registry_mutex);
        const auto it = registry().find(id);
        if (it != registry().end()) return it->second;
    }
    throw ConfigError("unknown map id '" + id + "'");
}

void register_map(const std::string& id, QoiMap map) {
    if (id == "ellipse" || id == "powerlaw")
        throw ConfigError("map id '" + id + "' is reserved for a bundled map");
    std::lock_guard<std::mutex> lock(g_registry_mutex);
    registry()[id] = std::move(map);
}

}  // namespace scp
