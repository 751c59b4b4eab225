#include "scp/contour.hpp"

#include <algorithm>
#include <cmath>

namespace scp {

namespace {

struct Vec2 {
    double x = 0.0, y = 0.0;
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

struct Seed {
    Vec2 p;
    bool on_edge = false;
};

struct Tracer {
    const QoiMap& map;
    const BoxDomain& box;
    double q;

    double f(Vec2 p) const {
        const double v[2] = {p.x, p.y};
        return evaluate(map, v) - q;
    }
    Vec2 g(Vec2 p) const {
        const double v[2] = {p.x, p.y};
        const auto gr = gradient(map, v);
        return {gr[0], gr[1]};
    }
    bool inside(Vec2 p) const {
        return p.x >= box.lower[0] && p.x <= box.upper[0] && p.y >= box.lower[1] &&
               p.y <= box.upper[1];
    }

    Vec2 newton(Vec2 p) const {
        for (int it = 0; it < 50; ++it) {
            const double r = f(p);
            if (std::fabs(r) <= kContourResidualTol) return p;
            const Vec2 gr = g(p);
            const double n2 = gr.dot(gr);
            if (n2 < 1e-30)
                throw ContourTraceError("vanishing gradient during contour refinement");
            p = p - gr * (r / n2);
        }
        throw ContourTraceError("Newton refinement did not converge in 50 iterations");
    }

    // Unit tangent, oriented to continue in the direction of `ref`.
    Vec2 tangent(Vec2 p, Vec2 ref) const {
        const Vec2 gr = g(p);
        Vec2 t{-gr.y, gr.x};
        const double n = t.norm();
        if (n < 1e-30) throw ContourTraceError("vanishing gradient on contour");
        t = t * (1.0 / n);
        if (t.dot(ref) < 0.0) t = t * -1.0;
        return t;
    }

    // One RK2 predictor step of size h followed by Newton correction.
    Vec2 step(Vec2 x, Vec2& dir, double h) const {
        const Vec2 t1 = tangent(x, dir);
        const Vec2 xm = newtonish_mid(x + t1 * (0.5 * h));
        const Vec2 t2 = tangent(xm, t1);
        const Vec2 p = newton(x + t2 * h);
        dir = t2;
        return p;
    }

    // Midpoint only needs a rough pull-back; a single gradient correction.
    Vec2 newtonish_mid(Vec2 p) const {
        const double r = f(p);
        const Vec2 gr = g(p);
        const double n2 = gr.dot(gr);
        if (n2 < 1e-30) return p;
        return p - gr * (r / n2);
    }

    // Contour point on the boundary between an inside point a and an outside
    // point b, found by bisecting along the (corrected) arc.
    Vec2 boundary_point(Vec2 a, Vec2 b) const {
        for (int it = 0; it < 80; ++it) {
            Vec2 m = newton((a + b) * 0.5);
            if (inside(m))
                a = m;
            else
                b = m;
        }
        Vec2 p = inside(a) ? a : b;
        double v[2] = {p.x, p.y};
        box.clamp(v);
        return {v[0], v[1]};
    }

    struct HalfTrace {
        std::vector<Vec2> pts;  // excludes the start point
        bool exited = false;
    };

    HalfTrace march(Vec2 start, Vec2 dir, double h, std::size_t max_steps) const {
        HalfTrace out;
        Vec2 x = start;
        for (std::size_t k = 0; k < max_steps; ++k) {
            Vec2 p = step(x, dir, h);
            if (!inside(p)) {
                out.pts.push_back(boundary_point(x, p));
                out.exited = true;
                return out;
            }
            // closure: returned to the start after a few steps
            if (k >= 4 && (p - start).norm() < 0.9 * h) return out;
            out.pts.push_back(p);
            x = p;
        }
        throw ContourTraceError("contour march exceeded the step budget");
    }
};

ContourComponent finalize(std::vector<Vec2> pts, bool closed) {
    ContourComponent c;
    c.closed = closed;
    c.points.reserve(pts.size() * 2);
    for (const Vec2& p : pts) {
        c.points.push_back(p.x);
        c.points.push_back(p.y);
    }
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i + 1 < n; ++i) c.seg_len.push_back((pts[i + 1] - pts[i]).norm());
    if (closed && n >= 3) c.seg_len.push_back((pts[0] - pts[n - 1]).norm());
    return c;
}

std::vector<Seed> collect_seeds(const Tracer& tr) {
    std::vector<Seed> seeds;
    const BoxDomain& box = tr.box;

    auto edge_scan = [&](Vec2 a, Vec2 b) {
        constexpr int kSegs = 1024;
        const Vec2 d = (b - a) * (1.0 / kSegs);
        double fprev = tr.f(a);
        for (int i = 1; i <= kSegs; ++i) {
            const Vec2 p = a + d * static_cast<double>(i);
            const double fcur = tr.f(p);
            if (fprev == 0.0) seeds.push_back({a + d * static_cast<double>(i - 1), true});
            if (fprev * fcur < 0.0) {
                Vec2 lo = a + d * static_cast<double>(i - 1), hi = p;
                double flo = fprev;
                for (int it = 0; it < 80; ++it) {
                    const Vec2 m = (lo + hi) * 0.5;
                    const double fm = tr.f(m);
                    if (flo * fm <= 0.0)
                        hi = m;
                    else {
                        lo = m;
                        flo = fm;
                    }
                }
                seeds.push_back({(lo + hi) * 0.5, true});
            }
            fprev = fcur;
        }
    };
    const Vec2 c00{box.lower[0], box.lower[1]}, c10{box.upper[0], box.lower[1]};
    const Vec2 c01{box.lower[0], box.upper[1]}, c11{box.upper[0], box.upper[1]};
    edge_scan(c00, c10);
    edge_scan(c10, c11);
    edge_scan(c11, c01);
    edge_scan(c01, c00);

    // interior scan for components that never touch the boundary
    constexpr int kGrid = 160;
    const double dx = box.width(0) / kGrid, dy = box.width(1) / kGrid;
    std::vector<double> row(kGrid + 1), prev_row(kGrid + 1);
    for (int j = 0; j <= kGrid; ++j) {
        for (int i = 0; i <= kGrid; ++i)
            row[i] = tr.f({box.lower[0] + i * dx, box.lower[1] + j * dy});
        for (int i = 0; i < kGrid; ++i) {
            if (row[i] * row[i + 1] < 0.0) {
                const double s = row[i] / (row[i] - row[i + 1]);
                seeds.push_back({{box.lower[0] + (i + s) * dx, box.lower[1] + j * dy}, false});
            }
        }
        if (j > 0) {
            for (int i = 0; i <= kGrid; ++i) {
                if (prev_row[i] * row[i] < 0.0) {
                    const double s = prev_row[i] / (prev_row[i] - row[i]);
                    seeds.push_back(
                        {{box.lower[0] + i * dx, box.lower[1] + (j - 1 + s) * dy}, false});
                }
            }
        }
        std::swap(row, prev_row);
    }
    // edge seeds first so open components are traced from their endpoints
    std::stable_sort(seeds.begin(), seeds.end(),
                     [](const Seed& a, const Seed& b) { return a.on_edge && !b.on_edge; });
    return seeds;
}

std::vector<ContourComponent> trace_all(const Tracer& tr, std::vector<Seed> seeds, double h,
                                        std::size_t max_steps) {
    std::vector<ContourComponent> comps;
    std::vector<bool> used(seeds.size(), false);

    // Project every seed onto the level set first: interior seeds come from
    // linear interpolation on a coarse scan grid and can sit visibly off the
    // curve for tiny or highly curved components, which would defeat the
    // distance-based dedup below.
    std::vector<Vec2> projected(seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        try {
            projected[s] = tr.newton(seeds[s].p);
        } catch (const ContourTraceError&) {
            used[s] = true;  // unusable seed (vanishing gradient nearby)
        }
    }

    auto consume_near = [&](const std::vector<Vec2>& pts, double radius) {
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            if (used[s]) continue;
            for (const Vec2& p : pts) {
                if ((projected[s] - p).norm() < radius) {
                    used[s] = true;
                    break;
                }
            }
        }
    };

    for (std::size_t s = 0; s < seeds.size(); ++s) {
        if (used[s]) continue;
        used[s] = true;
        const Vec2 x0 = projected[s];

        Vec2 dir = tr.tangent(x0, {1.0, 0.0});
        if (seeds[s].on_edge) {
            // orient inward
            const double probe = std::max(h * 0.25, 1e-7 * tr.box.diameter());
            if (!tr.inside(x0 + dir * probe) && tr.inside(x0 + dir * (-probe))) dir = dir * -1.0;
        }

        Tracer::HalfTrace fwd = tr.march(x0, dir, h, max_steps);
        std::vector<Vec2> pts;
        bool closed = false;
        if (!fwd.exited && !seeds[s].on_edge) {
            pts.push_back(x0);
            pts.insert(pts.end(), fwd.pts.begin(), fwd.pts.end());
            closed = true;
        } else if (fwd.exited && !seeds[s].on_edge) {
            // open arc seeded in the interior: walk the other way too
            Tracer::HalfTrace bwd = tr.march(x0, dir * -1.0, h, max_steps);
            pts.assign(bwd.pts.rbegin(), bwd.pts.rend());
            pts.push_back(x0);
            pts.insert(pts.end(), fwd.pts.begin(), fwd.pts.end());
        } else {
            pts.push_back(x0);
            pts.insert(pts.end(), fwd.pts.begin(), fwd.pts.end());
            closed = !fwd.exited;
        }
        if (pts.size() < 2) continue;

        // endpoints of open arcs consume their matching edge seeds exactly
        if (!closed) {
            const double snap = 1e-5 * tr.box.diameter();
            for (std::size_t t = 0; t < seeds.size(); ++t) {
                if (used[t] || !seeds[t].on_edge) continue;
                if ((projected[t] - pts.front()).norm() < snap ||
                    (projected[t] - pts.back()).norm() < snap)
                    used[t] = true;
            }
        }
        consume_near(pts, 1.2 * h);
        comps.push_back(finalize(std::move(pts), closed));
    }
    return comps;
}

}  // namespace

double ContourComponent::length() const {
    double s = 0.0;
    for (double l : seg_len) s += l;
    return s;
}

double ContourPolyline::total_arc_length() const {
    double s = 0.0;
    for (const auto& c : components) s += c.length();
    return s;
}

std::size_t ContourPolyline::total_points() const {
    std::size_t n = 0;
    for (const auto& c : components) n += c.n_points();
    return n;
}

ContourPolyline trace_contour(const QoiMap& map, const BoxDomain& domain, double q,
                              int n_points) {
    if (map.dim != 2 || domain.dim() != 2)
        throw std::invalid_argument("trace_contour requires a 2-D map and domain");
    if (n_points < 8) throw std::invalid_argument("trace_contour requires n_points >= 8");

    const Tracer tr{map, domain, q};
    std::vector<Seed> seeds = collect_seeds(tr);
    if (seeds.empty())
        throw EmptyContourError("level set does not intersect the domain");

    // coarse pass to estimate total length, then retrace at the target spacing
    const double h0 = domain.diameter() / 512.0;
    const std::size_t cap = std::max<std::size_t>(100000, 20u * static_cast<std::size_t>(n_points));
    std::vector<ContourComponent> coarse = trace_all(tr, seeds, h0, cap);
    double total = 0.0;
    for (const auto& c : coarse) total += c.length();
    if (total <= 0.0) throw EmptyContourError("level set has zero length inside the domain");

    double h = total / static_cast<double>(n_points);
    h = std::min(h, domain.diameter() / 64.0);
    h = std::max(h, 1e-12 * domain.diameter());

    ContourPolyline poly;
    poly.q_value = q;
    poly.components = trace_all(tr, std::move(seeds), h, cap);
    return poly;
}

}  // namespace scp
