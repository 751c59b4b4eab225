#include "scp/density.hpp"

#include <cmath>

#include "scp/kernels.hpp"
#include "scp/linalg.hpp"
#include "scp/quadrature.hpp"

namespace scp {

namespace {

void check_weights(const std::vector<double>& w, const char* what) {
    if (w.empty()) throw InvalidSpecError(std::string(what) + " has no components");
    double s = 0.0;
    for (double v : w) {
        if (!(v >= 0.0) || !(v <= 1.0))
            throw InvalidSpecError(std::string(what) + " weight outside [0, 1]");
        s += v;
    }
    if (std::fabs(s - 1.0) > 1e-12)
        throw InvalidSpecError(std::string(what) + " weights must sum to 1 within 1e-12");
}

}  // namespace

bool DensitySpec::has_density() const {
    switch (kind) {
        case DensityKind::uniform:
        case DensityKind::gaussian_mixture:
            return true;
        case DensityKind::dirac_mixture:
            return false;
        case DensityKind::convex_combination:
            for (std::size_t i = 0; i < parts.size(); ++i)
                if (part_weights[i] > 0.0 && !parts[i]->has_density()) return false;
            return true;
    }
    return false;
}

DensitySpec DensitySpec::uniform() { return DensitySpec{}; }

DensitySpec DensitySpec::gaussian(std::vector<double> center, double sd) {
    std::vector<double> sds(center.size(), sd);
    return gaussian(std::move(center), std::move(sds));
}

DensitySpec DensitySpec::gaussian(std::vector<double> center, std::vector<double> sds) {
    if (sds.size() != center.size())
        throw InvalidSpecError("gaussian center/sd dimension mismatch");
    DensitySpec s;
    s.kind = DensityKind::gaussian_mixture;
    GaussianComponent c;
    const int n = static_cast<int>(center.size());
    c.center = std::move(center);
    c.cov.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k)
        c.cov[static_cast<std::size_t>(k) * n + k] = sds[k] * sds[k];
    s.components.push_back(std::move(c));
    return s;
}

DensitySpec DensitySpec::gaussian_mixture(std::vector<GaussianComponent> comps) {
    DensitySpec s;
    s.kind = DensityKind::gaussian_mixture;
    s.components = std::move(comps);
    return s;
}

DensitySpec DensitySpec::dirac_mixture(std::vector<DiracAtom> atoms) {
    DensitySpec s;
    s.kind = DensityKind::dirac_mixture;
    s.atoms = std::move(atoms);
    return s;
}

DensitySpec DensitySpec::mix(double alpha, DensitySpec a, DensitySpec b) {
    DensitySpec s;
    s.kind = DensityKind::convex_combination;
    s.part_weights = {alpha, 1.0 - alpha};
    s.parts = {std::make_shared<const DensitySpec>(std::move(a)),
               std::make_shared<const DensitySpec>(std::move(b))};
    return s;
}

void validate_spec(const DensitySpec& spec, const BoxDomain& domain) {
    const int n = domain.dim();
    switch (spec.kind) {
        case DensityKind::uniform:
            return;
        case DensityKind::gaussian_mixture: {
            std::vector<double> w;
            for (const auto& c : spec.components) {
                w.push_back(c.weight);
                if (static_cast<int>(c.center.size()) != n ||
                    c.cov.size() != static_cast<std::size_t>(n) * n)
                    throw InvalidSpecError("gaussian component dimension mismatch");
                cholesky(c.cov, n);  // SPD check
            }
            check_weights(w, "gaussian_mixture");
            return;
        }
        case DensityKind::dirac_mixture: {
            std::vector<double> w;
            for (const auto& a : spec.atoms) {
                w.push_back(a.weight);
                if (static_cast<int>(a.center.size()) != n)
                    throw InvalidSpecError("dirac atom dimension mismatch");
                if (!domain.contains(a.center))
                    throw InvalidSpecError("dirac atom lies outside the domain");
            }
            check_weights(w, "dirac_mixture");
            return;
        }
        case DensityKind::convex_combination: {
            if (spec.parts.size() != spec.part_weights.size() || spec.parts.empty())
                throw InvalidSpecError("convex_combination parts/weights mismatch");
            check_weights(spec.part_weights, "convex_combination");
            for (const auto& p : spec.parts) validate_spec(*p, domain);
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// DensityEvaluator

namespace {

void flatten_density(const DensitySpec& spec, const BoxDomain& box, double scale,
                     double& uniform_weight, std::vector<GaussianComponent>& gaussians) {
    switch (spec.kind) {
        case DensityKind::uniform:
            uniform_weight += scale;
            return;
        case DensityKind::gaussian_mixture:
            for (const auto& c : spec.components) {
                GaussianComponent g = c;
                g.weight = c.weight * scale;
                gaussians.push_back(std::move(g));
            }
            return;
        case DensityKind::dirac_mixture:
            throw NoDensityError("Dirac mixtures have no density with respect to volume");
        case DensityKind::convex_combination:
            for (std::size_t i = 0; i < spec.parts.size(); ++i) {
                if (spec.part_weights[i] == 0.0) continue;
                flatten_density(*spec.parts[i], box, scale * spec.part_weights[i],
                                uniform_weight, gaussians);
            }
            return;
    }
}

}  // namespace

DensityEvaluator::DensityEvaluator(const DensitySpec& spec, const BoxDomain& domain)
    : box_(domain) {
    validate_spec(spec, domain);
    if (domain.dim() > 8) throw InvalidSpecError("density evaluation supports dim <= 8");
    double uniform_weight = 0.0;
    std::vector<GaussianComponent> gaussians;
    flatten_density(spec, domain, 1.0, uniform_weight, gaussians);
    uniform_height_ = uniform_weight / domain.volume();
    const int n = domain.dim();
    for (auto& g : gaussians) {
        Prepared p;
        p.weight = g.weight;
        p.center = std::move(g.center);
        p.chol = cholesky(g.cov, n);
        p.log_norm = mvn_log_norm(p.chol, n);
        const double mass = gaussian_box_mass(p.center, p.chol, n, domain);
        if (!(mass > 1e-12))
            throw TruncationError("gaussian component has negligible mass inside the domain");
        p.inv_box_mass = 1.0 / mass;
        comps_.push_back(std::move(p));
    }
}

double DensityEvaluator::operator()(std::span<const double> x) const {
    if (!box_.contains(x)) return 0.0;
    double v = uniform_height_;
    const int n = box_.dim();
    for (const auto& c : comps_)
        v += c.weight * c.inv_box_mass * mvn_pdf(x, c.center, c.chol, n, c.log_norm);
    return v;
}

// ---------------------------------------------------------------------------
// Sampler

struct Sampler::Node {
    // One of: uniform draw, gaussian mixture, dirac mixture, or recursion.
    DensityKind kind;
    struct GaussianPrep {
        std::vector<double> center;
        std::vector<double> chol;  // lower triangular
    };
    std::vector<double> cum_weights;
    std::vector<GaussianPrep> gaussians;
    std::vector<std::vector<double>> atom_centers;
    std::vector<std::shared_ptr<const Node>> children;
};

namespace {

std::shared_ptr<const Sampler::Node> build_node(const DensitySpec& spec, const BoxDomain& box) {
    auto node = std::make_shared<Sampler::Node>();
    node->kind = spec.kind;
    const int n = box.dim();
    auto cum = [&](const std::vector<double>& w) {
        std::vector<double> c(w.size());
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            s += w[i];
            c[i] = s;
        }
        return c;
    };
    switch (spec.kind) {
        case DensityKind::uniform:
            break;
        case DensityKind::gaussian_mixture: {
            std::vector<double> w;
            for (const auto& c : spec.components) {
                w.push_back(c.weight);
                node->gaussians.push_back({c.center, cholesky(c.cov, n)});
            }
            node->cum_weights = cum(w);
            break;
        }
        case DensityKind::dirac_mixture: {
            std::vector<double> w;
            for (const auto& a : spec.atoms) {
                w.push_back(a.weight);
                node->atom_centers.push_back(a.center);
            }
            node->cum_weights = cum(w);
            break;
        }
        case DensityKind::convex_combination: {
            node->cum_weights = cum(spec.part_weights);
            for (const auto& p : spec.parts) node->children.push_back(build_node(*p, box));
            break;
        }
    }
    return node;
}

std::size_t pick(const std::vector<double>& cum, double u) {
    const double target = u * cum.back();
    for (std::size_t i = 0; i < cum.size(); ++i)
        if (target < cum[i]) return i;
    return cum.size() - 1;
}

void draw_node(const Sampler::Node& node, const BoxDomain& box, PhiloxStream& stream,
               std::span<double> out) {
    const int n = box.dim();
    switch (node.kind) {
        case DensityKind::uniform:
            for (int k = 0; k < n; ++k)
                out[k] = box.lower[k] + box.width(k) * stream.next_double();
            return;
        case DensityKind::gaussian_mixture: {
            const auto& g = node.gaussians[pick(node.cum_weights, stream.next_double())];
            double z[8];
            for (int attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
                for (int k = 0; k < n; ++k) z[k] = stream.next_normal();
                for (int k = 0; k < n; ++k) {
                    double s = g.center[k];
                    for (int j = 0; j <= k; ++j)
                        s += g.chol[static_cast<std::size_t>(k) * n + j] * z[j];
                    out[k] = s;
                }
                if (box.contains(out.subspan(0, n))) return;
            }
            throw TruncationError(
                "rejection acceptance below ~1e-4: covariance too wide for the domain");
        }
        case DensityKind::dirac_mixture: {
            const auto& c = node.atom_centers[pick(node.cum_weights, stream.next_double())];
            for (int k = 0; k < n; ++k) out[k] = c[k];
            return;
        }
        case DensityKind::convex_combination: {
            const auto& child = node.children[pick(node.cum_weights, stream.next_double())];
            draw_node(*child, box, stream, out);
            return;
        }
    }
}

}  // namespace

Sampler::Sampler(const DensitySpec& spec, const BoxDomain& domain) : box_(domain) {
    validate_spec(spec, domain);
    if (domain.dim() > 8) throw InvalidSpecError("sampling supports dim <= 8");
    root_ = build_node(spec, domain);
}

void Sampler::draw(PhiloxStream& stream, std::span<double> out) const {
    draw_node(*root_, box_, stream, out);
}

SampleSet sample(const DensitySpec& spec, const BoxDomain& domain, std::size_t count,
                 std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample requires count >= 1");
    const Sampler sampler(spec, domain);
    SampleSet set;
    set.dim = domain.dim();
    set.seed = seed;
    set.source = spec;
    set.points = kernels::sample_points(sampler, domain.dim(), count, seed);
    return set;
}

double density_at(const DensitySpec& spec, const BoxDomain& domain, std::span<const double> x) {
    return DensityEvaluator(spec, domain)(x);
}

std::vector<DensitySpec> shrinking_sequence(const DensitySpec& base,
                                            const std::vector<DiracAtom>& atoms,
                                            const std::vector<double>& scales) {
    if (base.kind != DensityKind::gaussian_mixture || base.components.size() != 1)
        throw InvalidSpecError("shrinking_sequence base must be a single gaussian template");
    if (atoms.empty()) throw InvalidSpecError("shrinking_sequence requires atoms");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0)) throw InvalidSpecError("shrinking_sequence scales must be positive");
        if (i > 0 && !(scales[i] < scales[i - 1]))
            throw InvalidSpecError("shrinking_sequence scales must be strictly decreasing");
    }
    const std::vector<double>& tmpl = base.components[0].cov;
    std::vector<DensitySpec> stages;
    stages.reserve(scales.size());
    for (double s : scales) {
        std::vector<GaussianComponent> comps;
        comps.reserve(atoms.size());
        for (const auto& a : atoms) {
            GaussianComponent c;
            c.weight = a.weight;
            c.center = a.center;
            c.cov = tmpl;
            for (double& v : c.cov) v *= s * s;
            comps.push_back(std::move(c));
        }
        stages.push_back(DensitySpec::gaussian_mixture(std::move(comps)));
    }
    return stages;
}

std::vector<DensitySpec> shrinking_sequence(const std::vector<DiracAtom>& atoms,
                                            const std::vector<double>& scales) {
    if (atoms.empty()) throw InvalidSpecError("shrinking_sequence requires atoms");
    const int n = static_cast<int>(atoms.front().center.size());
    DensitySpec base = DensitySpec::gaussian(std::vector<double>(n, 0.0), 1.0);
    return shrinking_sequence(base, atoms, scales);
}

}  // namespace scp
