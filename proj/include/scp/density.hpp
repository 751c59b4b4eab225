#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "scp/domain.hpp"
#include "scp/philox.hpp"

namespace scp {

enum class DensityKind { uniform, gaussian_mixture, dirac_mixture, convex_combination };

struct GaussianComponent {
    double weight = 1.0;
    std::vector<double> center;
    std::vector<double> cov;  // row-major dim x dim, SPD
};

struct DiracAtom {
    double weight = 1.0;
    std::vector<double> center;
};

// Declarative probability measure on the box: the uniform measure, a mixture
// of box-truncated Gaussians, a finite Dirac mixture, or a convex combination
// of the above. Truncated-Gaussian components are normalized per component
// over the box.
struct DensitySpec {
    DensityKind kind = DensityKind::uniform;
    std::vector<GaussianComponent> components;              // gaussian_mixture
    std::vector<DiracAtom> atoms;                           // dirac_mixture
    std::vector<double> part_weights;                       // convex_combination
    std::vector<std::shared_ptr<const DensitySpec>> parts;  // convex_combination

    bool has_density() const;

    static DensitySpec uniform();
    static DensitySpec gaussian(std::vector<double> center, double sd);
    static DensitySpec gaussian(std::vector<double> center, std::vector<double> sds);
    static DensitySpec gaussian_mixture(std::vector<GaussianComponent> comps);
    static DensitySpec dirac_mixture(std::vector<DiracAtom> atoms);
    static DensitySpec mix(double alpha, DensitySpec a, DensitySpec b);
};

// Structural checks: weights sum to 1 within 1e-12, covariances SPD,
// dimensions consistent with the box, Dirac atoms inside the box.
void validate_spec(const DensitySpec& spec, const BoxDomain& domain);

struct SampleSet {
    int dim = 0;
    std::uint64_t seed = 0;
    DensitySpec source;
    std::vector<double> points;  // count x dim, row-major

    std::size_t count() const { return dim == 0 ? 0 : points.size() / dim; }
    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * dim, static_cast<std::size_t>(dim)};
    }
};

// Box-normalized density evaluator. Normalization constants and Cholesky
// factors are computed once at construction; evaluation is pure and
// thread-safe. Throws NoDensityError for specs with a Dirac part.
class DensityEvaluator {
public:
    DensityEvaluator(const DensitySpec& spec, const BoxDomain& domain);

    double operator()(std::span<const double> x) const;
    const BoxDomain& domain() const { return box_; }

private:
    struct Prepared {
        double weight;
        std::vector<double> center;
        std::vector<double> chol;
        double log_norm;
        double inv_box_mass;
    };
    BoxDomain box_;
    double uniform_height_ = 0.0;  // weight / volume
    std::vector<Prepared> comps_;
};

// Draws one point per call. Truncated Gaussians are rejection-sampled against
// the box; a component needing more than kMaxRejectionAttempts tries for a
// single accept (acceptance below ~1e-4) raises TruncationError.
inline constexpr int kMaxRejectionAttempts = 20000;

class Sampler {
public:
    struct Node;

    Sampler(const DensitySpec& spec, const BoxDomain& domain);

    void draw(PhiloxStream& stream, std::span<double> out) const;
    int dim() const { return box_.dim(); }

private:
    BoxDomain box_;
    std::shared_ptr<const Node> root_;
};

// i.i.d. draws with one counter-based stream per sample index, so results
// are identical for serial and parallel execution.
SampleSet sample(const DensitySpec& spec, const BoxDomain& domain, std::size_t count,
                 std::uint64_t seed);

double density_at(const DensitySpec& spec, const BoxDomain& domain, std::span<const double> x);

// Stage i is a truncated-Gaussian mixture at the atoms with covariance
// scales[i]^2 * cov(base). base must be a single-component Gaussian template
// (its center is ignored); the one-argument overload uses the identity.
std::vector<DensitySpec> shrinking_sequence(const DensitySpec& base,
                                            const std::vector<DiracAtom>& atoms,
                                            const std::vector<double>& scales);
std::vector<DensitySpec> shrinking_sequence(const std::vector<DiracAtom>& atoms,
                                            const std::vector<double>& scales);

}  // namespace scp
