#ifndef ILMKIT_PRIOR_HPP
#define ILMKIT_PRIOR_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "ilmkit/errors.hpp"
#include "ilmkit/kernel.hpp"
#include "ilmkit/params.hpp"
#include "ilmkit/rng.hpp"

namespace ilm {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

enum class PriorKind { PositiveHalfNormal, NegativeHalfNormal, Uniform };

// One marginal prior. Half-normals are parameterized by the variance of the
// underlying normal, N+(0, v) / N-(0, v); uniforms by their bounds.
struct PriorDensity {
    PriorKind kind = PriorKind::PositiveHalfNormal;
    double a = 1e5;  // variance, or lower bound
    double b = 0.0;  // upper bound (uniform only)

    static PriorDensity positive_half_normal(double variance) {
        if (!(variance > 0.0)) throw input_error("half-normal variance must be positive");
        return {PriorKind::PositiveHalfNormal, variance, 0.0};
    }
    static PriorDensity negative_half_normal(double variance) {
        if (!(variance > 0.0)) throw input_error("half-normal variance must be positive");
        return {PriorKind::NegativeHalfNormal, variance, 0.0};
    }
    static PriorDensity uniform(double lo, double hi) {
        if (!(lo < hi)) throw input_error("uniform prior needs lower < upper");
        return {PriorKind::Uniform, lo, hi};
    }

    double log_density(double x) const {
        switch (kind) {
            case PriorKind::PositiveHalfNormal:
                if (x < 0.0) return neg_inf;
                return std::log(2.0) - 0.5 * std::log(2.0 * std::numbers::pi * a) - x * x / (2.0 * a);
            case PriorKind::NegativeHalfNormal:
                if (x > 0.0) return neg_inf;
                return std::log(2.0) - 0.5 * std::log(2.0 * std::numbers::pi * a) - x * x / (2.0 * a);
            default:
                return (x < a || x > b) ? neg_inf : -std::log(b - a);
        }
    }

    double sample(Rng& rng) const {
        switch (kind) {
            case PriorKind::PositiveHalfNormal: return std::abs(rng.normal(0.0, std::sqrt(a)));
            case PriorKind::NegativeHalfNormal: return -std::abs(rng.normal(0.0, std::sqrt(a)));
            default: return rng.uniform(a, b);
        }
    }

    // Random-walk step size a fresh chain starts from: 10% of the prior scale,
    // 5% of the range for uniforms.
    double initial_step() const {
        return kind == PriorKind::Uniform ? 0.05 * (b - a) : 0.10 * std::sqrt(a);
    }

    std::string describe() const {
        switch (kind) {
            case PriorKind::PositiveHalfNormal: return "halfnormal " + std::to_string(a);
            case PriorKind::NegativeHalfNormal: return "neghalfnormal " + std::to_string(a);
            default: return "uniform " + std::to_string(a) + " " + std::to_string(b);
        }
    }
};

// Priors for every free parameter (aligned with the ParameterLayout), plus
// the optional smoothing prior on the linear kernel's continuity gaps:
// d_l ~ Exp(D_l) with scale D_l per interior change point. The exponential
// has support d_l >= 0, so a negative gap (lower piece ending below the next
// one) gets prior density zero.
struct PriorSpec {
    std::vector<PriorDensity> marginals;
    std::vector<double> smoothing_scales;  // one D per change point; empty = no smoothing

    void validate(const ParameterLayout& layout) const {
        if (marginals.size() != layout.size())
            throw input_error("need exactly one prior per free parameter");
        if (!smoothing_scales.empty()) {
            if (layout.kernel().family != KernelFamily::PiecewiseLinear)
                throw input_error("smoothing prior applies to piecewise linear kernels only");
            if (smoothing_scales.size() != static_cast<std::size_t>(layout.n_change_points()))
                throw input_error("need one smoothing scale per change point");
            for (double d : smoothing_scales)
                if (!(d > 0.0)) throw input_error("smoothing scale must be positive");
        }
    }
};

// Vague defaults from the simulation studies: N+(0, 1e5) for alphas and the
// power-law beta, N-(0, 1e5) for linear betas, N+(0, 1e5) for sparks.
// Estimated change points have no sensible default; callers must set those
// uniforms explicitly.
inline PriorSpec default_priors(const ParameterLayout& layout) {
    PriorSpec spec;
    const bool linear = layout.kernel().family == KernelFamily::PiecewiseLinear;
    for (const std::string& name : layout.names()) {
        if (name.rfind("beta", 0) == 0 && linear)
            spec.marginals.push_back(PriorDensity::negative_half_normal(1e5));
        else if (name.rfind("delta", 0) == 0)
            throw input_error("no default prior for estimated change point " + name);
        else
            spec.marginals.push_back(PriorDensity::positive_half_normal(1e5));
    }
    return spec;
}

// Joint log prior density of the flat parameter vector. -inf encodes any
// support violation: a marginal out of support, change points out of order
// or outside their uniform bounds, or a negative smoothing gap.
inline double log_prior(const std::vector<double>& theta, const PriorSpec& priors,
                        const ParameterLayout& layout) {
    if (theta.size() != layout.size() || priors.marginals.size() != layout.size())
        throw input_error("parameter/prior length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double lp = priors.marginals[i].log_density(theta[i]);
        if (lp == neg_inf) return neg_inf;
        total += lp;
    }
    if (layout.deltas_estimated()) {
        double prev = 0.0;
        for (int c = 0; c < layout.n_change_points(); ++c) {
            const double d = theta[layout.delta_index(c)];
            if (!(d > prev)) return neg_inf;
            prev = d;
        }
    }
    if (!priors.smoothing_scales.empty()) {
        KernelView view;
        unpack_into(layout, theta, view);
        for (int l = 2; l <= layout.kernel().n_steps; ++l) {
            const double gap =
                continuity_gap(layout.kernel(), view.alphas, view.betas, view.change_points, l);
            if (gap < 0.0) return neg_inf;
            const double scale = priors.smoothing_scales[static_cast<std::size_t>(l - 2)];
            total += -std::log(scale) - gap / scale;
        }
    }
    return total;
}

}  // namespace ilm

#endif
