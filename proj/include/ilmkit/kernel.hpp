#ifndef ILMKIT_KERNEL_HPP
#define ILMKIT_KERNEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ilmkit/errors.hpp"

namespace ilm {

enum class KernelFamily { PowerLaw, PiecewiseConstant, PiecewiseLinear };

inline std::string kernel_family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::PowerLaw: return "powerlaw";
        case KernelFamily::PiecewiseConstant: return "constant";
        default: return "linear";
    }
}

// Piecewise kernels have n pieces separated by n-1 change points
// delta_1 < ... < delta_{n-1}; delta_0 = 0 is implicit and fixed. Bins are
// half-open [delta_{l-1}, delta_l), the last one unbounded, so a distance
// exactly at a change point belongs to the piece to its right.
struct KernelSpec {
    KernelFamily family = KernelFamily::PiecewiseConstant;
    std::vector<double> change_points;
    bool change_points_estimated = false;
    int n_steps = 1;

    static KernelSpec power_law() { return {KernelFamily::PowerLaw, {}, false, 1}; }
    static KernelSpec piecewise_constant(std::vector<double> cps, bool estimated = false) {
        const int n = static_cast<int>(cps.size()) + 1;
        return {KernelFamily::PiecewiseConstant, std::move(cps), estimated, n};
    }
    static KernelSpec piecewise_linear(std::vector<double> cps, bool estimated = false) {
        const int n = static_cast<int>(cps.size()) + 1;
        return {KernelFamily::PiecewiseLinear, std::move(cps), estimated, n};
    }
};

// 0-based piece index of the bin containing d.
inline std::size_t kernel_piece(const std::vector<double>& change_points, double d) {
    return static_cast<std::size_t>(
        std::upper_bound(change_points.begin(), change_points.end(), d) - change_points.begin());
}

// d^(-beta); the baseline alpha multiplies the summed kernel at the
// infection-probability level, not here.
inline double eval_power_law(double beta, double d) {
    if (d < 0.0) throw input_error("negative distance");
    if (d == 0.0) throw numeric_error("power-law kernel is singular at distance 0");
    return std::pow(d, -beta);
}

inline double eval_piecewise_constant(const std::vector<double>& alphas,
                                      const std::vector<double>& change_points, double d) {
    if (d < 0.0) throw input_error("negative distance");
    return alphas[kernel_piece(change_points, d)];
}

// max(0, alpha_l + beta_l * d): with beta_l <= 0 a piece can cross zero
// inside its bin (always in the unbounded last bin), and the model requires a
// non-negative kernel, so the value is clamped rather than the parameter
// vector rejected.
inline double eval_piecewise_linear(const std::vector<double>& alphas,
                                    const std::vector<double>& betas,
                                    const std::vector<double>& change_points, double d) {
    if (d < 0.0) throw input_error("negative distance");
    const std::size_t l = kernel_piece(change_points, d);
    return std::max(0.0, alphas[l] + betas[l] * d);
}

// Signed jump d_l = (alpha_{l-1} - alpha_l) + delta_{l-1} (beta_{l-1} - beta_l)
// of a piecewise linear kernel at change point delta_{l-1}, for the 1-based
// piece index l in [2, n]. Zero gap means the pieces meet exactly.
inline double continuity_gap(const KernelSpec& spec, const std::vector<double>& alphas,
                             const std::vector<double>& betas,
                             const std::vector<double>& change_points, int l) {
    if (spec.family != KernelFamily::PiecewiseLinear)
        throw input_error("continuity gap is defined for piecewise linear kernels only");
    if (l < 2 || l > spec.n_steps) throw input_error("piece index out of [2, n]");
    const std::size_t hi = static_cast<std::size_t>(l - 1);  // 0-based upper piece
    const double delta = change_points[hi - 1];
    return (alphas[hi - 1] - alphas[hi]) + delta * (betas[hi - 1] - betas[hi]);
}

// Structural validation of a kernel spec plus a parameter set. Returns the
// list of violations instead of throwing: sign violations make the prior
// density zero during sampling, they are not hard errors.
struct KernelParamsRef {
    const std::vector<double>* alphas = nullptr;
    const std::vector<double>* betas = nullptr;   // linear only
    double epsilon = 0.0;
    bool has_sparks = false;
};

inline std::vector<std::string> validate_spec(const KernelSpec& spec, const KernelParamsRef& params) {
    std::vector<std::string> out;
    const auto& cps = spec.change_points;
    if (spec.family == KernelFamily::PowerLaw) {
        if (!cps.empty()) out.push_back("power-law kernel takes no change points");
        if (params.alphas && params.alphas->size() == 1) {
            if ((*params.alphas)[0] <= 0.0) out.push_back("alpha must be positive");
        }
        if (params.betas && params.betas->size() == 1 && (*params.betas)[0] <= 0.0)
            out.push_back("beta must be positive");
    } else {
        if (spec.n_steps != static_cast<int>(cps.size()) + 1)
            out.push_back("n_steps must equal change point count + 1");
        for (std::size_t k = 0; k < cps.size(); ++k) {
            const double lo = k == 0 ? 0.0 : cps[k - 1];
            if (!(cps[k] > lo)) {
                out.push_back("change points must be strictly increasing and positive");
                break;
            }
        }
        if (params.alphas) {
            if (static_cast<int>(params.alphas->size()) != spec.n_steps)
                out.push_back("expected one alpha per piece");
            for (double a : *params.alphas)
                if (a < 0.0) { out.push_back("alpha must be non-negative"); break; }
        }
        if (spec.family == KernelFamily::PiecewiseLinear) {
            if (!params.betas || static_cast<int>(params.betas->size()) != spec.n_steps)
                out.push_back("expected one beta per piece");
            else
                for (double b : *params.betas)
                    if (b > 0.0) { out.push_back("beta must be non-positive"); break; }
        } else if (params.betas && !params.betas->empty()) {
            out.push_back("constant kernel takes no betas");
        }
    }
    if (params.has_sparks && params.epsilon < 0.0) out.push_back("sparks term must be non-negative");
    return out;
}

}  // namespace ilm

#endif
