#ifndef ILMKIT_PARAMS_HPP
#define ILMKIT_PARAMS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "ilmkit/errors.hpp"
#include "ilmkit/kernel.hpp"

namespace ilm {

// Maps the sampler's flat parameter vector onto named model parameters.
// Ordering: kernel parameters (alpha, beta for power law; alpha_l or
// alpha_l,beta_l per piece), then estimated change points, then the sparks
// term. Fixed change points live in the KernelSpec, not in the vector.
class ParameterLayout {
public:
    ParameterLayout() = default;

    ParameterLayout(KernelSpec kernel, bool sparks) : kernel_(std::move(kernel)), sparks_(sparks) {
        switch (kernel_.family) {
            case KernelFamily::PowerLaw:
                alpha_base_ = 0;
                beta_base_ = 1;
                names_ = {"alpha", "beta"};
                break;
            case KernelFamily::PiecewiseConstant:
                alpha_base_ = 0;
                for (int l = 1; l <= kernel_.n_steps; ++l) names_.push_back("alpha" + std::to_string(l));
                break;
            case KernelFamily::PiecewiseLinear:
                alpha_base_ = 0;
                for (int l = 1; l <= kernel_.n_steps; ++l) {
                    names_.push_back("alpha" + std::to_string(l));
                    names_.push_back("beta" + std::to_string(l));
                }
                break;
        }
        if (kernel_.change_points_estimated) {
            delta_base_ = static_cast<int>(names_.size());
            for (std::size_t k = 1; k <= kernel_.change_points.size(); ++k)
                names_.push_back("delta" + std::to_string(k));
        }
        if (sparks_) {
            epsilon_index_ = static_cast<int>(names_.size());
            names_.push_back("epsilon");
        }
    }

    const KernelSpec& kernel() const { return kernel_; }
    bool sparks() const { return sparks_; }
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return static_cast<int>(i);
        return -1;
    }

    // 0-based piece indices.
    int alpha_index(int piece) const {
        return kernel_.family == KernelFamily::PiecewiseLinear ? alpha_base_ + 2 * piece
                                                               : alpha_base_ + piece;
    }
    int beta_index(int piece) const {
        return kernel_.family == KernelFamily::PiecewiseLinear ? alpha_base_ + 2 * piece + 1
                                                               : beta_base_;
    }
    int delta_index(int cp) const { return delta_base_ < 0 ? -1 : delta_base_ + cp; }
    int epsilon_index() const { return epsilon_index_; }
    bool deltas_estimated() const { return delta_base_ >= 0; }
    int n_pieces() const { return kernel_.family == KernelFamily::PowerLaw ? 1 : kernel_.n_steps; }
    int n_change_points() const { return static_cast<int>(kernel_.change_points.size()); }

private:
    KernelSpec kernel_;
    bool sparks_ = false;
    std::vector<std::string> names_;
    int alpha_base_ = 0;
    int beta_base_ = -1;
    int delta_base_ = -1;
    int epsilon_index_ = -1;
};

// Kernel parameters pulled out of a flat vector; reused as scratch in hot
// loops to avoid reallocation.
struct KernelView {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<double> change_points;
    double epsilon = 0.0;
};

inline void unpack_into(const ParameterLayout& layout, const std::vector<double>& theta,
                        KernelView& view) {
    if (theta.size() != layout.size()) throw input_error("parameter vector length mismatch");
    const KernelSpec& k = layout.kernel();
    if (k.family == KernelFamily::PowerLaw) {
        view.alphas.assign(1, theta[layout.alpha_index(0)]);
        view.betas.assign(1, theta[layout.beta_index(0)]);
        view.change_points.clear();
    } else {
        const int n = k.n_steps;
        view.alphas.resize(n);
        for (int l = 0; l < n; ++l) view.alphas[l] = theta[layout.alpha_index(l)];
        if (k.family == KernelFamily::PiecewiseLinear) {
            view.betas.resize(n);
            for (int l = 0; l < n; ++l) view.betas[l] = theta[layout.beta_index(l)];
        } else {
            view.betas.clear();
        }
        if (layout.deltas_estimated()) {
            view.change_points.resize(k.change_points.size());
            for (std::size_t c = 0; c < k.change_points.size(); ++c)
                view.change_points[c] = theta[layout.delta_index(static_cast<int>(c))];
        } else {
            view.change_points = k.change_points;
        }
    }
    view.epsilon = layout.sparks() ? theta[layout.epsilon_index()] : 0.0;
}

inline KernelView unpack(const ParameterLayout& layout, const std::vector<double>& theta) {
    KernelView view;
    unpack_into(layout, theta, view);
    return view;
}

// Kernel value k(d) for one susceptible-infectious pair. For the power law
// this is d^(-beta) scaled by alpha, matching its use inside the summed
// infectious pressure.
inline double kernel_value(const ParameterLayout& layout, const KernelView& view, double d) {
    switch (layout.kernel().family) {
        case KernelFamily::PowerLaw: return view.alphas[0] * eval_power_law(view.betas[0], d);
        case KernelFamily::PiecewiseConstant:
            return eval_piecewise_constant(view.alphas, view.change_points, d);
        default: return eval_piecewise_linear(view.alphas, view.betas, view.change_points, d);
    }
}

}  // namespace ilm

#endif
