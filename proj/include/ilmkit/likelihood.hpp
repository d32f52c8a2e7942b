#ifndef ILMKIT_LIKELIHOOD_HPP
#define ILMKIT_LIKELIHOOD_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "ilmkit/errors.hpp"
#include "ilmkit/events.hpp"
#include "ilmkit/model.hpp"
#include "ilmkit/params.hpp"
#include "ilmkit/population.hpp"
#include "ilmkit/prior.hpp"

namespace ilm {

// Half-open block of time steps [t_min, t_max). The likelihood multiplies one
// factor per step t, explaining the transitions observed at t+1 from the state
// at t, so events at t_min itself are conditioned on rather than explained.
struct Window {
    int t_min = 0;
    int t_max = 0;
};

inline Window full_window(const EventHistory& history) { return {0, history.horizon}; }

// Exact log likelihood with the parameter-independent structure hoisted out.
//
// Each new case (i, t+1) contributes log(1 - exp(-(sum_j k(d_ij) + eps))) with
// j running over I(t); those sums are nonlinear in the pressure, so each term
// keeps its own sorted distance list. Every survivor contributes the pressure
// itself with a minus sign, which is linear, so all survivor terms collapse
// into one weighted distance multiset: weight of d = number of (survivor,
// infective, t) triples at that distance. Piecewise kernels then reduce to
// binary searches against the bin edges and prefix-sum differences, and the
// power law to one cached power sum per distinct beta.
//
// Instances are cheap to copy; the beta memo makes evaluation non-reentrant,
// so concurrent callers should each copy the evaluator first.
class LikelihoodEvaluator {
  public:
    LikelihoodEvaluator(const Population& pop, const EventHistory& history,
                        const ModelSpec& model, Window window)
        : layout_(model.layout()), window_(window) {
        if (history.framework != model.framework)
            throw input_error("event history and model disagree on the compartmental framework");
        if (window.t_min < 0 || window.t_max > history.horizon || window.t_min >= window.t_max)
            throw input_error("likelihood window must satisfy 0 <= t_min < t_max <= horizon");
        const std::size_t n = pop.size();
        std::vector<std::uint32_t> pair_weight(n * n, 0);
        std::vector<int> infectious;
        std::vector<double> dists;
        for (int t = window.t_min; t < window.t_max; ++t) {
            infectious.clear();
            for (std::size_t j = 0; j < n; ++j)
                if (history.infectious_at(static_cast<int>(j), t))
                    infectious.push_back(static_cast<int>(j));
            for (std::size_t i = 0; i < n; ++i) {
                const int entry = history.entry_time(static_cast<int>(i));
                if (entry == t + 1) {
                    dists.clear();
                    for (int j : infectious) dists.push_back(pop.distance(i, j));
                    std::sort(dists.begin(), dists.end());
                    Term term;
                    term.d_off = inf_d_.size();
                    term.p_off = inf_pd_.size();
                    term.len = dists.size();
                    inf_d_.insert(inf_d_.end(), dists.begin(), dists.end());
                    inf_pd_.push_back(0.0);
                    for (double d : dists) inf_pd_.push_back(inf_pd_.back() + d);
                    terms_.push_back(term);
                } else if (entry > t + 1) {
                    survival_pairs_ += 1.0;
                    for (int j : infectious) ++pair_weight[i * n + static_cast<std::size_t>(j)];
                }
            }
        }
        std::vector<std::pair<double, double>> weighted;  // (distance, weight)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (const std::uint32_t w = pair_weight[i * n + j])
                    weighted.emplace_back(pop.distance(i, j), static_cast<double>(w));
        std::sort(weighted.begin(), weighted.end());
        surv_d_.reserve(weighted.size());
        surv_pw_.push_back(0.0);
        surv_pwd_.push_back(0.0);
        for (const auto& [d, w] : weighted) {
            surv_d_.push_back(d);
            surv_pw_.push_back(surv_pw_.back() + w);
            surv_pwd_.push_back(surv_pwd_.back() + w * d);
        }
        if (layout_.kernel().family == KernelFamily::PowerLaw) {
            const bool zero_inf = !inf_d_.empty() &&
                                  *std::min_element(inf_d_.begin(), inf_d_.end()) == 0.0;
            const bool zero_surv = !surv_d_.empty() && surv_d_.front() == 0.0;
            if (zero_inf || zero_surv)
                throw numeric_error("power-law kernel is undefined at distance zero");
            // d^(-beta) = exp(-beta log d); caching the logs makes the
            // per-beta memo refresh an exp instead of a pow per distance
            inf_logd_.reserve(inf_d_.size());
            for (double d : inf_d_) inf_logd_.push_back(std::log(d));
            surv_logd_.reserve(surv_d_.size());
            for (double d : surv_d_) surv_logd_.push_back(std::log(d));
        }
    }

    const ParameterLayout& layout() const { return layout_; }
    Window window() const { return window_; }
    std::size_t infection_term_count() const { return terms_.size(); }
    double survival_pair_count() const { return survival_pairs_; }

    double log_likelihood(const std::vector<double>& theta) const {
        KernelView view;
        unpack_into(layout_, theta, view);
        double ll = 0.0;
        switch (layout_.kernel().family) {
            case KernelFamily::PowerLaw: {
                refresh_power_memo(view.betas[0]);
                ll -= view.alphas[0] * memo_surv_sum_ + view.epsilon * survival_pairs_;
                for (std::size_t k = 0; k < terms_.size(); ++k) {
                    const double pressure = view.alphas[0] * memo_term_sums_[k] + view.epsilon;
                    if (!(pressure > 0.0)) return neg_inf;
                    ll += std::log(-std::expm1(-pressure));
                }
                return ll;
            }
            case KernelFamily::PiecewiseConstant: {
                ll -= weighted_constant(view) + view.epsilon * survival_pairs_;
                for (const Term& term : terms_) {
                    const double pressure = term_constant(term, view) + view.epsilon;
                    if (!(pressure > 0.0)) return neg_inf;
                    ll += std::log(-std::expm1(-pressure));
                }
                return ll;
            }
            default: {
                ll -= weighted_linear(view) + view.epsilon * survival_pairs_;
                for (const Term& term : terms_) {
                    const double pressure = term_linear(term, view) + view.epsilon;
                    if (!(pressure > 0.0)) return neg_inf;
                    ll += std::log(-std::expm1(-pressure));
                }
                return ll;
            }
        }
    }

  private:
    struct Term {
        std::size_t d_off = 0;
        std::size_t p_off = 0;
        std::size_t len = 0;
    };

    // First index in the sorted range [first, first+len) whose value is >= x.
    static std::size_t cut(const double* first, std::size_t len, double x) {
        return static_cast<std::size_t>(std::lower_bound(first, first + len, x) - first);
    }

    double term_constant(const Term& term, const KernelView& view) const {
        const double* d = inf_d_.data() + term.d_off;
        const int pieces = layout_.kernel().n_steps;
        double sum = 0.0;
        std::size_t lo = 0;
        for (int p = 0; p < pieces; ++p) {
            const std::size_t hi =
                p + 1 < pieces ? cut(d, term.len, view.change_points[static_cast<std::size_t>(p)])
                               : term.len;
            sum += view.alphas[static_cast<std::size_t>(p)] * static_cast<double>(hi - lo);
            lo = hi;
        }
        return sum;
    }

    double term_linear(const Term& term, const KernelView& view) const {
        const double* d = inf_d_.data() + term.d_off;
        const double* pd = inf_pd_.data() + term.p_off;
        const int pieces = layout_.kernel().n_steps;
        double sum = 0.0;
        std::size_t lo = 0;
        for (int p = 0; p < pieces; ++p) {
            const std::size_t hi =
                p + 1 < pieces ? cut(d, term.len, view.change_points[static_cast<std::size_t>(p)])
                               : term.len;
            sum += linear_slice(d, pd, lo, hi, view.alphas[static_cast<std::size_t>(p)],
                                view.betas[static_cast<std::size_t>(p)]);
            lo = hi;
        }
        return sum;
    }

    double weighted_constant(const KernelView& view) const {
        const int pieces = layout_.kernel().n_steps;
        double sum = 0.0;
        std::size_t lo = 0;
        for (int p = 0; p < pieces; ++p) {
            const std::size_t hi =
                p + 1 < pieces
                    ? cut(surv_d_.data(), surv_d_.size(), view.change_points[static_cast<std::size_t>(p)])
                    : surv_d_.size();
            sum += view.alphas[static_cast<std::size_t>(p)] * (surv_pw_[hi] - surv_pw_[lo]);
            lo = hi;
        }
        return sum;
    }

    double weighted_linear(const KernelView& view) const {
        const int pieces = layout_.kernel().n_steps;
        double sum = 0.0;
        std::size_t lo = 0;
        for (int p = 0; p < pieces; ++p) {
            const std::size_t hi =
                p + 1 < pieces
                    ? cut(surv_d_.data(), surv_d_.size(), view.change_points[static_cast<std::size_t>(p)])
                    : surv_d_.size();
            sum += weighted_linear_piece(lo, hi, view.alphas[static_cast<std::size_t>(p)],
                                         view.betas[static_cast<std::size_t>(p)]);
            lo = hi;
        }
        return sum;
    }

    // Sum of max(0, alpha + beta d) over the sorted slice d[lo..hi), with pd
    // the running prefix sum of d. The clamp boundary -alpha/beta splits the
    // slice at a single cut because the slice is sorted.
    static double linear_slice(const double* d, const double* pd, std::size_t lo, std::size_t hi,
                               double alpha, double beta) {
        if (lo >= hi) return 0.0;
        if (beta == 0.0)
            return alpha > 0.0 ? alpha * static_cast<double>(hi - lo) : 0.0;
        const double root = -alpha / beta;
        if (beta < 0.0) {
            const std::size_t e = lo + cut(d + lo, hi - lo, root);
            return alpha * static_cast<double>(e - lo) + beta * (pd[e] - pd[lo]);
        }
        const std::size_t s = lo + cut(d + lo, hi - lo, root);
        return alpha * static_cast<double>(hi - s) + beta * (pd[hi] - pd[s]);
    }

    double weighted_linear_piece(std::size_t lo, std::size_t hi, double alpha, double beta) const {
        if (lo >= hi) return 0.0;
        if (beta == 0.0)
            return alpha > 0.0 ? alpha * (surv_pw_[hi] - surv_pw_[lo]) : 0.0;
        const double root = -alpha / beta;
        if (beta < 0.0) {
            const std::size_t e = lo + cut(surv_d_.data() + lo, hi - lo, root);
            return alpha * (surv_pw_[e] - surv_pw_[lo]) + beta * (surv_pwd_[e] - surv_pwd_[lo]);
        }
        const std::size_t s = lo + cut(surv_d_.data() + lo, hi - lo, root);
        return alpha * (surv_pw_[hi] - surv_pw_[s]) + beta * (surv_pwd_[hi] - surv_pwd_[s]);
    }

    void refresh_power_memo(double beta) const {
        if (beta == memo_beta_) return;
        memo_term_sums_.assign(terms_.size(), 0.0);
        for (std::size_t k = 0; k < terms_.size(); ++k) {
            const double* ld = inf_logd_.data() + terms_[k].d_off;
            double s = 0.0;
            for (std::size_t m = 0; m < terms_[k].len; ++m) s += std::exp(-beta * ld[m]);
            memo_term_sums_[k] = s;
        }
        double s = 0.0;
        for (std::size_t m = 0; m < surv_d_.size(); ++m)
            s += (surv_pw_[m + 1] - surv_pw_[m]) * std::exp(-beta * surv_logd_[m]);
        memo_surv_sum_ = s;
        memo_beta_ = beta;
    }

    ParameterLayout layout_;
    Window window_;
    std::vector<Term> terms_;
    std::vector<double> inf_d_;    // sorted distances, concatenated per term
    std::vector<double> inf_pd_;   // per-term prefix sums of inf_d_ (len+1 each)
    std::vector<double> surv_d_;   // sorted distinct survivor-pair distances
    std::vector<double> surv_pw_;  // prefix sums of weights, size()+1
    std::vector<double> surv_pwd_; // prefix sums of weight*distance, size()+1
    std::vector<double> inf_logd_;  // log distances (power-law only)
    std::vector<double> surv_logd_; // log distances (power-law only)
    double survival_pairs_ = 0.0;  // number of (survivor, t) pairs, for sparks

    mutable double memo_beta_ = std::numeric_limits<double>::quiet_NaN();
    mutable std::vector<double> memo_term_sums_;
    mutable double memo_surv_sum_ = 0.0;
};

inline double log_likelihood(const Population& pop, const EventHistory& history,
                             const ModelSpec& model, const std::vector<double>& theta,
                             Window window) {
    return LikelihoodEvaluator(pop, history, model, window).log_likelihood(theta);
}

// Log posterior up to the normalizing constant. An out-of-support draw is
// rejected by the prior alone; the likelihood evaluation counter makes that
// short-circuit observable.
class LogPosterior {
  public:
    LogPosterior(const LikelihoodEvaluator& lik, const PriorSpec& priors)
        : lik_(&lik), priors_(&priors) {
        priors.validate(lik.layout());
    }

    double operator()(const std::vector<double>& theta) const {
        const double lp = log_prior(theta, *priors_, lik_->layout());
        if (lp == neg_inf) return neg_inf;
        ++likelihood_evals_;
        return lp + lik_->log_likelihood(theta);
    }

    const ParameterLayout& layout() const { return lik_->layout(); }
    const LikelihoodEvaluator& likelihood() const { return *lik_; }
    const PriorSpec& priors() const { return *priors_; }
    long likelihood_evaluations() const { return likelihood_evals_; }

  private:
    const LikelihoodEvaluator* lik_;
    const PriorSpec* priors_;
    mutable long likelihood_evals_ = 0;
};

}  // namespace ilm

#endif
