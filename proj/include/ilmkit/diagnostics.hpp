#ifndef ILMKIT_DIAGNOSTICS_HPP
#define ILMKIT_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "ilmkit/errors.hpp"
#include "ilmkit/mcmc.hpp"

namespace ilm {

using DrawMatrix = std::vector<std::vector<double>>;  // row per draw

inline std::vector<double> column(const DrawMatrix& draws, std::size_t p) {
    std::vector<double> col;
    col.reserve(draws.size());
    for (const auto& row : draws) col.push_back(row.at(p));
    return col;
}

inline DrawMatrix pool_draws(const std::vector<ChainOutput>& chains) {
    DrawMatrix pooled;
    for (const ChainOutput& c : chains) pooled.insert(pooled.end(), c.draws.begin(), c.draws.end());
    return pooled;
}

// Quantile by linear interpolation of order statistics (the common
// statistical-software default). Input need not be sorted.
inline double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw input_error("quantile of an empty sample");
    if (p < 0.0 || p > 1.0) throw input_error("quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    const double h = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw input_error("mean of an empty sample");
    // exact for constant samples (accumulation would round)
    bool constant = true;
    for (double x : v)
        if (x != v.front()) {
            constant = false;
            break;
        }
    if (constant) return v.front();
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {  // denominator n-1
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

struct ParameterSummary {
    double mean = 0.0;
    double median = 0.0;
    double q025 = 0.0;
    double q975 = 0.0;
};

inline std::vector<ParameterSummary> summarize(const DrawMatrix& draws) {
    if (draws.size() < 2) throw input_error("posterior summary needs at least 2 draws");
    std::vector<ParameterSummary> out(draws[0].size());
    for (std::size_t p = 0; p < out.size(); ++p) {
        std::vector<double> col = column(draws, p);
        out[p].mean = mean_of(col);
        out[p].median = quantile(col, 0.5);
        out[p].q025 = quantile(col, 0.025);
        out[p].q975 = quantile(col, 0.975);
    }
    return out;
}

namespace detail {

// Batch-means standard error of the mean over the slice [first, first+len),
// non-overlapping batches, batch count floor(sqrt(len)). Returns the pair
// (mean, se^2) over the batched portion of the slice.
inline std::pair<double, double> batch_mean_se2(const std::vector<double>& v, std::size_t first,
                                                std::size_t len) {
    const std::size_t nb = static_cast<std::size_t>(std::sqrt(static_cast<double>(len)));
    const std::size_t bs = len / nb;
    std::vector<double> bmeans(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
        double s = 0.0;
        for (std::size_t k = 0; k < bs; ++k) s += v[first + b * bs + k];
        bmeans[b] = s / static_cast<double>(bs);
    }
    const double m = mean_of(bmeans);
    double var = 0.0;
    for (double x : bmeans) var += (x - m) * (x - m);
    var /= static_cast<double>(nb - 1);
    return {m, var / static_cast<double>(nb)};
}

}  // namespace detail

// Geweke convergence z-score per parameter: difference of early- and
// late-window means over the combined batch-means standard error. Both
// standard errors zero means the chain is flat in both windows; equal means
// give z = 0 by convention, unequal means give an infinite score (fails).
inline std::vector<double> geweke(const DrawMatrix& draws, double first_frac = 0.1,
                                  double last_frac = 0.5) {
    const std::size_t n = draws.size();
    const std::size_t na = static_cast<std::size_t>(first_frac * static_cast<double>(n));
    const std::size_t nb = static_cast<std::size_t>(last_frac * static_cast<double>(n));
    if (na < 20 || nb < 20)
        throw input_error("chain too short for Geweke: both windows need >= 20 draws");
    std::vector<double> z(draws[0].size(), 0.0);
    for (std::size_t p = 0; p < z.size(); ++p) {
        const std::vector<double> col = column(draws, p);
        const auto [ma, se2a] = detail::batch_mean_se2(col, 0, na);
        const auto [mb, se2b] = detail::batch_mean_se2(col, n - nb, nb);
        const double denom = std::sqrt(se2a + se2b);
        if (denom == 0.0)
            z[p] = ma == mb ? 0.0
                            : std::copysign(std::numeric_limits<double>::infinity(), ma - mb);
        else
            z[p] = (ma - mb) / denom;
    }
    return z;
}

inline bool geweke_pass(double z) { return std::abs(z) < 1.96; }

// Gelman-Rubin potential scale reduction factor per parameter, in the classic
// sqrt(V_hat / W) form without the degrees-of-freedom correction. Identical
// chains give sqrt((n-1)/n); chains stuck at different constants give +inf.
inline std::vector<double> gelman_rubin(const std::vector<DrawMatrix>& chains) {
    if (chains.size() < 2) throw input_error("Gelman-Rubin needs at least 2 chains");
    const std::size_t n = chains[0].size();
    for (const DrawMatrix& c : chains)
        if (c.size() != n) throw input_error("Gelman-Rubin needs equal-length chains");
    if (n < 20) throw input_error("Gelman-Rubin needs >= 20 draws per chain");
    const std::size_t np = chains[0][0].size();
    const double m = static_cast<double>(chains.size());
    const double nd = static_cast<double>(n);
    std::vector<double> psrf(np, 1.0);
    for (std::size_t p = 0; p < np; ++p) {
        std::vector<double> means;
        double w = 0.0;
        for (const DrawMatrix& c : chains) {
            const std::vector<double> col = column(c, p);
            means.push_back(mean_of(col));
            w += variance_of(col);
        }
        w /= m;
        const double grand = mean_of(means);
        double b_over_n = 0.0;  // B/n = var of chain means
        for (double mu : means) b_over_n += (mu - grand) * (mu - grand);
        b_over_n /= (m - 1.0);
        if (w == 0.0) {
            psrf[p] = b_over_n == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
            continue;
        }
        const double v_hat = (nd - 1.0) / nd * w + b_over_n;
        psrf[p] = std::sqrt(v_hat / w);
    }
    return psrf;
}

inline bool gelman_rubin_pass(double psrf) { return psrf < 1.1; }

struct DicReport {
    double mean_deviance = 0.0;     // average of -2 log L over the draws
    double deviance_at_mean = 0.0;  // -2 log L at the plug-in point
    double p_d = 0.0;
    double dic = 0.0;
    bool plug_in_fallback = false;  // plug-in was an HPD draw, not the mean
};

// DIC with the posterior mean as the plug-in point. When averaging breaks a
// support constraint (e.g. change-point ordering), the highest-density kept
// draw stands in and the report says so.
inline DicReport dic(const DrawMatrix& draws,
                     const std::function<double(const std::vector<double>&)>& log_likelihood,
                     const std::function<bool(const std::vector<double>&)>& in_support = nullptr,
                     const std::vector<double>* log_post = nullptr) {
    if (draws.empty()) throw input_error("DIC needs at least one draw");
    const std::size_t np = draws[0].size();
    std::vector<double> deviances;
    deviances.reserve(draws.size());
    std::vector<double> logliks;
    logliks.reserve(draws.size());
    for (const auto& row : draws) {
        const double ll = log_likelihood(row);
        logliks.push_back(ll);
        deviances.push_back(-2.0 * ll);
    }
    const double dbar = mean_of(deviances);

    std::vector<double> plug(np, 0.0);
    for (std::size_t p = 0; p < np; ++p) plug[p] = mean_of(column(draws, p));

    DicReport report;
    if (in_support && !in_support(plug)) {
        std::size_t best = 0;
        const std::vector<double>& score = log_post ? *log_post : logliks;
        for (std::size_t k = 1; k < draws.size(); ++k)
            if (score[k] > score[best]) best = k;
        plug = draws[best];
        report.plug_in_fallback = true;
    }

    report.mean_deviance = dbar;
    report.deviance_at_mean = -2.0 * log_likelihood(plug);
    report.p_d = report.mean_deviance - report.deviance_at_mean;
    report.dic = 2.0 * report.mean_deviance - report.deviance_at_mean;
    return report;
}

}  // namespace ilm

#endif
