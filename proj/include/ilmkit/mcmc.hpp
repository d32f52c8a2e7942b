#ifndef ILMKIT_MCMC_HPP
#define ILMKIT_MCMC_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ilmkit/errors.hpp"
#include "ilmkit/rng.hpp"

namespace ilm {

using TargetFn = std::function<double(const std::vector<double>&)>;

// Symmetric 2x2 covariance.
struct Cov2 {
    double a00 = 1.0, a01 = 0.0, a11 = 1.0;
    bool positive_definite() const { return a00 > 0.0 && a00 * a11 - a01 * a01 > 0.0; }
};

// One proposal block: either a single parameter with a scalar Gaussian step,
// or a parameter pair proposed jointly from a bivariate Gaussian (stored as
// the lower Cholesky factor of its covariance). Both carry a scalar step
// multiplier that burn-in tuning adjusts.
struct Block {
    enum class Kind { Single, Pair } kind = Kind::Single;
    int i = -1;
    int j = -1;          // Pair only
    double step = 1.0;   // Single: proposal sd; Pair: multiplier on the factor
    double l00 = 0.0, l10 = 0.0, l11 = 0.0;  // Pair only

    static Block single(int index, double step) {
        Block b;
        b.kind = Kind::Single;
        b.i = index;
        b.step = step;
        return b;
    }
    static Block pair(int i, int j, const Cov2& cov) {
        if (!cov.positive_definite())
            throw input_error("pair proposal covariance must be positive definite");
        Block b;
        b.kind = Kind::Pair;
        b.i = i;
        b.j = j;
        b.l00 = std::sqrt(cov.a00);
        b.l10 = cov.a01 / b.l00;
        b.l11 = std::sqrt(cov.a11 - b.l10 * b.l10);
        return b;
    }
};

// Ordered update sweep. Every free parameter must sit in exactly one block.
struct ProposalPlan {
    std::vector<Block> blocks;

    static ProposalPlan singles(const std::vector<double>& steps) {
        ProposalPlan plan;
        for (std::size_t k = 0; k < steps.size(); ++k)
            plan.blocks.push_back(Block::single(static_cast<int>(k), steps[k]));
        return plan;
    }

    // Replace the two single blocks for (i, j) with one pair block, keeping
    // the sweep position of the first.
    void pair_up(int i, int j, const Cov2& cov) {
        std::vector<Block> out;
        bool placed = false;
        for (const Block& b : blocks) {
            if (b.kind == Block::Kind::Single && (b.i == i || b.i == j)) {
                if (!placed) {
                    out.push_back(Block::pair(i, j, cov));
                    placed = true;
                }
                continue;
            }
            out.push_back(b);
        }
        if (!placed) throw input_error("pair_up: no single blocks found for the pair");
        blocks = std::move(out);
    }

    void validate(std::size_t n_params) const {
        std::vector<int> seen(n_params, 0);
        for (const Block& b : blocks) {
            if (b.i < 0 || b.i >= static_cast<int>(n_params)) throw input_error("block index out of range");
            ++seen[static_cast<std::size_t>(b.i)];
            if (b.kind == Block::Kind::Pair) {
                if (b.j < 0 || b.j >= static_cast<int>(n_params) || b.j == b.i)
                    throw input_error("pair block indices invalid");
                ++seen[static_cast<std::size_t>(b.j)];
            }
        }
        for (int c : seen)
            if (c != 1) throw input_error("every parameter must appear in exactly one proposal block");
    }
};

struct ChainConfig {
    long iterations = 60000;
    long burn_in = 10000;
    int thin = 10;
    std::uint64_t seed = 0;
    // Burn-in step tuning: every window, shrink steps when the windowed
    // acceptance rate is below lo, grow when above hi. Frozen after burn-in.
    int tune_window = 50;
    double tune_lo = 0.20;
    double tune_hi = 0.45;
    double tune_shrink = 0.6;
    double tune_grow = 1.6;
};

struct ChainOutput {
    std::vector<std::vector<double>> draws;  // kept draws, row per draw
    std::vector<double> log_post;            // aligned with draws
    std::vector<long> kept_iterations;       // 1-based iteration of each kept draw
    std::vector<double> acceptance;          // per block, over all iterations
    std::vector<double> tuned_steps;         // per block, step after burn-in
    std::uint64_t seed = 0;
    long iterations = 0;
    long burn_in = 0;
    int thin = 1;
};

// One sweep: propose each block in order, accept with probability
// min(1, exp(delta log posterior)). Mutates theta/log_post in place and
// returns per-block accept flags. -inf proposals always lose.
inline std::vector<bool> mh_step(std::vector<double>& theta, double& log_post,
                                 const ProposalPlan& plan, const TargetFn& target, Rng& rng) {
    std::vector<bool> accepted(plan.blocks.size(), false);
    std::vector<double> proposal = theta;
    for (std::size_t k = 0; k < plan.blocks.size(); ++k) {
        const Block& b = plan.blocks[k];
        const std::size_t bi = static_cast<std::size_t>(b.i);
        if (b.kind == Block::Kind::Single) {
            proposal[bi] = theta[bi] + b.step * rng.normal();
        } else {
            const std::size_t bj = static_cast<std::size_t>(b.j);
            const double z0 = rng.normal();
            const double z1 = rng.normal();
            proposal[bi] = theta[bi] + b.step * b.l00 * z0;
            proposal[bj] = theta[bj] + b.step * (b.l10 * z0 + b.l11 * z1);
        }
        const double lp = target(proposal);
        if (std::log(rng.uniform()) < lp - log_post) {
            theta = proposal;
            log_post = lp;
            accepted[k] = true;
        } else {
            proposal = theta;  // undo the block's perturbation
        }
    }
    return accepted;
}

inline ChainOutput run_chain(const std::vector<double>& init, ProposalPlan plan,
                             const TargetFn& target, const ChainConfig& cfg) {
    plan.validate(init.size());
    if (cfg.burn_in < 0 || cfg.burn_in > cfg.iterations)
        throw input_error("burn-in must lie in [0, iterations]");
    if (cfg.thin < 1) throw input_error("thin must be >= 1");
    double log_post = target(init);
    if (!std::isfinite(log_post))
        throw input_error("initial state has non-finite log posterior");

    Rng rng(cfg.seed);
    std::vector<double> theta = init;
    const std::size_t nb = plan.blocks.size();
    std::vector<long> accepts(nb, 0);
    std::vector<long> win_accepts(nb, 0);
    long win_iters = 0;

    ChainOutput out;
    out.seed = cfg.seed;
    out.iterations = cfg.iterations;
    out.burn_in = cfg.burn_in;
    out.thin = cfg.thin;

    for (long iter = 1; iter <= cfg.iterations; ++iter) {
        const std::vector<bool> acc = mh_step(theta, log_post, plan, target, rng);
        for (std::size_t k = 0; k < nb; ++k)
            if (acc[k]) {
                ++accepts[k];
                ++win_accepts[k];
            }
        if (iter <= cfg.burn_in) {
            ++win_iters;
            if (win_iters == cfg.tune_window) {
                for (std::size_t k = 0; k < nb; ++k) {
                    const double rate = static_cast<double>(win_accepts[k]) / win_iters;
                    if (rate < cfg.tune_lo)
                        plan.blocks[k].step *= cfg.tune_shrink;
                    else if (rate > cfg.tune_hi)
                        plan.blocks[k].step *= cfg.tune_grow;
                    win_accepts[k] = 0;
                }
                win_iters = 0;
            }
        } else if ((iter - cfg.burn_in) % cfg.thin == 0) {
            out.draws.push_back(theta);
            out.log_post.push_back(log_post);
            out.kept_iterations.push_back(iter);
        }
    }

    out.acceptance.resize(nb);
    out.tuned_steps.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        out.acceptance[k] =
            cfg.iterations > 0 ? static_cast<double>(accepts[k]) / cfg.iterations : 0.0;
        out.tuned_steps[k] = plan.blocks[k].step;
    }
    return out;
}

// Scaled sample covariance of two pilot columns, with a diagonal jitter
// escalation if the scaled estimate is numerically rank-deficient.
inline Cov2 pilot_covariance(const ChainOutput& pilot, int i, int j,
                             double scale = 2.38 * 2.38 / 2.0) {
    const std::size_t n = pilot.draws.size();
    if (n < 100) throw input_error("pilot covariance needs at least 100 kept draws");
    double mi = 0.0, mj = 0.0;
    for (const auto& row : pilot.draws) {
        mi += row[static_cast<std::size_t>(i)];
        mj += row[static_cast<std::size_t>(j)];
    }
    mi /= static_cast<double>(n);
    mj /= static_cast<double>(n);
    double sii = 0.0, sij = 0.0, sjj = 0.0;
    for (const auto& row : pilot.draws) {
        const double di = row[static_cast<std::size_t>(i)] - mi;
        const double dj = row[static_cast<std::size_t>(j)] - mj;
        sii += di * di;
        sij += di * dj;
        sjj += dj * dj;
    }
    const double denom = static_cast<double>(n - 1);
    Cov2 cov{scale * sii / denom, scale * sij / denom, scale * sjj / denom};
    if (cov.a00 <= 0.0 || cov.a11 <= 0.0)
        throw input_error("pilot column has zero variance; run a longer pilot");
    double jitter = 1e-8 * std::max(cov.a00, cov.a11);
    while (!cov.positive_definite()) {
        cov.a00 += jitter;
        cov.a11 += jitter;
        jitter *= 10.0;
    }
    return cov;
}

// Pearson correlation of two pilot columns; drives the pair-block decision.
inline double pilot_correlation(const ChainOutput& pilot, int i, int j) {
    const Cov2 cov = pilot_covariance(pilot, i, j, 1.0);
    return cov.a01 / std::sqrt(cov.a00 * cov.a11);
}

inline std::vector<double> find_finite_init(
    const TargetFn& target, const std::function<std::vector<double>(Rng&)>& draw_init, Rng& rng,
    int max_attempts = 1000) {
    for (int a = 0; a < max_attempts; ++a) {
        std::vector<double> theta = draw_init(rng);
        if (std::isfinite(target(theta))) return theta;
    }
    throw input_error("no initial state with finite log posterior found; supply explicit inits");
}

// k independent chains with seeds and inits split off one master seed.
// Chains run sequentially; MH is serial and the evaluator memo is shared.
inline std::vector<ChainOutput> run_multichain(
    int k, const std::function<std::vector<double>(Rng&)>& draw_init, const ProposalPlan& plan,
    const TargetFn& target, std::uint64_t master_seed, const ChainConfig& base) {
    if (k < 1) throw input_error("chain count must be >= 1");
    std::vector<ChainOutput> chains;
    chains.reserve(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        Rng init_rng(derive_seed(master_seed, stream_tag::init, static_cast<std::uint64_t>(c)));
        const std::vector<double> init = find_finite_init(target, draw_init, init_rng);
        ChainConfig cfg = base;
        cfg.seed = derive_seed(master_seed, stream_tag::chain, static_cast<std::uint64_t>(c));
        chains.push_back(run_chain(init, plan, target, cfg));
    }
    return chains;
}

}  // namespace ilm

#endif
