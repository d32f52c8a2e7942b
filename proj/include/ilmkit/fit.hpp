#ifndef ILMKIT_FIT_HPP
#define ILMKIT_FIT_HPP

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "ilmkit/likelihood.hpp"
#include "ilmkit/mcmc.hpp"
#include "ilmkit/prior.hpp"

namespace ilm {

struct FitOptions {
    int chains = 3;
    ChainConfig chain;          // per-chain lengths and tuning; seed is derived
    long pilot_iterations = 0;  // 0 = no pilot, single-parameter blocks only
    long pilot_burn_in = 0;
    bool allow_pairs = true;    // block-plan override: force singles when false
    double pair_threshold = 0.5;
    double pilot_scale = 2.38 * 2.38 / 2.0;
    std::vector<double> init;   // explicit start; empty = draw from priors
    std::uint64_t master_seed = 0;
};

struct FitResult {
    std::vector<ChainOutput> chains;
    ProposalPlan plan;                          // plan the chains actually ran
    std::vector<std::pair<int, int>> pairs;     // parameter pairs proposed jointly
    std::vector<double> pair_correlations;      // pilot correlation per pair
};

// (alpha, beta) index pairs eligible for joint proposals: the two power-law
// parameters, or slope/intercept of each linear piece. Constant kernels and
// change points always update singly.
inline std::vector<std::pair<int, int>> candidate_pairs(const ParameterLayout& layout) {
    std::vector<std::pair<int, int>> out;
    switch (layout.kernel().family) {
        case KernelFamily::PowerLaw:
            out.emplace_back(layout.alpha_index(0), layout.beta_index(0));
            break;
        case KernelFamily::PiecewiseLinear:
            for (int l = 0; l < layout.kernel().n_steps; ++l)
                out.emplace_back(layout.alpha_index(l), layout.beta_index(l));
            break;
        default:
            break;
    }
    return out;
}

// Full sampling pipeline: single-parameter random-walk blocks, an optional
// pilot chain whose posterior correlations decide which (alpha, beta) pairs
// get bivariate blocks with the scaled pilot covariance, then the production
// chains with prior-drawn (overdispersed) or explicit starting points.
inline FitResult fit_model(const LikelihoodEvaluator& lik, const PriorSpec& priors,
                           const FitOptions& opt) {
    const ParameterLayout& layout = lik.layout();
    priors.validate(layout);
    const LogPosterior post(lik, priors);
    const TargetFn target = [&post](const std::vector<double>& theta) { return post(theta); };

    std::vector<double> steps;
    steps.reserve(layout.size());
    for (const PriorDensity& d : priors.marginals) steps.push_back(d.initial_step());
    ProposalPlan plan = ProposalPlan::singles(steps);

    const auto draw_init = [&](Rng& rng) {
        if (!opt.init.empty()) return opt.init;
        std::vector<double> theta;
        theta.reserve(layout.size());
        for (const PriorDensity& d : priors.marginals) theta.push_back(d.sample(rng));
        return theta;
    };

    FitResult result;
    if (opt.pilot_iterations > 0 && opt.allow_pairs) {
        const std::vector<std::pair<int, int>> pairs = candidate_pairs(layout);
        if (!pairs.empty()) {
            ChainConfig pcfg = opt.chain;
            pcfg.iterations = opt.pilot_iterations;
            pcfg.burn_in = opt.pilot_burn_in;
            pcfg.thin = 1;
            pcfg.seed = derive_seed(opt.master_seed, stream_tag::pilot, 0);
            Rng init_rng(derive_seed(opt.master_seed, stream_tag::pilot, 1));
            const std::vector<double> pilot_init = find_finite_init(target, draw_init, init_rng);
            const ChainOutput pilot = run_chain(pilot_init, plan, target, pcfg);
            for (std::size_t k = 0; k < plan.blocks.size(); ++k)
                plan.blocks[k].step = pilot.tuned_steps[k];  // warm-start the main chains
            for (const auto& [i, j] : pairs) {
                const double corr = pilot_correlation(pilot, i, j);
                if (std::abs(corr) > opt.pair_threshold) {
                    plan.pair_up(i, j, pilot_covariance(pilot, i, j, opt.pilot_scale));
                    result.pairs.emplace_back(i, j);
                    result.pair_correlations.push_back(corr);
                }
            }
        }
    }

    result.chains = run_multichain(opt.chains, draw_init, plan, target, opt.master_seed, opt.chain);
    result.plan = std::move(plan);
    return result;
}

}  // namespace ilm

#endif
