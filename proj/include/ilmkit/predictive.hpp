#ifndef ILMKIT_PREDICTIVE_HPP
#define ILMKIT_PREDICTIVE_HPP

#include <cstdint>
#include <vector>

#include "ilmkit/diagnostics.hpp"
#include "ilmkit/errors.hpp"
#include "ilmkit/model.hpp"
#include "ilmkit/rng.hpp"

namespace ilm {

struct PredictiveEnvelope {
    std::vector<double> median;
    std::vector<double> q025;
    std::vector<double> q975;
    int replicates = 0;
};

// Posterior predictive epidemic-curve envelope: each replicate re-simulates
// the epidemic from a posterior draw picked uniformly with replacement,
// keeping the observed initial conditions and horizon. Curves are then
// summarized per time point.
inline PredictiveEnvelope predict(const DrawMatrix& draws, const Population& pop,
                                  const ModelSpec& model, const SimulationConfig& observed_setup,
                                  int replicates, std::uint64_t master_seed) {
    if (draws.empty()) throw input_error("predictive envelope needs posterior draws");
    if (replicates < 1) throw input_error("replicate count must be >= 1");
    Rng pick(derive_seed(master_seed, stream_tag::pick));
    std::vector<std::vector<int>> curves;
    curves.reserve(static_cast<std::size_t>(replicates));
    for (int m = 0; m < replicates; ++m) {
        const std::vector<double>& theta = draws[pick.uniform_index(draws.size())];
        SimulationConfig cfg = observed_setup;
        cfg.min_epidemic_size = 0;  // predictive replicates are unconditioned
        cfg.rng_seed = derive_seed(master_seed, stream_tag::replicate,
                                   static_cast<std::uint64_t>(m));
        curves.push_back(epidemic_curve(simulate(pop, model, theta, cfg)));
    }
    const std::size_t horizon = curves[0].size();
    PredictiveEnvelope env;
    env.replicates = replicates;
    env.median.resize(horizon);
    env.q025.resize(horizon);
    env.q975.resize(horizon);
    std::vector<double> at_t(curves.size());
    for (std::size_t t = 0; t < horizon; ++t) {
        for (std::size_t m = 0; m < curves.size(); ++m)
            at_t[m] = static_cast<double>(curves[m][t]);
        env.median[t] = quantile(at_t, 0.5);
        env.q025[t] = quantile(at_t, 0.025);
        env.q975[t] = quantile(at_t, 0.975);
    }
    return env;
}

// Fraction of time points where the observed count sits inside the band,
// boundaries included.
inline double coverage(const PredictiveEnvelope& env, const std::vector<int>& observed) {
    if (observed.size() != env.median.size())
        throw input_error("observed curve and envelope lengths differ");
    if (observed.empty()) throw input_error("empty epidemic curve");
    std::size_t inside = 0;
    for (std::size_t t = 0; t < observed.size(); ++t) {
        const double x = static_cast<double>(observed[t]);
        if (env.q025[t] <= x && x <= env.q975[t]) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(observed.size());
}

}  // namespace ilm

#endif
