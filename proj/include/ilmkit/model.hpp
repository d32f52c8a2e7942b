#ifndef ILMKIT_MODEL_HPP
#define ILMKIT_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "ilmkit/errors.hpp"
#include "ilmkit/events.hpp"
#include "ilmkit/kernel.hpp"
#include "ilmkit/params.hpp"
#include "ilmkit/population.hpp"
#include "ilmkit/rng.hpp"

namespace ilm {

// Epidemic model: kernel, compartmental framework, and the fixed sojourn
// times. Transitions E->I and I->R happen deterministically after
// latent_period and infectious_period steps; per-individual removal times in
// observed data override infectious_period.
struct ModelSpec {
    KernelSpec kernel;
    Framework framework = Framework::SI;
    int latent_period = 0;      // mu_E (SEIR)
    int infectious_period = 0;  // mu_I (SIR/SEIR)
    bool sparks_enabled = false;

    ParameterLayout layout() const { return ParameterLayout(kernel, sparks_enabled); }

    void validate() const {
        if (framework == Framework::SEIR && latent_period < 1)
            throw input_error("SEIR model needs latent_period >= 1");
        if (framework != Framework::SI && infectious_period < 1)
            throw input_error("SIR/SEIR model needs infectious_period >= 1");
    }
};

struct SimulationConfig {
    int horizon = 20;
    std::vector<std::size_t> initial_infectives;  // explicit ids; drawn uniformly if empty
    int initial_count = 1;
    std::uint64_t rng_seed = 0;
    int min_epidemic_size = 0;  // 0 = keep every realization
    int max_attempts = 1000;
};

// Sum of kernel values from the current infectious set plus the sparks term.
inline double infectious_pressure(const Population& pop, const std::vector<std::size_t>& infectious,
                                  std::size_t i, const ParameterLayout& layout,
                                  const KernelView& view) {
    double sum = 0.0;
    for (std::size_t j : infectious) sum += kernel_value(layout, view, pop.distance(i, j));
    return sum + view.epsilon;
}

// P(i,t) = 1 - exp(-(sum of kernel values over I(t) + sparks)).
inline double infection_probability(const Population& pop, const EventHistory& history,
                                    std::size_t i, int t, const ParameterLayout& layout,
                                    const std::vector<double>& theta) {
    if (!history.susceptible(i, t)) throw input_error("individual is not susceptible at t");
    KernelView view;
    unpack_into(layout, theta, view);
    const double pressure = infectious_pressure(pop, history.infectious_set(t), i, layout, view);
    return -std::expm1(-pressure);
}

// New infections (entries to E under SEIR, to I otherwise) per time step:
// entry t counts individuals whose entry time is t+1, so the curve has
// length horizon and excludes the initial infectives.
inline std::vector<int> epidemic_curve(const EventHistory& history) {
    std::vector<int> curve(static_cast<std::size_t>(history.horizon), 0);
    for (std::size_t i = 0; i < history.size(); ++i) {
        const int entry = history.entry_time(i);
        if (entry >= 1 && entry <= history.horizon) ++curve[static_cast<std::size_t>(entry - 1)];
    }
    return curve;
}

namespace detail {

inline EventHistory simulate_once(const Population& pop, const ModelSpec& model,
                                  const ParameterLayout& layout, const KernelView& view,
                                  const SimulationConfig& config, Rng& rng) {
    const std::size_t n = pop.size();
    EventHistory history;
    history.framework = model.framework;
    history.horizon = config.horizon;
    history.events.resize(n);

    std::vector<std::size_t> seeds = config.initial_infectives;
    if (seeds.empty()) {
        std::vector<std::size_t> ids(n);
        for (std::size_t i = 0; i < n; ++i) ids[i] = i;
        for (int k = 0; k < config.initial_count; ++k) {
            const std::size_t pick = k + rng.uniform_index(n - k);
            std::swap(ids[k], ids[pick]);
            seeds.push_back(ids[k]);
        }
    }

    // Tentative event times; anything past the horizon is cleared at the end.
    std::vector<int> t_exposed(n, EventHistory::never);
    std::vector<int> t_infectious(n, EventHistory::never);
    std::vector<int> t_removed(n, EventHistory::never);
    for (std::size_t id : seeds) {
        if (id >= n) throw input_error("initial infective id out of range");
        if (t_infectious[id] != EventHistory::never) throw input_error("duplicate initial infective");
        if (model.framework == Framework::SEIR) t_exposed[id] = 0;
        t_infectious[id] = 0;
        if (model.framework != Framework::SI) t_removed[id] = model.infectious_period;
    }

    std::vector<std::size_t> infectious;
    for (int t = 0; t < config.horizon; ++t) {
        infectious.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (t_infectious[j] <= t && t < t_removed[j]) infectious.push_back(j);

        const int entry = t + 1;
        for (std::size_t i = 0; i < n; ++i) {
            const int first = model.framework == Framework::SEIR ? t_exposed[i] : t_infectious[i];
            if (first <= t) continue;  // no longer susceptible
            const double pressure = infectious_pressure(pop, infectious, i, layout, view);
            const double p = -std::expm1(-pressure);
            if (!rng.bernoulli(p)) continue;
            if (model.framework == Framework::SEIR) {
                t_exposed[i] = entry;
                t_infectious[i] = entry + model.latent_period;
                t_removed[i] = t_infectious[i] + model.infectious_period;
            } else {
                t_infectious[i] = entry;
                if (model.framework == Framework::SIR) t_removed[i] = entry + model.infectious_period;
            }
        }
    }

    auto record = [&](int t) -> std::optional<int> {
        if (t == EventHistory::never || t > config.horizon) return std::nullopt;
        return t;
    };
    for (std::size_t i = 0; i < n; ++i) {
        history.events[i].exposure =
            model.framework == Framework::SEIR ? record(t_exposed[i]) : std::nullopt;
        history.events[i].infectious = record(t_infectious[i]);
        history.events[i].removal =
            model.framework == Framework::SI ? std::nullopt : record(t_removed[i]);
    }
    return history;
}

}  // namespace detail

// Forward simulation: one Bernoulli draw per susceptible per step, new
// entries take effect at t+1. Reproducible given rng_seed; an optional
// minimum size re-draws the whole epidemic (fresh seeds included) until met.
inline EventHistory simulate(const Population& pop, const ModelSpec& model,
                             const std::vector<double>& theta, const SimulationConfig& config) {
    model.validate();
    if (config.horizon < 1) throw input_error("horizon must be >= 1");
    if (config.initial_infectives.empty() && config.initial_count < 1)
        throw input_error("need at least one initial infective");

    const ParameterLayout layout = model.layout();
    KernelView view;
    unpack_into(layout, theta, view);
    KernelParamsRef ref{&view.alphas, view.betas.empty() ? nullptr : &view.betas, view.epsilon,
                        model.sparks_enabled};
    if (auto violations = validate_spec(layout.kernel(), ref); !violations.empty())
        throw input_error("invalid kernel parameters: " + violations.front());
    if (layout.deltas_estimated())
        for (std::size_t c = 0; c < view.change_points.size(); ++c) {
            const double lo = c == 0 ? 0.0 : view.change_points[c - 1];
            if (!(view.change_points[c] > lo)) throw input_error("change points out of order");
        }

    for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
        Rng rng(derive_seed(config.rng_seed, stream_tag::simulate, static_cast<std::uint64_t>(attempt)));
        EventHistory history = detail::simulate_once(pop, model, layout, view, config, rng);
        int ever_infected = 0;
        for (std::size_t i = 0; i < history.size(); ++i)
            if (history.events[i].ever_infected()) ++ever_infected;
        if (ever_infected >= config.min_epidemic_size) return history;
    }
    throw numeric_error("no epidemic reached min_epidemic_size within max_attempts");
}

}  // namespace ilm

#endif
