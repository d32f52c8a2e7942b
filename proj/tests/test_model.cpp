#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ilmkit/errors.hpp"
#include "ilmkit/model.hpp"

using namespace ilm;

namespace {

Population grid_population(std::size_t side, double spacing) {
    std::vector<std::pair<double, double>> coords;
    for (std::size_t r = 0; r < side; ++r)
        for (std::size_t c = 0; c < side; ++c)
            coords.emplace_back(spacing * static_cast<double>(c), spacing * static_cast<double>(r));
    return build_population(coords);
}

ModelSpec si_model() {
    ModelSpec m;
    m.kernel = KernelSpec::piecewise_constant({2.0});
    m.framework = Framework::SI;
    return m;
}

}  // namespace

TEST_CASE("infection probability is 1 - exp(-pressure)", "[model]") {
    const auto pop = build_population({{0.0, 0.0}, {1.0, 0.0}, {3.0, 0.0}});
    EventHistory h;
    h.framework = Framework::SI;
    h.horizon = 5;
    h.events = {IndividualEvents{std::nullopt, 0, std::nullopt}, IndividualEvents{}, IndividualEvents{}};

    const auto model = si_model();
    const std::vector<double> theta{0.10, 0.0004};
    // id 1 at distance 1 (first bin), id 2 at distance 3 (second bin)
    const double p1 = infection_probability(pop, h, 1, 0, model.layout(), theta);
    CHECK(p1 == Catch::Approx(-std::expm1(-0.10)).epsilon(1e-14));
    const double p2 = infection_probability(pop, h, 2, 0, model.layout(), theta);
    CHECK(p2 == Catch::Approx(-std::expm1(-0.0004)).epsilon(1e-14));
    CHECK_THROWS_AS(infection_probability(pop, h, 0, 0, model.layout(), theta), input_error);
}

TEST_CASE("frozen reference: log(1 - exp(-0.10))", "[model]") {
    // the infection term the likelihood adds for a pressure of 0.10
    CHECK(std::log(-std::expm1(-0.10)) == Catch::Approx(-2.3521684610440903).epsilon(1e-14));
}

TEST_CASE("simulation is reproducible and seed-sensitive", "[model]") {
    const auto pop = grid_population(6, 1.0);
    const auto model = si_model();
    const std::vector<double> theta{0.4, 0.01};
    SimulationConfig cfg;
    cfg.horizon = 8;
    cfg.rng_seed = 77;

    const auto a = simulate(pop, model, theta, cfg);
    const auto b = simulate(pop, model, theta, cfg);
    REQUIRE(a.size() == b.size());
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i)
        same = same && a.events[i].infectious == b.events[i].infectious;
    CHECK(same);

    cfg.rng_seed = 78;
    const auto c = simulate(pop, model, theta, cfg);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        differs = differs || a.events[i].infectious != c.events[i].infectious;
    CHECK(differs);
}

TEST_CASE("explicit initial infectives enter at time zero", "[model]") {
    const auto pop = grid_population(4, 2.0);
    const auto model = si_model();
    SimulationConfig cfg;
    cfg.horizon = 5;
    cfg.initial_infectives = {3, 7};
    cfg.rng_seed = 1;
    const auto h = simulate(pop, model, {0.2, 0.001}, cfg);
    CHECK(h.entry_time(3) == 0);
    CHECK(h.entry_time(7) == 0);
    int seeds = 0;
    for (std::size_t i = 0; i < h.size(); ++i)
        if (h.entry_time(i) == 0) ++seeds;
    CHECK(seeds == 2);
}

TEST_CASE("SI epidemics only grow and never remove", "[model]") {
    const auto pop = grid_population(5, 1.0);
    const auto h = simulate(pop, si_model(), {0.5, 0.01}, SimulationConfig{10, {}, 1, 3, 0, 1000});
    validate_history(h);
    for (std::size_t i = 0; i < h.size(); ++i) {
        CHECK_FALSE(h.events[i].removal.has_value());
        CHECK_FALSE(h.events[i].exposure.has_value());
    }
}

TEST_CASE("SIR removal follows infection by the infectious period", "[model]") {
    const auto pop = grid_population(5, 1.0);
    ModelSpec m = si_model();
    m.framework = Framework::SIR;
    m.infectious_period = 3;
    SimulationConfig cfg;
    cfg.horizon = 12;
    cfg.rng_seed = 5;
    const auto h = simulate(pop, m, {0.8, 0.01}, cfg);
    validate_history(h);
    int checked = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const auto& e = h.events[i];
        if (!e.infectious) continue;
        if (e.removal) {
            CHECK(*e.removal == *e.infectious + 3);
            ++checked;
        } else {
            // removal would fall past the horizon
            CHECK(*e.infectious + 3 > h.horizon);
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("SEIR delays infectiousness by the latent period", "[model]") {
    const auto pop = grid_population(5, 1.0);
    ModelSpec m = si_model();
    m.framework = Framework::SEIR;
    m.latent_period = 2;
    m.infectious_period = 3;
    SimulationConfig cfg;
    cfg.horizon = 14;
    cfg.rng_seed = 9;
    const auto h = simulate(pop, m, {0.8, 0.01}, cfg);
    validate_history(h);
    int followers = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const auto& e = h.events[i];
        if (!e.exposure) continue;
        if (*e.exposure == 0) continue;  // seeds start infectious immediately
        if (e.infectious) {
            CHECK(*e.infectious == *e.exposure + 2);
            ++followers;
        }
    }
    CHECK(followers > 0);
}

TEST_CASE("minimum epidemic size filters realizations deterministically", "[model]") {
    const auto pop = grid_population(5, 1.5);
    SimulationConfig cfg;
    cfg.horizon = 10;
    cfg.rng_seed = 31;
    cfg.min_epidemic_size = 8;
    const auto h = simulate(pop, si_model(), {0.3, 0.005}, cfg);
    int infected = 0;
    for (std::size_t i = 0; i < h.size(); ++i)
        if (h.events[i].ever_infected()) ++infected;
    CHECK(infected >= 8);

    const auto again = simulate(pop, si_model(), {0.3, 0.005}, cfg);
    bool same = true;
    for (std::size_t i = 0; i < h.size(); ++i)
        same = same && h.events[i].infectious == again.events[i].infectious;
    CHECK(same);

    cfg.min_epidemic_size = 26;  // impossible: more than the population
    CHECK_THROWS_AS(simulate(pop, si_model(), {0.3, 0.005}, cfg), numeric_error);
}

TEST_CASE("epidemic_curve counts entries per step excluding the seeds", "[model]") {
    EventHistory h;
    h.framework = Framework::SI;
    h.horizon = 4;
    h.events = {IndividualEvents{std::nullopt, 0, std::nullopt},
                IndividualEvents{std::nullopt, 1, std::nullopt},
                IndividualEvents{std::nullopt, 1, std::nullopt},
                IndividualEvents{std::nullopt, 3, std::nullopt},
                IndividualEvents{}};
    CHECK(epidemic_curve(h) == std::vector<int>{2, 0, 1, 0});
}

TEST_CASE("zero kernel with no sparks never spreads", "[model]") {
    const auto pop = grid_population(4, 1.0);
    SimulationConfig cfg;
    cfg.horizon = 6;
    cfg.rng_seed = 3;
    const auto h = simulate(pop, si_model(), {0.0, 0.0}, cfg);
    int infected = 0;
    for (std::size_t i = 0; i < h.size(); ++i)
        if (h.events[i].ever_infected()) ++infected;
    CHECK(infected == 1);  // just the seed
}

TEST_CASE("model validation enforces sojourn requirements", "[model]") {
    ModelSpec m = si_model();
    CHECK_NOTHROW(m.validate());
    m.framework = Framework::SIR;
    CHECK_THROWS_AS(m.validate(), input_error);
    m.infectious_period = 2;
    CHECK_NOTHROW(m.validate());
    m.framework = Framework::SEIR;
    CHECK_THROWS_AS(m.validate(), input_error);
    m.latent_period = 1;
    CHECK_NOTHROW(m.validate());
}

TEST_CASE("simulate rejects invalid kernel parameters", "[model]") {
    const auto pop = grid_population(3, 1.0);
    SimulationConfig cfg;
    cfg.horizon = 5;
    CHECK_THROWS_AS(simulate(pop, si_model(), {-0.1, 0.0}, cfg), input_error);
    CHECK_THROWS_AS(simulate(pop, si_model(), {0.1}, cfg), input_error);
    ModelSpec pl;
    pl.kernel = KernelSpec::power_law();
    CHECK_THROWS_AS(simulate(pop, pl, {0.3, -2.0}, cfg), input_error);
}
