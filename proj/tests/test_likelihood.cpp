#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ilmkit/errors.hpp"
#include "ilmkit/likelihood.hpp"
#include "oracle.hpp"

using namespace ilm;

namespace {

// Three individuals on a line; the seed infects the middle one at t = 1.
struct LineCase {
    Population pop = build_population({{0.0, 0.0}, {1.0, 0.0}, {3.0, 0.0}});
    ModelSpec model;
    EventHistory history;

    LineCase() {
        model.kernel = KernelSpec::piecewise_constant({2.0});
        model.framework = Framework::SI;
        history.framework = Framework::SI;
        history.horizon = 2;
        history.events = {IndividualEvents{std::nullopt, 0, std::nullopt},
                          IndividualEvents{std::nullopt, 1, std::nullopt},
                          IndividualEvents{}};
    }
};

}  // namespace

TEST_CASE("likelihood of a hand-computed epidemic", "[likelihood]") {
    const LineCase c;
    const std::vector<double> theta{0.10, 0.0004};
    // t=0: id1 infected from pressure k(1)=0.10; id2 survives k(3)=0.0004
    // t=1: id2 survives k(3)+k(2)=0.0008
    const double expect = std::log(-std::expm1(-0.10)) - 0.0004 - 0.0008;
    const LikelihoodEvaluator eval(c.pop, c.history, c.model, full_window(c.history));
    CHECK(eval.log_likelihood(theta) == Catch::Approx(expect).epsilon(1e-14));
    CHECK(eval.infection_term_count() == 1);
    CHECK(eval.survival_pair_count() == 2.0);
    CHECK(log_likelihood(c.pop, c.history, c.model, theta, full_window(c.history)) ==
          Catch::Approx(expect).epsilon(1e-14));
}

TEST_CASE("sparks add epsilon per susceptible exposure interval", "[likelihood]") {
    LineCase c;
    c.model.sparks_enabled = true;
    const double eps = 0.013;
    const std::vector<double> theta{0.10, 0.0004, eps};
    const double expect = std::log(-std::expm1(-(0.10 + eps))) - 0.0004 - 0.0008 - 2.0 * eps;
    const LikelihoodEvaluator eval(c.pop, c.history, c.model, full_window(c.history));
    CHECK(eval.log_likelihood(theta) == Catch::Approx(expect).epsilon(1e-14));
}

TEST_CASE("window restricts which transitions are explained", "[likelihood]") {
    const LineCase c;
    const std::vector<double> theta{0.10, 0.0004};
    // [1,2) only scores the id2 survival term at t=1
    CHECK(log_likelihood(c.pop, c.history, c.model, theta, {1, 2}) ==
          Catch::Approx(-0.0008).epsilon(1e-14));
    // [0,1) scores the infection and the first survival term
    CHECK(log_likelihood(c.pop, c.history, c.model, theta, {0, 1}) ==
          Catch::Approx(std::log(-std::expm1(-0.10)) - 0.0004).epsilon(1e-14));
}

TEST_CASE("invalid windows and mismatched frameworks are rejected", "[likelihood]") {
    const LineCase c;
    CHECK_THROWS_AS(LikelihoodEvaluator(c.pop, c.history, c.model, {0, 3}), input_error);
    CHECK_THROWS_AS(LikelihoodEvaluator(c.pop, c.history, c.model, {-1, 2}), input_error);
    CHECK_THROWS_AS(LikelihoodEvaluator(c.pop, c.history, c.model, {1, 1}), input_error);
    ModelSpec wrong = c.model;
    wrong.framework = Framework::SIR;
    wrong.infectious_period = 2;
    CHECK_THROWS_AS(LikelihoodEvaluator(c.pop, c.history, wrong, full_window(c.history)),
                    input_error);
}

TEST_CASE("an infection with zero pressure sinks the likelihood", "[likelihood]") {
    LineCase c;
    c.history.events[2].infectious = 2;  // id2 infected at t=2, distances 2 and 3
    const std::vector<double> theta{0.10, 0.0};  // second bin contributes nothing
    const double ll =
        log_likelihood(c.pop, c.history, c.model, theta, full_window(c.history));
    CHECK(ll == -std::numeric_limits<double>::infinity());
    // a sparks term rescues it
    c.model.sparks_enabled = true;
    CHECK(std::isfinite(
        log_likelihood(c.pop, c.history, c.model, {0.10, 0.0, 0.001}, full_window(c.history))));
}

TEST_CASE("estimated change points reproduce the fixed-kernel value", "[likelihood]") {
    const LineCase c;
    ModelSpec est = c.model;
    est.kernel = KernelSpec::piecewise_constant({0.0}, true);  // placeholder edge
    const double fixed =
        log_likelihood(c.pop, c.history, c.model, {0.10, 0.0004}, full_window(c.history));
    const double moved =
        log_likelihood(c.pop, c.history, est, {0.10, 0.0004, 2.0}, full_window(c.history));
    CHECK(moved == fixed);

    // moving the change point past both distances merges everything into bin 1
    const double wide =
        log_likelihood(c.pop, c.history, est, {0.10, 0.0004, 5.0}, full_window(c.history));
    const double expect_wide = std::log(-std::expm1(-0.10)) - 0.10 - 0.20;
    CHECK(wide == Catch::Approx(expect_wide).epsilon(1e-12));
}

TEST_CASE("power-law beta memo is refreshed and copies are independent", "[likelihood]") {
    const LineCase c;
    ModelSpec pl = c.model;
    pl.kernel = KernelSpec::power_law();
    const LikelihoodEvaluator eval(c.pop, c.history, pl, full_window(c.history));
    const double at2 = eval.log_likelihood({0.3, 2.0});
    const double at3 = eval.log_likelihood({0.3, 3.0});
    CHECK(at2 != at3);
    CHECK(eval.log_likelihood({0.3, 2.0}) == at2);

    LikelihoodEvaluator copy = eval;
    CHECK(copy.log_likelihood({0.3, 3.0}) == at3);
    CHECK(eval.log_likelihood({0.3, 2.0}) == at2);

    // fresh evaluator agrees with the memoized one
    CHECK(log_likelihood(c.pop, c.history, pl, {0.3, 3.0}, full_window(c.history)) == at3);
}

TEST_CASE("power-law rejects coincident pairs that enter the likelihood", "[likelihood]") {
    const auto pop = build_population({{0.0, 0.0}, {0.0, 0.0}, {3.0, 0.0}});
    ModelSpec pl;
    pl.kernel = KernelSpec::power_law();
    EventHistory h;
    h.framework = Framework::SI;
    h.horizon = 2;
    h.events = {IndividualEvents{std::nullopt, 0, std::nullopt}, IndividualEvents{}, IndividualEvents{}};
    CHECK_THROWS_AS(LikelihoodEvaluator(pop, h, pl, full_window(h)), numeric_error);
}

TEST_CASE("likelihood factorizes over time steps", "[likelihood]") {
    for (std::uint64_t seed : {3u, 7u, 12u}) {
        const auto inst = oracle::random_instance(seed);
        const Window full{0, inst.history.horizon};
        const double whole =
            log_likelihood(inst.pop, inst.history, inst.model, inst.theta, full);
        double pieces = 0.0;
        for (int t = 0; t < inst.history.horizon; ++t)
            pieces += log_likelihood(inst.pop, inst.history, inst.model, inst.theta, {t, t + 1});
        CHECK(oracle::close_rel(whole, pieces, 1e-12));
    }
}

TEST_CASE("evaluator matches the brute-force oracle", "[likelihood]") {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 18; ++seed) {
        const auto inst = oracle::random_instance(seed);
        const LikelihoodEvaluator eval(inst.pop, inst.history, inst.model,
                                       {inst.t_min, inst.t_max});
        {
            const double got = eval.log_likelihood(inst.theta);
            const double want =
                oracle::log_likelihood(inst.pop, inst.history, inst.params, inst.t_min, inst.t_max);
            INFO("seed " << seed << " at generating parameters");
            CHECK(oracle::close_rel(got, want, 1e-10));
            ++checked;
        }
        ilm::Rng rng(seed * 1009 + 1);
        for (int rep = 0; rep < 3; ++rep) {
            const auto theta = oracle::random_theta(inst.model, rng);
            const auto params = oracle::params_from_theta(inst.model, theta);
            const double got = eval.log_likelihood(theta);
            const double want =
                oracle::log_likelihood(inst.pop, inst.history, params, inst.t_min, inst.t_max);
            INFO("seed " << seed << " rep " << rep);
            CHECK(oracle::close_rel(got, want, 1e-10));
            ++checked;
        }
    }
    CHECK(checked == 18 * 4);
}

TEST_CASE("log posterior composes prior and likelihood", "[likelihood]") {
    const LineCase c;
    const LikelihoodEvaluator eval(c.pop, c.history, c.model, full_window(c.history));
    PriorSpec priors = default_priors(eval.layout());
    const LogPosterior post(eval, priors);

    const std::vector<double> inside{0.10, 0.0004};
    const double expect = log_prior(inside, priors, eval.layout()) + eval.log_likelihood(inside);
    CHECK(post(inside) == Catch::Approx(expect).epsilon(1e-14));
    CHECK(post.likelihood_evaluations() == 1);

    // out-of-support draws never touch the likelihood
    const std::vector<double> outside{-0.10, 0.0004};
    CHECK(post(outside) == -std::numeric_limits<double>::infinity());
    CHECK(post.likelihood_evaluations() == 1);
}
