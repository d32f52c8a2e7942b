#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ilmkit/errors.hpp"
#include "ilmkit/population.hpp"

using ilm::build_population;

TEST_CASE("distance matrix is symmetric with zero diagonal", "[population]") {
    const auto pop = build_population({{0.0, 0.0}, {3.0, 4.0}, {6.0, 8.0}});
    REQUIRE(pop.size() == 3);
    CHECK(pop.distance(0, 1) == 5.0);
    CHECK(pop.distance(1, 0) == 5.0);
    CHECK(pop.distance(0, 2) == 10.0);
    CHECK(pop.distance(1, 2) == 5.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(pop.distance(i, i) == 0.0);
}

TEST_CASE("coincident pair detection", "[population]") {
    CHECK(build_population({{1.0, 1.0}, {1.0, 1.0}, {2.0, 2.0}}).has_coincident_pair());
    CHECK_FALSE(build_population({{1.0, 1.0}, {1.5, 1.0}, {2.0, 2.0}}).has_coincident_pair());
}

TEST_CASE("population construction rejects bad input", "[population]") {
    CHECK_THROWS_AS(build_population({}), ilm::input_error);
    CHECK_THROWS_AS(build_population({{0.0, 0.0}}), ilm::input_error);
    CHECK_THROWS_AS(build_population({{0.0, std::nan("")}, {1.0, 1.0}}), ilm::input_error);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(build_population({{inf, 0.0}, {1.0, 1.0}}), ilm::input_error);
}

TEST_CASE("coordinates are preserved in order", "[population]") {
    const auto pop = build_population({{0.5, 1.5}, {2.5, 3.5}});
    CHECK(pop.x(0) == 0.5);
    CHECK(pop.y(0) == 1.5);
    CHECK(pop.x(1) == 2.5);
    CHECK(pop.y(1) == 3.5);
}
