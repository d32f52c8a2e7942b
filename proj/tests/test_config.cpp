#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "ilmkit/config.hpp"
#include "ilmkit/errors.hpp"

using ilm::Config;
using ilm::config_error;

namespace {

const char* sample = R"(# run configuration
[model]
kernel = constant          ; trailing comment
change_points = 1.5, 3.0
framework = SI

[mcmc]
iterations = 60000
burn_in = 10000
pair_threshold = 0.5
pairs = auto
)";

}  // namespace

TEST_CASE("parsing picks up sections, keys, and comments", "[config]") {
    const Config cfg = Config::parse(sample);
    CHECK(cfg.get("model", "kernel") == "constant");
    CHECK(cfg.get("model", "framework") == "SI");
    CHECK(cfg.get_long("mcmc", "iterations") == 60000);
    CHECK(cfg.get_double("mcmc", "pair_threshold") == 0.5);
    CHECK(cfg.get_doubles("model", "change_points") == std::vector<double>{1.5, 3.0});
    CHECK(cfg.has("mcmc", "pairs"));
    CHECK_FALSE(cfg.has("mcmc", "thin"));
}

TEST_CASE("defaults apply only when the key is absent", "[config]") {
    const Config cfg = Config::parse(sample);
    CHECK(cfg.get_long_or("mcmc", "thin", 10) == 10);
    CHECK(cfg.get_long_or("mcmc", "iterations", 5) == 60000);
    CHECK(cfg.get_or("model", "kernel", "powerlaw") == "constant");
    CHECK(cfg.get_double_or("mcmc", "missing", 2.5) == 2.5);
    CHECK(cfg.get_bool_or("run", "verbose", false) == false);
    CHECK(cfg.get_doubles_or("model", "nothing").empty());
}

TEST_CASE("boolean values accept the usual spellings", "[config]") {
    const Config cfg = Config::parse("[a]\nx = true\ny = no\nz = 1\nw = maybe\n");
    CHECK(cfg.get_bool_or("a", "x", false));
    CHECK_FALSE(cfg.get_bool_or("a", "y", true));
    CHECK(cfg.get_bool_or("a", "z", false));
    CHECK_THROWS_AS(cfg.get_bool_or("a", "w", false), config_error);
}

TEST_CASE("serialize then parse is a fixed point", "[config]") {
    const Config cfg = Config::parse(sample);
    const std::string text = cfg.serialize();
    const Config again = Config::parse(text);
    CHECK(cfg == again);
    CHECK(again.serialize() == text);
}

TEST_CASE("set updates in place or appends", "[config]") {
    Config cfg = Config::parse(sample);
    cfg.set("mcmc", "iterations", "100");
    CHECK(cfg.get_long("mcmc", "iterations") == 100);
    cfg.set("run", "seed", "42");
    CHECK(cfg.get("run", "seed") == "42");
    const Config round = Config::parse(cfg.serialize());
    CHECK(round.get("run", "seed") == "42");
}

TEST_CASE("section listing preserves file order", "[config]") {
    const Config cfg = Config::parse("[p]\nalpha1 = halfnormal 1e5\nbeta1 = neghalfnormal 1e5\n");
    const auto entries = cfg.section("p");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].first == "alpha1");
    CHECK(entries[0].second == "halfnormal 1e5");
    CHECK(entries[1].first == "beta1");
    CHECK(cfg.section("missing").empty());
}

TEST_CASE("malformed configs are rejected with line numbers", "[config]") {
    CHECK_THROWS_AS(Config::parse("x = 1\n"), config_error);           // outside a section
    CHECK_THROWS_AS(Config::parse("[a]\njust a line\n"), config_error);  // no equals
    CHECK_THROWS_AS(Config::parse("[a\nx = 1\n"), config_error);       // unterminated header
    CHECK_THROWS_AS(Config::parse("[a]\n= 1\n"), config_error);        // empty key
    CHECK_THROWS_AS(Config::parse("[a]\nx = 1\nx = 2\n"), config_error);  // duplicate
    try {
        Config::parse("[a]\nok = 1\nbroken line\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("numeric parsing rejects trailing junk", "[config]") {
    const Config cfg = Config::parse("[a]\nx = 1.5y\nn = 12 monkeys\n");
    CHECK_THROWS_AS(cfg.get_double("a", "x"), config_error);
    CHECK_THROWS_AS(cfg.get_long("a", "n"), config_error);
}

TEST_CASE("loading a missing file fails cleanly", "[config]") {
    CHECK_THROWS_AS(Config::load("/nonexistent/path/to.ini"), config_error);
}
