#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "ilmkit/rng.hpp"

using ilm::Rng;

TEST_CASE("uniform draws lie in [0,1) and reproduce by seed", "[rng]") {
    Rng a(42), b(42), c(43);
    bool identical = true, differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double ua = a.uniform();
        REQUIRE(ua >= 0.0);
        REQUIRE(ua < 1.0);
        identical = identical && ua == b.uniform();
        differs = differs || ua != c.uniform();
    }
    CHECK(identical);
    CHECK(differs);
}

TEST_CASE("ranged uniform stays inside its bounds", "[rng]") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(-3.0, 5.0);
        REQUIRE(x >= -3.0);
        REQUIRE(x < 5.0);
    }
}

TEST_CASE("uniform_index covers all residues without bias artifacts", "[rng]") {
    Rng rng(11);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
    for (int k = 0; k < 7; ++k) {
        CHECK(counts[k] > 9000);
        CHECK(counts[k] < 11000);
    }
}

TEST_CASE("normal variates have roughly standard moments", "[rng]") {
    Rng rng(123);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sumsq += z * z;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("derived seeds separate streams and indices", "[rng]") {
    std::set<std::uint64_t> seen;
    for (auto tag : {ilm::stream_tag::simulate, ilm::stream_tag::chain, ilm::stream_tag::pilot,
                     ilm::stream_tag::replicate, ilm::stream_tag::init, ilm::stream_tag::pick})
        for (std::uint64_t idx = 0; idx < 16; ++idx)
            seen.insert(ilm::derive_seed(999, tag, idx));
    CHECK(seen.size() == 6 * 16);
    CHECK(ilm::derive_seed(1, ilm::stream_tag::chain, 0) ==
          ilm::derive_seed(1, ilm::stream_tag::chain, 0));
    CHECK(ilm::derive_seed(1, ilm::stream_tag::chain, 0) !=
          ilm::derive_seed(2, ilm::stream_tag::chain, 0));
}

TEST_CASE("bernoulli respects edge probabilities", "[rng]") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        CHECK_FALSE(rng.bernoulli(0.0));
        CHECK(rng.bernoulli(1.0));
    }
}
