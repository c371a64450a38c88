#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "rjmix/rng.hpp"
#include "rjmix/simulate.hpp"

using namespace rjmix;

namespace {

MixtureParams sim1_truth() {
    MixtureParams p;
    p.weights = {0.2, 0.5, 0.3};
    p.mus = {2.0, 3.0, 4.0};
    p.sigma2s = {0.3, 0.1, 0.2};
    return p;
}

}  // namespace

TEST_CASE("simulate_grouped keeps the fixed-frequency decile design") {
    Rng rng(101);
    const auto sim = simulate_grouped(sim1_truth(), 10000, 10, rng);
    CHECK(sim.grouped.groups() == 10);
    for (long long c : sim.grouped.counts) CHECK(c == 1000);
    CHECK(sim.grouped.total() == 10000);
    CHECK(sim.raw.size() == 10000);
    // Boundaries strictly increase and the group means interleave them.
    for (int k = 0; k + 1 < 9; ++k)
        CHECK(sim.grouped.boundaries[k] < sim.grouped.boundaries[k + 1]);
    for (int k = 0; k < 10; ++k) {
        CHECK(sim.grouped.group_means[k] > sim.grouped.lower_edge(k));
        CHECK(sim.grouped.group_means[k] <= sim.grouped.upper_edge(k));
    }
}

TEST_CASE("simulate_grouped is reproducible and validates the design") {
    Rng rng1(7), rng2(7);
    const auto a = simulate_grouped(sim1_truth(), 1000, 10, rng1);
    const auto b = simulate_grouped(sim1_truth(), 1000, 10, rng2);
    CHECK(a.grouped.boundaries == b.grouped.boundaries);
    CHECK(a.grouped.group_means == b.grouped.group_means);
    CHECK(a.raw == b.raw);

    Rng rng3(7);
    CHECK_THROWS_AS(simulate_grouped(sim1_truth(), 1001, 10, rng3), std::invalid_argument);
    CHECK_THROWS_AS(simulate_grouped(sim1_truth(), 5, 10, rng3), std::invalid_argument);
}

TEST_CASE("gb2 simulation produces valid grouped data") {
    Rng rng(55);
    const auto sim = simulate_grouped(Gb2Params{2.0, 10.0, 2.5, 1.5}, 5000, 10, rng);
    CHECK(sim.grouped.groups() == 10);
    CHECK(sim.grouped.total() == 5000);
    sim.grouped.validate();
}

TEST_CASE("gastwirth bounds") {
    SUBCASE("equal group means give a zero lower bound") {
        // Disjoint intervals force distinct means across groups, so the
        // all-equal case is only realizable with a single group.
        GroupedData flat;
        flat.counts = {10};
        flat.group_means = {3.0};
        const auto [lower, upper] = gastwirth_bounds(flat);
        CHECK(lower == doctest::Approx(0.0));
        CHECK(upper == doctest::Approx(1.0));  // open top group supremum
    }

    SUBCASE("missing means raise") {
        GroupedData data;
        data.boundaries = {1.0};
        data.counts = {2, 2};
        CHECK_THROWS_AS(gastwirth_bounds(data), std::invalid_argument);
    }

    SUBCASE("raw-sample Gini lies inside the bounds across seeds") {
        int inside = 0;
        for (int seed = 1; seed <= 25; ++seed) {
            Rng rng(seed);
            const auto sim = simulate_grouped(sim1_truth(), 2000, 10, rng);
            const auto [lower, upper] = gastwirth_bounds(sim.grouped);
            const double g = sample_gini(sim.raw);
            if (g >= lower && g <= upper) ++inside;
        }
        CHECK(inside >= 24);
    }
}

TEST_CASE("sample_gini on simple configurations") {
    // All equal values: Gini 0.
    const std::vector<double> equal(10, 3.0);
    CHECK(sample_gini(equal) == doctest::Approx(0.0).epsilon(1e-12));
    // Two values {~0, 1}: population Gini = |x-y| / (2 * n * mean) summed
    // over ordered pairs = 2 / (2 * 4 * 0.5) = 0.5.
    const std::vector<double> pair = {1e-12, 1.0};
    CHECK(sample_gini(pair) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK_THROWS_AS(sample_gini(std::vector<double>{}), std::invalid_argument);
}
