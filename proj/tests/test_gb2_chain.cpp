#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "rjmix/gb2_chain.hpp"
#include "rjmix/rng.hpp"
#include "rjmix/simulate.hpp"

using namespace rjmix;

TEST_CASE("config validation") {
    Gb2ChainConfig config;
    config.iterations = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = Gb2ChainConfig{};
    config.burn_in = config.iterations;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = Gb2ChainConfig{};
    config.step_sizes[2] = 0.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    CHECK_NOTHROW(Gb2ChainConfig{}.validate());
}

TEST_CASE("draws are positive, finite and reproducible") {
    Rng rng(3);
    const auto sim = simulate_grouped(Gb2Params{2.0, 10.0, 2.5, 1.5}, 2000, 10, rng);
    Gb2ChainConfig config;
    config.iterations = 4000;
    config.burn_in = 1000;
    config.thin = 5;
    config.seed = 8;
    const Gb2Draws a = run_gb2_chain(sim.grouped, config);
    const Gb2Draws b = run_gb2_chain(sim.grouped, config);
    REQUIRE(a.records.size() == 600);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const auto& rec = a.records[i];
        CHECK(rec.params.a > 0.0);
        CHECK(rec.params.b > 0.0);
        CHECK(rec.params.p > 0.0);
        CHECK(rec.params.q > 0.0);
        CHECK(std::isfinite(rec.log_lik));
        CHECK(rec.params.a == b.records[i].params.a);
        CHECK(rec.log_lik == b.records[i].log_lik);
    }
}

TEST_CASE("adaptation reaches a sane acceptance rate") {
    Rng rng(5);
    const auto sim = simulate_grouped(Gb2Params{2.0, 10.0, 2.5, 1.5}, 2000, 10, rng);
    Gb2ChainConfig config;
    config.iterations = 12000;
    config.burn_in = 6000;
    config.seed = 21;
    const Gb2Draws draws = run_gb2_chain(sim.grouped, config);
    for (int j = 0; j < 4; ++j) {
        CHECK(draws.acceptance_rate[j] > 0.1);
        CHECK(draws.acceptance_rate[j] < 0.6);
    }
    CHECK(draws.warnings.empty());
}

TEST_CASE("forced extreme step sizes surface an acceptance warning") {
    Rng rng(6);
    const auto sim = simulate_grouped(Gb2Params{2.0, 10.0, 2.5, 1.5}, 2000, 10, rng);
    Gb2ChainConfig config;
    config.iterations = 3000;
    config.burn_in = 500;
    config.seed = 22;
    config.adapt = false;
    config.step_sizes = {1000.0, 1000.0, 1000.0, 1000.0};
    const Gb2Draws draws = run_gb2_chain(sim.grouped, config);
    CHECK_FALSE(draws.warnings.empty());
}

TEST_CASE("prior-only chain reproduces the Gamma(1,1) priors") {
    GroupedData dummy;
    dummy.boundaries = {1.0};
    dummy.counts = {5, 5};
    Gb2ChainConfig config;
    config.iterations = 60000;
    config.burn_in = 5000;
    config.thin = 1;
    config.seed = 30;
    config.prior_only = true;
    const Gb2Draws draws = run_gb2_chain(dummy, config);

    // Exponential(1) has mean 1 and cdf 1 - e^{-x}; check first moments
    // and a coarse 10-bin TV distance (the tight version runs in the
    // acceptance suite).
    for (int j = 0; j < 4; ++j) {
        std::vector<double> values;
        for (const auto& rec : draws.records) {
            const double v = j == 0   ? rec.params.a
                             : j == 1 ? rec.params.b
                             : j == 2 ? rec.params.p
                                      : rec.params.q;
            values.push_back(v);
        }
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        CHECK(mean == doctest::Approx(1.0).epsilon(0.08));

        std::vector<double> bin_count(10, 0.0);
        for (double v : values) {
            const double u = 1.0 - std::exp(-v);
            int bin = static_cast<int>(u * 10.0);
            if (bin > 9) bin = 9;
            ++bin_count[bin];
        }
        double tv = 0.0;
        for (double c : bin_count) tv += std::fabs(c / values.size() - 0.1);
        CHECK(0.5 * tv < 0.05);
    }
}
