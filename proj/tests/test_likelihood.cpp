#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rjmix/likelihood.hpp"
#include "rjmix/rng.hpp"

using namespace rjmix;

namespace {

MixtureParams single_ln(double mu, double sigma2) {
    MixtureParams p;
    p.weights = {1.0};
    p.mus = {mu};
    p.sigma2s = {sigma2};
    return p;
}

GroupedData two_group_data(double t1, long long n1, long long n2) {
    GroupedData data;
    data.boundaries = {t1};
    data.counts = {n1, n2};
    return data;
}

}  // namespace

TEST_CASE("K=2 likelihood has the hand-computed value") {
    // n = (1,1), t = (1), LN(0,1): L = 2! * f(1) * (1 - F(1)) = 2 * phi(0) * 0.5.
    const double ll = log_likelihood_grouped(two_group_data(1.0, 1, 1), single_ln(0.0, 1.0));
    CHECK(ll == doctest::Approx(-0.91893853320467274).epsilon(1e-12));
}

TEST_CASE("K=2 GB2 case is hand computable through F(x) = x/(x+b)") {
    const Gb2Params params{1.0, 4.0, 1.0, 1.0};
    const GroupedData data = two_group_data(4.0, 3, 2);
    // L = 5!/(2! 2!) * F^2 * f * (1-F)^2 with F = 0.5, f = 1/16.
    const double expected =
        std::log(120.0 / 4.0) + 2.0 * std::log(0.5) + std::log(1.0 / 16.0) + 2.0 * std::log(0.5);
    CHECK(log_likelihood_grouped(data, params) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("likelihood rejects non-increasing boundaries") {
    GroupedData data;
    data.boundaries = {2.0, 1.0};
    data.counts = {1, 1, 1};
    CHECK_THROWS_AS(log_likelihood_grouped(data, single_ln(0.0, 1.0)), std::invalid_argument);
}

TEST_CASE("likelihood is deterministic and representation invariant") {
    GroupedData data;
    data.boundaries = {5.0, 12.0, 30.0};
    data.counts = {10, 10, 10, 10};
    const MixtureParams one = single_ln(2.5, 0.5);
    const double a = log_likelihood_grouped(data, one);
    const double b = log_likelihood_grouped(data, one);
    CHECK(a == b);  // bit identical

    // A two-component mixture with identical components is the same
    // distribution, so the likelihood must match the R=1 evaluation.
    MixtureParams duplicated;
    duplicated.weights = {0.4, 0.6};
    duplicated.mus = {2.5, 2.5};
    duplicated.sigma2s = {0.5, 0.5};
    CHECK(log_likelihood_grouped(data, duplicated) == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("likelihood is continuous in the parameters") {
    GroupedData data;
    data.boundaries = {5.0, 12.0, 30.0};
    data.counts = {7, 9, 11, 13};
    MixtureParams params;
    params.weights = {0.3, 0.7};
    params.mus = {2.0, 3.2};
    params.sigma2s = {0.4, 0.3};
    const double base = log_likelihood_grouped(data, params);
    MixtureParams bumped = params;
    bumped.mus[0] += 1e-6;
    bumped.sigma2s[1] += 1e-6;
    const double shifted = log_likelihood_grouped(data, bumped);
    CHECK(std::fabs(shifted - base) / std::max(1.0, std::fabs(base)) < 1e-4);
}

TEST_CASE("underflowed CDF increments give -inf, not an error") {
    GroupedData data;
    data.boundaries = {1.0, 1e9};
    data.counts = {5, 5, 5};
    // A tiny-variance component leaves no mass between the boundaries.
    const double ll = log_likelihood_grouped(data, single_ln(0.0, 1e-6));
    CHECK(std::isinf(ll));
    CHECK(ll < 0.0);
}

TEST_CASE("K=2 likelihood matches an order-statistic Monte Carlo oracle") {
    // With n = 20 split (7, 13), exp(ll) as a function of t1 is the density
    // of the 7th order statistic. Estimate that density at t1 = 1.1 by
    // simulation and a central difference of the empirical CDF.
    const LognormalParams params{0.0, 1.0};
    const double t1 = 1.1;
    const long long n1 = 7, n2 = 13;
    const double ll = log_likelihood_grouped(two_group_data(t1, n1, n2), single_ln(0.0, 1.0));
    const double density = std::exp(ll);

    Rng rng(31);
    const int reps = 400000;
    const double h = 0.02;
    long long inside = 0;
    std::vector<double> sample(20);
    for (int rep = 0; rep < reps; ++rep) {
        for (auto& v : sample) v = sample_lognormal(params, rng);
        std::nth_element(sample.begin(), sample.begin() + (n1 - 1), sample.end());
        const double stat = sample[n1 - 1];
        if (stat > t1 - h && stat <= t1 + h) ++inside;
    }
    const double mc_density = static_cast<double>(inside) / (2.0 * h * reps);
    CHECK(mc_density == doctest::Approx(density).epsilon(0.05));
}

TEST_CASE("augmented likelihood") {
    GroupedData data;
    data.boundaries = {2.0};
    data.counts = {3, 2};
    LatentState latent = make_latent_skeleton(data);
    const std::vector<double> xs = {0.7, 1.1, 2.0, 2.9, 4.2};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        latent.x[i] = xs[i];
        latent.log_x[i] = std::log(xs[i]);
    }

    SUBCASE("single component reduces to the complete-data kernel") {
        const MixtureParams params = single_ln(0.6, 0.9);
        const double got = log_augmented_likelihood(data, latent, params);
        double expected = 0.0;
        for (double x : xs) {
            const double dev = std::log(x) - 0.6;
            expected += -0.5 * std::log(0.9) - dev * dev / (2.0 * 0.9);
        }
        CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("term-by-term accumulation over observations agrees") {
        MixtureParams params;
        params.weights = {0.45, 0.55};
        params.mus = {0.2, 1.1};
        params.sigma2s = {0.5, 0.8};
        latent.z = {0, 1, 0, 1, 1};
        const double got = log_augmented_likelihood(data, latent, params);
        double expected = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const int r = latent.z[i];
            const double dev = std::log(xs[i]) - params.mus[r];
            expected += std::log(params.weights[r]) - 0.5 * std::log(params.sigma2s[r]) -
                        dev * dev / (2.0 * params.sigma2s[r]);
        }
        CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("shifting log incomes and component means together is invariant") {
        MixtureParams params;
        params.weights = {0.45, 0.55};
        params.mus = {0.2, 1.1};
        params.sigma2s = {0.5, 0.8};
        latent.z = {0, 1, 0, 1, 1};
        const double base = log_augmented_likelihood(data, latent, params);
        const double shift = 0.37;
        LatentState moved = latent;
        GroupedData moved_data = data;
        moved_data.boundaries[0] = 2.0 * std::exp(shift);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            moved.log_x[i] = latent.log_x[i] + shift;
            moved.x[i] = std::exp(moved.log_x[i]);
        }
        moved.x[latent.boundary_slots[0]] = moved_data.boundaries[0];
        MixtureParams moved_params = params;
        for (double& m : moved_params.mus) m += shift;
        CHECK(log_augmented_likelihood(moved_data, moved, moved_params) ==
              doctest::Approx(base).epsilon(1e-10));
    }

    SUBCASE("inconsistent latent state is rejected") {
        LatentState broken = latent;
        broken.x[4] = 1.0;  // group 2 value below the boundary
        CHECK_THROWS_AS(log_augmented_likelihood(data, broken, single_ln(0.0, 1.0)),
                        std::invalid_argument);
    }
}
