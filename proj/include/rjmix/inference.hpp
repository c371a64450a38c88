#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rjmix/distributions.hpp"
#include "rjmix/gb2_chain.hpp"
#include "rjmix/rjmcmc.hpp"

namespace rjmix {

// Closed-form lognormal Gini: 2*Phi(sigma/sqrt(2)) - 1.
double gini_lognormal(const LognormalParams& params);

// Gini of an arbitrary distribution on (0, inf) with finite mean, via
// 1 - int (1-F)^2 dx / int (1-F) dx. The upper integration limit is
// pushed out until the survival function drops below 1e-12; mean_hint
// seeds that search and scales the quadrature error targets.
double gini_numeric(const std::function<double(double)>& cdf, double mean_hint = 1.0);

double gini_mixture(const MixtureParams& params);
double gini_gb2(const Gb2Params& params);

// One Gini value per kept draw (closed form when R = 1). Order matches
// the records; evaluation may run on several threads.
std::vector<double> gini_posterior(const Draws& draws, std::optional<int> condition_r = {},
                                   int threads = 0);
std::vector<double> gini_posterior(const Gb2Draws& draws, int threads = 0);

// Pointwise average of the per-draw density over an ascending grid.
std::vector<double> predictive_density(const Draws& draws, std::span<const double> grid,
                                       std::optional<int> condition_r = {});
std::vector<double> predictive_density(const Gb2Draws& draws, std::span<const double> grid);

struct LogMarginal {
    double value = 0.0;
    double se = 0.0;
    std::optional<std::string> warning;  // set when the weight ESS is tiny
};

// Harmonic-mean estimate from per-draw grouped-data log-likelihoods, with
// a delta-method standard error.
LogMarginal log_marginal_likelihood_hm(std::span<const double> log_liks);
LogMarginal log_marginal_likelihood_hm(const Draws& draws, std::optional<int> condition_r = {});
LogMarginal log_marginal_likelihood_hm(const Gb2Draws& draws);

// Robust mode: recursively keep the shortest window holding half the
// sorted points.
double half_sample_mode(std::span<const double> values);

struct Summary {
    double mean = 0.0;
    double sd = 0.0;
    double mode = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

// Mean, sd (M-1 denominator), half-sample mode, equal-tailed interval
// with type-7 interpolated quantiles.
Summary posterior_summaries(std::span<const double> values, double credible_level = 0.95);

struct RHistogram {
    std::map<int, long long> counts;
    long long total = 0;
    double prob(int r) const;
    int mode() const;
};

RHistogram posterior_of_r(const Draws& draws);

// Indices of records with R == condition_r; throws when fewer than 100.
std::vector<std::size_t> conditional_indices(const Draws& draws, int condition_r);

}  // namespace rjmix
