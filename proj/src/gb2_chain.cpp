#include "rjmix/gb2_chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rjmix/likelihood.hpp"
#include "rjmix/rng.hpp"

namespace rjmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log posterior in eta = log(a, b, p, q); includes the change-of-variable
// Jacobian sum(eta) so the chain targets the stated posterior in (a,b,p,q).
double log_target(const std::array<double, 4>& eta, const GroupedData& data,
                  const Gb2ChainConfig& config) {
    for (double e : eta)
        if (!(e > -700.0) || !(e < 700.0)) return kNegInf;  // exp would wash out
    Gb2Params params{std::exp(eta[0]), std::exp(eta[1]), std::exp(eta[2]), std::exp(eta[3])};
    double lp = 0.0;
    const std::array<double, 4> values = {params.a, params.b, params.p, params.q};
    for (int j = 0; j < 4; ++j) {
        lp += config.prior_shape[j] * std::log(config.prior_rate[j]) -
              std::lgamma(config.prior_shape[j]) +
              (config.prior_shape[j] - 1.0) * std::log(values[j]) -
              config.prior_rate[j] * values[j];
        lp += eta[j];
    }
    if (!config.prior_only) {
        // Numerical failure on an absurd proposal makes it rejectable,
        // mirroring the -inf underflow policy of the likelihood itself.
        try {
            lp += log_likelihood_grouped(data, params);
        } catch (const std::runtime_error&) {
            return kNegInf;
        }
    }
    return lp;
}

}  // namespace

void Gb2ChainConfig::validate() const {
    if (iterations <= 0) throw std::invalid_argument("Gb2ChainConfig: iterations must be positive");
    if (burn_in < 0 || burn_in >= iterations)
        throw std::invalid_argument("Gb2ChainConfig: need iterations > burn_in >= 0");
    if (thin < 1) throw std::invalid_argument("Gb2ChainConfig: thin must be >= 1");
    for (int j = 0; j < 4; ++j) {
        if (!(step_sizes[j] > 0.0))
            throw std::invalid_argument("Gb2ChainConfig: step sizes must be positive");
        if (!(prior_shape[j] > 0.0) || !(prior_rate[j] > 0.0))
            throw std::invalid_argument("Gb2ChainConfig: prior shapes/rates must be positive");
    }
    if (!(target_acceptance > 0.0) || !(target_acceptance < 1.0))
        throw std::invalid_argument("Gb2ChainConfig: target acceptance must lie in (0,1)");
}

Gb2Draws run_gb2_chain(const GroupedData& data, const Gb2ChainConfig& config) {
    config.validate();
    data.validate();
    Rng rng(config.seed);

    // Start at unit shapes with the scale at a central boundary.
    const double b0 = data.boundaries.empty()
                          ? 1.0
                          : data.boundaries[data.boundaries.size() / 2];
    std::array<double, 4> eta = {0.0, std::log(b0), 0.0, 0.0};
    double current_lp = log_target(eta, data, config);
    if (current_lp == kNegInf)
        throw std::runtime_error("run_gb2_chain: initial state has zero posterior density");

    std::array<double, 4> log_step;
    for (int j = 0; j < 4; ++j) log_step[j] = std::log(config.step_sizes[j]);
    std::array<long long, 4> kept_proposals = {0, 0, 0, 0};
    std::array<long long, 4> kept_accepts = {0, 0, 0, 0};

    Gb2Draws out;
    out.records.reserve(static_cast<std::size_t>(
        (config.iterations - config.burn_in + config.thin - 1) / config.thin));

    for (long long it = 0; it < config.iterations; ++it) {
        for (int j = 0; j < 4; ++j) {
            const double step = std::exp(log_step[j]);
            std::array<double, 4> proposal = eta;
            proposal[j] += step * rng.normal();
            const double proposal_lp = log_target(proposal, data, config);
            const double log_ratio = proposal_lp - current_lp;
            const bool accept = std::log(rng.uniform()) < log_ratio;
            if (accept) {
                eta = proposal;
                current_lp = proposal_lp;
            }
            if (config.adapt && it < config.burn_in) {
                // Robbins-Monro on the log step toward the target rate.
                const double acc_prob = std::min(1.0, std::exp(log_ratio));
                log_step[j] += (acc_prob - config.target_acceptance) / std::sqrt(it + 1.0);
                log_step[j] = std::clamp(log_step[j], std::log(1e-4), std::log(20.0));
            }
            if (it >= config.burn_in) {
                ++kept_proposals[j];
                kept_accepts[j] += accept ? 1 : 0;
            }
        }
        if (it >= config.burn_in && (it - config.burn_in) % config.thin == 0) {
            Gb2DrawRecord rec;
            rec.iteration = it + 1;
            rec.params = Gb2Params{std::exp(eta[0]), std::exp(eta[1]), std::exp(eta[2]),
                                   std::exp(eta[3])};
            rec.log_lik = config.prior_only
                              ? std::numeric_limits<double>::quiet_NaN()
                              : log_likelihood_grouped(data, rec.params);
            out.records.push_back(rec);
        }
    }

    static const char* names[4] = {"a", "b", "p", "q"};
    for (int j = 0; j < 4; ++j) {
        out.acceptance_rate[j] =
            kept_proposals[j] > 0
                ? static_cast<double>(kept_accepts[j]) / static_cast<double>(kept_proposals[j])
                : 0.0;
        out.final_step_sizes[j] = std::exp(log_step[j]);
        if (out.acceptance_rate[j] <= 0.05 || out.acceptance_rate[j] >= 0.95) {
            std::ostringstream msg;
            msg << "acceptance rate for " << names[j] << " is " << out.acceptance_rate[j]
                << " (outside (0.05, 0.95)); consider different step sizes";
            out.warnings.push_back(msg.str());
        }
    }
    return out;
}

}  // namespace rjmix
