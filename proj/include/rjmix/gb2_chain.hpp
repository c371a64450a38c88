#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rjmix/distributions.hpp"
#include "rjmix/grouped_data.hpp"

namespace rjmix {

// Componentwise random-walk Metropolis for the GB2 parameters, run on the
// log scale with independent Gamma priors on (a, b, p, q). Step sizes
// adapt toward the target acceptance rate during burn-in, then freeze.
struct Gb2ChainConfig {
    long long iterations = 100000;
    long long burn_in = 10000;
    int thin = 10;
    std::uint64_t seed = 1;
    std::array<double, 4> step_sizes = {0.3, 0.3, 0.3, 0.3};  // initial proposal sd
    std::array<double, 4> prior_shape = {1.0, 1.0, 1.0, 1.0};
    std::array<double, 4> prior_rate = {1.0, 1.0, 1.0, 1.0};
    double target_acceptance = 0.3;
    bool adapt = true;         // tune step sizes during burn-in
    bool prior_only = false;   // drop the likelihood (sampler validation)

    void validate() const;
};

struct Gb2DrawRecord {
    long long iteration = 0;
    Gb2Params params;
    double log_lik = 0.0;
};

struct Gb2Draws {
    std::vector<Gb2DrawRecord> records;
    std::array<double, 4> acceptance_rate = {0, 0, 0, 0};  // post burn-in
    std::array<double, 4> final_step_sizes = {0, 0, 0, 0};
    std::vector<std::string> warnings;
};

Gb2Draws run_gb2_chain(const GroupedData& data, const Gb2ChainConfig& config);

}  // namespace rjmix
