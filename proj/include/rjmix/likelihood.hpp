#pragma once

#include <cstddef>
#include <vector>

#include "rjmix/distributions.hpp"
#include "rjmix/grouped_data.hpp"

namespace rjmix {

// Log of the selected-order-statistics likelihood: the joint density of
// the K-1 observed quantile boundaries given fixed group frequencies.
// Returns -inf (not an error) when any inter-boundary CDF increment has
// collapsed to zero in floating point.
double log_likelihood_grouped(const GroupedData& data, const MixtureParams& params);
double log_likelihood_grouped(const GroupedData& data, const Gb2Params& params);

// Data augmentation for the mixture: a full latent sample x pinned to the
// boundaries, component labels z and group labels d.
struct LatentState {
    std::vector<double> x;       // latent incomes; boundary slots hold t_k exactly
    std::vector<double> log_x;   // cached logs of x
    std::vector<int> z;          // component label per observation, 0-based
    std::vector<int> d;          // group label per observation, 0-based
    std::vector<std::size_t> boundary_slots;  // indices pinned to t_1..t_{K-1}

    void validate(const GroupedData& data, int n_components) const;
};

// Group labels d and boundary slot indices implied by the counts.
LatentState make_latent_skeleton(const GroupedData& data);

// Log of the augmented likelihood: for each component, n_r*log(pi_r)
// - (n_r/2)*log(sigma2_r) - sum (log x_i - mu_r)^2 / (2 sigma2_r).
// The terms -sum_i log x_i and -(n/2) log(2 pi) are omitted; they depend
// only on x, which the accept/reject ratios hold fixed.
double log_augmented_likelihood(const GroupedData& data, const LatentState& latent,
                                const MixtureParams& params);

}  // namespace rjmix
