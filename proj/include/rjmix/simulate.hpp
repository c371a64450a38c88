#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rjmix/distributions.hpp"
#include "rjmix/grouped_data.hpp"
#include "rjmix/rng.hpp"

namespace rjmix {

struct SimulatedGrouped {
    GroupedData grouped;      // decile-style grouping with group means
    std::vector<double> raw;  // the underlying sample, kept for checks
};

// Draw n values from the DGP, sort, cut at the ranks n*k/K. Keeps the
// fixed-frequency design, so n must divide by K.
SimulatedGrouped simulate_grouped(const MixtureParams& dgp, long long n, int k_groups, Rng& rng);
SimulatedGrouped simulate_grouped(const Gb2Params& dgp, long long n, int k_groups, Rng& rng);

// Nonparametric Gini bounds from boundaries, counts and group means:
// the lower bound ignores within-group spread, the upper bound adds the
// maximal spread each group interval allows (two-point distributions at
// the interval endpoints; finite supremum for the open top group).
std::pair<double, double> gastwirth_bounds(const GroupedData& data);

// Plain sample Gini of raw values (mean absolute difference over 2*mean).
double sample_gini(std::span<const double> values);

}  // namespace rjmix
