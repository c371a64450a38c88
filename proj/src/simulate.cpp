#include "rjmix/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rjmix {

namespace {

SimulatedGrouped group_sample(std::vector<double> sample, long long n, int k_groups) {
    std::vector<double> sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    const long long per_group = n / k_groups;
    SimulatedGrouped out;
    out.raw = std::move(sample);
    for (int k = 1; k < k_groups; ++k)
        out.grouped.boundaries.push_back(sorted[static_cast<std::size_t>(per_group * k - 1)]);
    out.grouped.counts.assign(k_groups, per_group);
    for (int k = 0; k < k_groups; ++k) {
        const auto begin = sorted.begin() + static_cast<std::ptrdiff_t>(per_group) * k;
        const double sum = std::accumulate(begin, begin + per_group, 0.0);
        out.grouped.group_means.push_back(sum / static_cast<double>(per_group));
    }
    out.grouped.validate();
    return out;
}

void check_design(long long n, int k_groups) {
    if (k_groups < 1) throw std::invalid_argument("simulate_grouped: need at least one group");
    if (n < k_groups) throw std::invalid_argument("simulate_grouped: need n >= K");
    if (n % k_groups != 0)
        throw std::invalid_argument("simulate_grouped: n must be divisible by K (fixed-frequency design)");
}

}  // namespace

SimulatedGrouped simulate_grouped(const MixtureParams& dgp, long long n, int k_groups, Rng& rng) {
    dgp.validate();
    check_design(n, k_groups);
    std::vector<double> sample(static_cast<std::size_t>(n));
    for (auto& v : sample) v = sample_mixture(dgp, rng);
    return group_sample(std::move(sample), n, k_groups);
}

SimulatedGrouped simulate_grouped(const Gb2Params& dgp, long long n, int k_groups, Rng& rng) {
    dgp.validate();
    check_design(n, k_groups);
    std::vector<double> sample(static_cast<std::size_t>(n));
    for (auto& v : sample) v = sample_gb2(dgp, rng);
    return group_sample(std::move(sample), n, k_groups);
}

std::pair<double, double> gastwirth_bounds(const GroupedData& data) {
    data.validate();
    if (!data.has_means())
        throw std::invalid_argument("gastwirth_bounds: group means are required");
    const int k_groups = data.groups();
    const double n = static_cast<double>(data.total());
    double mean = 0.0;
    for (int k = 0; k < k_groups; ++k)
        mean += data.counts[k] * data.group_means[k];
    mean /= n;

    double lower = 0.0;
    for (int i = 0; i < k_groups; ++i)
        for (int j = 0; j < k_groups; ++j)
            lower += static_cast<double>(data.counts[i]) * static_cast<double>(data.counts[j]) *
                     std::fabs(data.group_means[i] - data.group_means[j]);
    lower /= 2.0 * n * n * mean;

    double upper = lower;
    for (int k = 0; k < k_groups; ++k) {
        const double share = static_cast<double>(data.counts[k]) / n;
        const double xbar = data.group_means[k];
        double gmax;
        if (k < k_groups - 1) {
            const double lo = data.lower_edge(k);
            const double hi = data.upper_edge(k);
            const double pk = (hi - xbar) / (hi - lo);
            gmax = pk * (1.0 - pk) * (hi - lo) / xbar;
        } else {
            gmax = (xbar - data.lower_edge(k)) / xbar;
        }
        upper += share * share * (xbar / mean) * gmax;
    }
    return {lower, upper};
}

double sample_gini(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("sample_gini: empty input");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double weighted = 0.0, total = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        weighted += (static_cast<double>(i) + 1.0) * sorted[i];
        total += sorted[i];
    }
    if (!(total > 0.0)) throw std::invalid_argument("sample_gini: values must have positive sum");
    return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

}  // namespace rjmix
