#include "rjmix/likelihood.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rjmix/special.hpp"

namespace rjmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log n! - sum_{k<K} log (n_k - 1)! - log n_K!
double log_count_constant(const GroupedData& data) {
    const int k_groups = data.groups();
    double c = std::lgamma(static_cast<double>(data.total()) + 1.0);
    for (int k = 0; k < k_groups - 1; ++k)
        c -= std::lgamma(static_cast<double>(data.counts[k]));
    c -= std::lgamma(static_cast<double>(data.counts[k_groups - 1]) + 1.0);
    return c;
}

// Shared Eq-structure evaluation: needs CDF increments over the group
// intervals and log densities at the interior boundaries.
template <typename IncrementFn, typename LogPdfFn>
double log_likelihood_impl(const GroupedData& data, IncrementFn increment, LogPdfFn log_pdf) {
    data.validate();
    const int k_groups = data.groups();
    double ll = log_count_constant(data);
    for (int k = 0; k < k_groups; ++k) {
        const double inc = increment(k);
        const double exponent =
            (k < k_groups - 1) ? static_cast<double>(data.counts[k]) - 1.0
                               : static_cast<double>(data.counts[k]);
        if (exponent > 0.0) {
            if (!(inc > 0.0)) return kNegInf;
            ll += exponent * std::log(inc);
        }
        if (k < k_groups - 1) ll += log_pdf(data.boundaries[k]);
    }
    return std::isnan(ll) ? kNegInf : ll;
}

}  // namespace

double log_likelihood_grouped(const GroupedData& data, const MixtureParams& params) {
    // The density is permutation invariant, so only the density-level
    // preconditions are enforced here; the mu ordering is a sampler-state
    // invariant checked by MixtureParams::validate().
    const int r_comps = params.components();
    if (r_comps == 0 || params.mus.size() != params.weights.size() ||
        params.sigma2s.size() != params.weights.size())
        throw std::invalid_argument("log_likelihood_grouped: malformed mixture parameters");
    double weight_sum = 0.0;
    for (double w : params.weights) weight_sum += w;
    if (std::fabs(weight_sum - 1.0) > 1e-12)
        throw std::invalid_argument("log_likelihood_grouped: weights must sum to 1");
    for (double s2 : params.sigma2s)
        if (!(s2 > 0.0))
            throw std::invalid_argument("log_likelihood_grouped: sigma2 must be positive");
    std::vector<double> inv_sigma(r_comps);
    for (int r = 0; r < r_comps; ++r) inv_sigma[r] = 1.0 / std::sqrt(params.sigma2s[r]);

    auto zscore = [&](double t, int r) { return (std::log(t) - params.mus[r]) * inv_sigma[r]; };
    auto increment = [&](int k) {
        double inc = 0.0;
        for (int r = 0; r < r_comps; ++r) {
            const double za = (k == 0) ? -std::numeric_limits<double>::infinity()
                                       : zscore(data.boundaries[k - 1], r);
            const double zb = (k == data.groups() - 1)
                                  ? std::numeric_limits<double>::infinity()
                                  : zscore(data.boundaries[k], r);
            inc += params.weights[r] * norm_cdf_increment(za, zb);
        }
        return inc;
    };
    auto log_pdf = [&](double t) { return std::log(mln_pdf(t, params)); };
    return log_likelihood_impl(data, increment, log_pdf);
}

double log_likelihood_grouped(const GroupedData& data, const Gb2Params& params) {
    params.validate();
    auto increment = [&](int k) {
        const double fa = (k == 0) ? 0.0 : gb2_cdf(data.boundaries[k - 1], params);
        const double fb =
            (k == data.groups() - 1) ? 1.0 : gb2_cdf(data.boundaries[k], params);
        return fb - fa;
    };
    auto log_pdf = [&](double t) { return gb2_log_pdf(t, params); };
    return log_likelihood_impl(data, increment, log_pdf);
}

void LatentState::validate(const GroupedData& data, int n_components) const {
    const std::size_t n = static_cast<std::size_t>(data.total());
    if (x.size() != n || log_x.size() != n || z.size() != n || d.size() != n)
        throw std::invalid_argument("LatentState: vector sizes must equal the total count");
    if (boundary_slots.size() != static_cast<std::size_t>(data.groups() - 1))
        throw std::invalid_argument("LatentState: one boundary slot per interior boundary");
    for (std::size_t i = 0; i < n; ++i) {
        if (z[i] < 0 || z[i] >= n_components)
            throw std::invalid_argument("LatentState: component label out of range");
        const int k = d[i];
        if (k < 0 || k >= data.groups())
            throw std::invalid_argument("LatentState: group label out of range");
        if (!(x[i] > data.lower_edge(k)) || !(x[i] <= data.upper_edge(k))) {
            std::ostringstream msg;
            msg << "LatentState: x[" << i << "] = " << x[i] << " escapes group " << (k + 1);
            throw std::invalid_argument(msg.str());
        }
    }
    for (std::size_t k = 0; k < boundary_slots.size(); ++k) {
        if (x[boundary_slots[k]] != data.boundaries[k])
            throw std::invalid_argument("LatentState: boundary slot not pinned to its t_k");
    }
}

LatentState make_latent_skeleton(const GroupedData& data) {
    data.validate();
    LatentState latent;
    const std::size_t n = static_cast<std::size_t>(data.total());
    latent.x.assign(n, 0.0);
    latent.log_x.assign(n, 0.0);
    latent.z.assign(n, 0);
    latent.d.assign(n, 0);
    std::size_t pos = 0;
    for (int k = 0; k < data.groups(); ++k) {
        for (long long j = 0; j < data.counts[k]; ++j) latent.d[pos++] = k;
        if (k < data.groups() - 1) latent.boundary_slots.push_back(pos - 1);
    }
    return latent;
}

double log_augmented_likelihood(const GroupedData& data, const LatentState& latent,
                                const MixtureParams& params) {
    params.validate();
    latent.validate(data, params.components());
    const int r_comps = params.components();
    std::vector<double> quad(r_comps, 0.0);
    std::vector<long long> counts(r_comps, 0);
    for (std::size_t i = 0; i < latent.z.size(); ++i) {
        const int r = latent.z[i];
        const double dev = latent.log_x[i] - params.mus[r];
        quad[r] += dev * dev;
        ++counts[r];
    }
    double ll = 0.0;
    for (int r = 0; r < r_comps; ++r) {
        if (counts[r] > 0) ll += counts[r] * std::log(params.weights[r]);
        ll += -0.5 * counts[r] * std::log(params.sigma2s[r]) -
              quad[r] / (2.0 * params.sigma2s[r]);
    }
    return ll;
}

}  // namespace rjmix
