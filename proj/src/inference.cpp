#include "rjmix/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rjmix/errors.hpp"
#include "rjmix/quadrature.hpp"
#include "rjmix/special.hpp"

namespace rjmix {

namespace {

constexpr double kSurvivalCut = 1e-12;

// Smallest U with 1 - F(U) below the cutoff, by doubling then bisection.
double upper_integration_limit(const std::function<double(double)>& cdf, double scale_hint) {
    double hi = std::max(scale_hint, 1.0);
    int doublings = 0;
    while (1.0 - cdf(hi) > kSurvivalCut) {
        hi *= 2.0;
        if (++doublings > 400)
            throw integration_error(
                "gini_numeric: survival function decays too slowly in the upper tail");
    }
    double lo = hi / 2.0;
    for (int i = 0; i < 40 && hi - lo > 1e-6 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (1.0 - cdf(mid) > kSurvivalCut)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

void run_indexed(std::size_t n, int threads, const std::function<void(std::size_t)>& work) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned n_threads =
        threads > 0 ? static_cast<unsigned>(threads) : std::min<unsigned>(hw, 8);
    if (n_threads <= 1 || n < 2 * n_threads) {
        for (std::size_t i = 0; i < n; ++i) work(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (std::size_t i = t; i < n; i += n_threads) work(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

MixtureParams record_params(const DrawRecord& rec) {
    MixtureParams params;
    params.weights = rec.weights;
    params.mus = rec.mus;
    params.sigma2s = rec.sigma2s;
    return params;
}

}  // namespace

double gini_lognormal(const LognormalParams& params) {
    params.validate();
    return 2.0 * norm_cdf(std::sqrt(params.sigma2 / 2.0)) - 1.0;
}

double gini_numeric(const std::function<double(double)>& cdf, double mean_hint) {
    const double scale = std::max(mean_hint, 1e-100);
    const double upper = upper_integration_limit(cdf, std::max(scale, 1.0));
    auto survival = [&](double x) { return 1.0 - cdf(x); };
    auto survival_sq = [&](double x) {
        const double s = 1.0 - cdf(x);
        return s * s;
    };
    // A heavy-tailed survival function can put the whole interesting
    // region between the nodes of one huge Gauss-Kronrod panel, which
    // silently integrates to zero. Seed the subdivision with log-scaled
    // breakpoints around the mean instead of one span.
    std::vector<double> cuts{0.0};
    for (double edge = scale / 16.0; edge < upper; edge *= 2.0) cuts.push_back(edge);
    cuts.push_back(upper);
    // The integrals scale with the distribution mean, so the error
    // target combines an absolute floor with a relative term; the Gini
    // itself then carries ~1e-8 accuracy regardless of income units.
    auto integrate_segments = [&](const std::function<double(double)>& f, double abs_tol) {
        const double per_segment = abs_tol / static_cast<double>(cuts.size() - 1);
        double total = 0.0;
        for (std::size_t s = 1; s < cuts.size(); ++s)
            total += integrate_adaptive(f, cuts[s - 1], cuts[s], per_segment, 1e-10);
        return total;
    };
    const double denom = integrate_segments(survival, 1e-8 * std::max(1.0, scale));
    if (!(denom > 0.0))
        throw integration_error("gini_numeric: distribution mean integrates to zero");
    const double num = integrate_segments(survival_sq, 1e-8 * std::max(1.0, denom));
    return 1.0 - num / denom;
}

double gini_mixture(const MixtureParams& params) {
    params.validate();
    if (params.components() == 1)
        return gini_lognormal({params.mus[0], params.sigma2s[0]});
    double mean = 0.0;
    for (int r = 0; r < params.components(); ++r)
        mean += params.weights[r] * std::exp(params.mus[r] + 0.5 * params.sigma2s[r]);
    return gini_numeric([&](double x) { return mln_cdf(x, params); }, mean);
}

double gini_gb2(const Gb2Params& params) {
    params.validate();
    if (!(params.a * params.q > 1.0))
        throw integration_error("gini_gb2: mean does not exist (a*q <= 1)");
    // E[X] = b * B(p + 1/a, q - 1/a) / B(p, q)
    const double mean =
        params.b * std::exp(log_beta(params.p + 1.0 / params.a, params.q - 1.0 / params.a) -
                            log_beta(params.p, params.q));
    return gini_numeric([&](double x) { return gb2_cdf(x, params); }, mean);
}

std::vector<double> gini_posterior(const Draws& draws, std::optional<int> condition_r,
                                   int threads) {
    std::vector<std::size_t> idx;
    if (condition_r) {
        idx = conditional_indices(draws, *condition_r);
    } else {
        if (draws.records.empty()) throw std::invalid_argument("gini_posterior: no draws");
        idx.resize(draws.records.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    }
    std::vector<double> out(idx.size());
    run_indexed(idx.size(), threads, [&](std::size_t i) {
        out[i] = gini_mixture(record_params(draws.records[idx[i]]));
    });
    return out;
}

std::vector<double> gini_posterior(const Gb2Draws& draws, int threads) {
    if (draws.records.empty()) throw std::invalid_argument("gini_posterior: no draws");
    std::vector<double> out(draws.records.size());
    run_indexed(draws.records.size(), threads,
                [&](std::size_t i) { out[i] = gini_gb2(draws.records[i].params); });
    return out;
}

std::vector<double> predictive_density(const Draws& draws, std::span<const double> grid,
                                       std::optional<int> condition_r) {
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (!(grid[g] > grid[g - 1]))
            throw std::invalid_argument("predictive_density: grid must be ascending");
    if (!grid.empty() && !(grid.front() > 0.0))
        throw std::invalid_argument("predictive_density: grid values must be positive");
    std::vector<std::size_t> idx;
    if (condition_r) {
        idx = conditional_indices(draws, *condition_r);
    } else {
        if (draws.records.empty()) throw std::invalid_argument("predictive_density: no draws");
        idx.resize(draws.records.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    }
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i : idx) {
        const MixtureParams params = record_params(draws.records[i]);
        for (std::size_t g = 0; g < grid.size(); ++g) out[g] += mln_pdf(grid[g], params);
    }
    for (double& v : out) v /= static_cast<double>(idx.size());
    return out;
}

std::vector<double> predictive_density(const Gb2Draws& draws, std::span<const double> grid) {
    if (draws.records.empty()) throw std::invalid_argument("predictive_density: no draws");
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (!(grid[g] > grid[g - 1]))
            throw std::invalid_argument("predictive_density: grid must be ascending");
    std::vector<double> out(grid.size(), 0.0);
    for (const auto& rec : draws.records)
        for (std::size_t g = 0; g < grid.size(); ++g) out[g] += gb2_pdf(grid[g], rec.params);
    for (double& v : out) v /= static_cast<double>(draws.records.size());
    return out;
}

LogMarginal log_marginal_likelihood_hm(std::span<const double> log_liks) {
    const std::size_t m = log_liks.size();
    if (m < 100)
        throw std::invalid_argument("log_marginal_likelihood_hm: need at least 100 draws, got " +
                                    std::to_string(m));
    double min_ll = std::numeric_limits<double>::infinity();
    for (double ll : log_liks) {
        if (!std::isfinite(ll))
            throw std::invalid_argument("log_marginal_likelihood_hm: non-finite log-likelihood");
        min_ll = std::min(min_ll, ll);
    }
    // Stabilized weights w_i = exp(-(ll_i - min)) lie in (0, 1].
    double sum_w = 0.0, sum_w2 = 0.0;
    for (double ll : log_liks) {
        const double w = std::exp(-(ll - min_ll));
        sum_w += w;
        sum_w2 += w * w;
    }
    const double mean_w = sum_w / static_cast<double>(m);
    const double var_w =
        std::max(0.0, (sum_w2 - sum_w * sum_w / static_cast<double>(m)) /
                          (static_cast<double>(m) - 1.0));
    LogMarginal out;
    out.value = min_ll - std::log(mean_w);
    out.se = std::sqrt(var_w) / (std::sqrt(static_cast<double>(m)) * mean_w);
    const double ess = sum_w * sum_w / sum_w2;
    if (ess < 10.0) {
        std::ostringstream msg;
        msg << "harmonic-mean weights have effective sample size " << ess
            << "; the estimate may be unstable";
        out.warning = msg.str();
    }
    return out;
}

LogMarginal log_marginal_likelihood_hm(const Draws& draws, std::optional<int> condition_r) {
    std::vector<double> lls;
    if (condition_r) {
        for (std::size_t i : conditional_indices(draws, *condition_r))
            lls.push_back(draws.records[i].log_lik);
    } else {
        for (const auto& rec : draws.records) lls.push_back(rec.log_lik);
    }
    return log_marginal_likelihood_hm(lls);
}

LogMarginal log_marginal_likelihood_hm(const Gb2Draws& draws) {
    std::vector<double> lls;
    for (const auto& rec : draws.records) lls.push_back(rec.log_lik);
    return log_marginal_likelihood_hm(lls);
}

double half_sample_mode(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("half_sample_mode: empty input");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t lo = 0, m = sorted.size();
    while (m > 3) {
        const std::size_t h = (m + 1) / 2;  // ceil(m/2) points per window
        std::size_t best = lo;
        double best_width = std::numeric_limits<double>::infinity();
        for (std::size_t i = lo; i + h <= lo + m; ++i) {
            const double width = sorted[i + h - 1] - sorted[i];
            if (width < best_width) {
                best_width = width;
                best = i;
            }
        }
        lo = best;
        m = h;
    }
    if (m == 1) return sorted[lo];
    if (m == 2) return 0.5 * (sorted[lo] + sorted[lo + 1]);
    const double gap1 = sorted[lo + 1] - sorted[lo];
    const double gap2 = sorted[lo + 2] - sorted[lo + 1];
    if (gap1 < gap2) return 0.5 * (sorted[lo] + sorted[lo + 1]);
    if (gap2 < gap1) return 0.5 * (sorted[lo + 1] + sorted[lo + 2]);
    return sorted[lo + 1];
}

namespace {

double quantile_type7(const std::vector<double>& sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - std::floor(h);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

Summary posterior_summaries(std::span<const double> values, double credible_level) {
    if (values.empty()) throw std::invalid_argument("posterior_summaries: empty input");
    if (!(credible_level > 0.0) || !(credible_level < 1.0))
        throw std::invalid_argument("posterior_summaries: credible level must lie in (0,1)");
    Summary s;
    const double m = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / m;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = values.size() > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
    s.mode = half_sample_mode(values);
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double tail = 0.5 * (1.0 - credible_level);
    s.lower = quantile_type7(sorted, tail);
    s.upper = quantile_type7(sorted, 1.0 - tail);
    return s;
}

double RHistogram::prob(int r) const {
    auto it = counts.find(r);
    if (it == counts.end() || total == 0) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(total);
}

int RHistogram::mode() const {
    int best_r = 0;
    long long best = -1;
    for (const auto& [r, c] : counts) {
        if (c > best) {
            best = c;
            best_r = r;
        }
    }
    return best_r;
}

RHistogram posterior_of_r(const Draws& draws) {
    if (draws.records.empty()) throw std::invalid_argument("posterior_of_r: no draws");
    RHistogram hist;
    for (const auto& rec : draws.records) {
        ++hist.counts[rec.r];
        ++hist.total;
    }
    return hist;
}

std::vector<std::size_t> conditional_indices(const Draws& draws, int condition_r) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < draws.records.size(); ++i)
        if (draws.records[i].r == condition_r) idx.push_back(i);
    if (idx.size() < 100) {
        std::ostringstream msg;
        msg << "only " << idx.size() << " draws have R = " << condition_r
            << "; need at least 100 to condition";
        throw std::invalid_argument(msg.str());
    }
    return idx;
}

}  // namespace rjmix
