#include "rjmix/rjmcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rjmix/errors.hpp"
#include "rjmix/special.hpp"

namespace rjmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_beta22_pdf(double u) {
    return std::log(6.0) + std::log(u) + std::log1p(-u);
}

// Truncated normal draw for the ordered component means. When the window
// mass underflows, the conditional is concentrated at the window edge
// nearest the mean; return a point just inside that edge.
double draw_truncated_normal(double mean, double var, double lo, double hi, Rng& rng) {
    const double sd = std::sqrt(var);
    const double za = std::isinf(lo) ? -kInf : (lo - mean) / sd;
    const double zb = std::isinf(hi) ? kInf : (hi - mean) / sd;
    TruncatedNormalInterval interval(za, zb);
    double value;
    if (interval.mass() < 1e-300) {
        value = (za > 0.0) ? std::nextafter(lo, hi) : std::nextafter(hi, lo);
    } else {
        value = mean + sd * interval.draw_z(rng);
    }
    if (!std::isinf(lo) && value <= lo) value = std::nextafter(lo, kInf);
    if (!std::isinf(hi) && value >= hi) value = std::nextafter(hi, -kInf);
    return value;
}

}  // namespace

void PriorConfig::validate() const {
    if (!(lambda0 > 0.0) || !(alpha0 > 0.0) || !(tau0_2 > 0.0) || !(n0 > 0.0) ||
        !(s0 > 0.0) || !(nu0 > 0.0) || !(g0 > 0.0) || !(h0 > 0.0))
        throw std::invalid_argument("PriorConfig: all hyper-parameters must be positive");
    if (!std::isfinite(mu0)) throw std::invalid_argument("PriorConfig: mu0 must be finite");
    if (r_max < 1) throw std::invalid_argument("PriorConfig: R_max must be >= 1");
}

void RunConfig::validate() const {
    if (iterations <= 0) throw std::invalid_argument("RunConfig: iterations must be positive");
    if (burn_in < 0 || burn_in >= iterations)
        throw std::invalid_argument("RunConfig: need iterations > burn_in >= 0");
    if (thin < 1) throw std::invalid_argument("RunConfig: thin must be >= 1");
    if (initial_r < 1) throw std::invalid_argument("RunConfig: initial_r must be >= 1");
}

Component combine_components(const Component& c1, const Component& c2) {
    Component merged;
    merged.weight = c1.weight + c2.weight;
    const double a = c1.weight / merged.weight;
    const double b = c2.weight / merged.weight;
    merged.mu = a * c1.mu + b * c2.mu;
    // Weight, mean and second moment are matched; this grouping of the
    // second-moment equation avoids cancellation between mu^2 terms.
    const double gap = c1.mu - c2.mu;
    merged.sigma2 = a * c1.sigma2 + b * c2.sigma2 + a * b * gap * gap;
    return merged;
}

std::pair<Component, Component> split_component(const Component& merged, double u1, double u2,
                                                double u3) {
    Component c1, c2;
    c1.weight = merged.weight * u1;
    c2.weight = merged.weight * (1.0 - u1);
    const double sigma = std::sqrt(merged.sigma2);
    c1.mu = merged.mu - u2 * sigma * std::sqrt(c2.weight / c1.weight);
    c2.mu = merged.mu + u2 * sigma * std::sqrt(c1.weight / c2.weight);
    const double shrink = (1.0 - u2 * u2) * merged.sigma2 * merged.weight;
    c1.sigma2 = u3 * shrink / c1.weight;
    c2.sigma2 = (1.0 - u3) * shrink / c2.weight;
    return {c1, c2};
}

SplitUs recover_split_us(const Component& merged, const Component& c1, const Component& c2) {
    SplitUs us;
    us.u1 = c1.weight / merged.weight;
    us.u2 = (c2.mu - c1.mu) * std::sqrt(c1.weight * c2.weight) /
            (std::sqrt(merged.sigma2) * merged.weight);
    us.u3 = c1.sigma2 * c1.weight / ((1.0 - us.u2 * us.u2) * merged.sigma2 * merged.weight);
    return us;
}

double split_jacobian(const Component& merged, const Component& c1, const Component& c2,
                      double u2, double u3) {
    // Exact determinant of the split map; the (1 - u2^2) factor follows
    // from differentiating the variance equations (a finite-difference
    // check pins it down in the tests).
    return merged.weight * std::fabs(c1.mu - c2.mu) * c1.sigma2 * c2.sigma2 /
           (u2 * (1.0 - u2 * u2) * u3 * (1.0 - u3) * merged.sigma2);
}

double birth_probability(int r, int r_max) {
    if (r >= r_max) return 0.0;
    if (r <= 1) return 1.0;  // a death at R = 1 is never proposed
    return 0.5;
}

double birth_log_acceptance(int r, long long n, int n_empty, double new_weight,
                            const PriorConfig& prior, double b_r, double d_r_plus_1) {
    const double w = new_weight;
    const double ra = static_cast<double>(r) * prior.alpha0;
    double log_a = std::log(prior.lambda0) - std::log(static_cast<double>(r + 1));
    log_a -= log_beta(ra, prior.alpha0);
    log_a += (prior.alpha0 - 1.0) * std::log(w);
    log_a += (static_cast<double>(n) + ra - r) * std::log1p(-w);
    log_a += std::log(static_cast<double>(r + 1));
    log_a += std::log(d_r_plus_1) - std::log((n_empty + 1) * b_r);
    // proposal density g_{1,R}(w) = R (1-w)^{R-1}
    log_a -= std::log(static_cast<double>(r)) + (r - 1.0) * std::log1p(-w);
    log_a += (r - 1.0) * std::log1p(-w);
    return log_a;
}

double split_log_acceptance(const PriorConfig& prior, int r_small, const Component& merged,
                            const Component& c1, const Component& c2, double u1, double u2,
                            double u3, double log_p_alloc, double delta_log_aug,
                            double hyper_mu, double tau2, double beta, double b_r,
                            double d_r_plus_1) {
    const double r = static_cast<double>(r_small);
    double log_a = delta_log_aug;
    // model prior ratio (truncated Poisson) and the ordered-labeling factor
    log_a += std::log(prior.lambda0) - std::log(r + 1.0);
    log_a += std::log(r + 1.0);
    // Dirichlet prior ratio for the weights
    log_a += (prior.alpha0 - 1.0) *
                 (std::log(c1.weight) + std::log(c2.weight) - std::log(merged.weight)) -
             log_beta(prior.alpha0, r * prior.alpha0);
    // normal prior ratio for the extra component mean
    const double d1 = c1.mu - hyper_mu;
    const double d2 = c2.mu - hyper_mu;
    const double dm = merged.mu - hyper_mu;
    log_a += -0.5 * std::log(2.0 * M_PI * tau2) - (d1 * d1 + d2 * d2 - dm * dm) / (2.0 * tau2);
    // gamma prior ratio for the extra variance (density taken in sigma^2)
    log_a += prior.nu0 * std::log(beta) - std::lgamma(prior.nu0) -
             (prior.nu0 + 1.0) *
                 (std::log(c1.sigma2) + std::log(c2.sigma2) - std::log(merged.sigma2)) -
             beta * (1.0 / c1.sigma2 + 1.0 / c2.sigma2 - 1.0 / merged.sigma2);
    // proposal ratio
    log_a += std::log(d_r_plus_1) - std::log(b_r) - log_p_alloc;
    log_a -= log_beta22_pdf(u1) + log_beta22_pdf(u2);  // g_{1,1}(u3) = 1
    // Jacobian of the split map
    log_a += std::log(merged.weight) + std::log(std::fabs(c1.mu - c2.mu)) +
             std::log(c1.sigma2) + std::log(c2.sigma2) - std::log(merged.sigma2) -
             std::log(u2) - std::log1p(-u2 * u2) - std::log(u3) - std::log1p(-u3);
    return log_a;
}

MixtureSampler::MixtureSampler(const GroupedData& data, const PriorConfig& prior,
                               std::uint64_t seed, int initial_r)
    : data_(data), prior_(prior), rng_(seed) {
    data.validate();
    prior.validate();
    for (double t : data.boundaries) log_boundaries_.push_back(std::log(t));
    init_state(initial_r);
}

MixtureSampler::MixtureSampler(const PriorConfig& prior, std::uint64_t seed, int initial_r)
    : data_(std::nullopt), prior_(prior), rng_(seed) {
    prior.validate();
    init_state(initial_r);
}

void MixtureSampler::init_state(int initial_r) {
    if (initial_r < 1 || initial_r > prior_.r_max)
        throw std::invalid_argument("MixtureSampler: initial_r must lie in [1, R_max]");
    const int r = initial_r;

    state_.mu = prior_.mu0;
    state_.tau2 = (prior_.n0 > 1.0) ? prior_.s0 / (prior_.n0 - 1.0) : prior_.s0 / prior_.n0;
    state_.beta = prior_.g0 / prior_.h0;

    double center = prior_.mu0;
    double spread2 = 1.0;
    if (data_) {
        state_.latent = make_latent_skeleton(*data_);
        const int k_groups = data_->groups();
        for (std::size_t i = 0; i < state_.latent.x.size(); ++i) {
            const int k = state_.latent.d[i];
            double x0;
            if (k_groups == 1)
                x0 = 1.0;
            else if (k == 0)
                x0 = 0.5 * data_->boundaries[0];
            else if (k == k_groups - 1)
                x0 = 1.5 * data_->boundaries[k_groups - 2];
            else
                x0 = std::sqrt(data_->boundaries[k - 1] * data_->boundaries[k]);
            state_.latent.x[i] = x0;
            state_.latent.log_x[i] = std::log(x0);
        }
        for (std::size_t k = 0; k < state_.latent.boundary_slots.size(); ++k) {
            state_.latent.x[state_.latent.boundary_slots[k]] = data_->boundaries[k];
            state_.latent.log_x[state_.latent.boundary_slots[k]] = log_boundaries_[k];
        }
        for (auto& label : state_.latent.z)
            label = std::min<int>(static_cast<int>(rng_.uniform() * r), r - 1);
        double sum = 0.0, sum2 = 0.0;
        for (double lx : state_.latent.log_x) {
            sum += lx;
            sum2 += lx * lx;
        }
        const double n = static_cast<double>(state_.latent.log_x.size());
        center = sum / n;
        spread2 = std::max(sum2 / n - center * center, 0.01);
    }

    state_.params.weights.assign(r, 1.0 / r);
    state_.params.mus.resize(r);
    state_.params.sigma2s.assign(r, spread2);
    const double spread = std::sqrt(spread2);
    for (int j = 0; j < r; ++j)
        state_.params.mus[j] = center + spread * (2.0 * (j + 0.5) / r - 1.0);
    refresh_counts();
}

void MixtureSampler::refresh_counts() {
    counts_.assign(state_.params.components(), 0);
    for (int label : state_.latent.z) ++counts_[label];
}

int MixtureSampler::count_empty() const {
    int empty = 0;
    for (long long c : counts_) empty += (c == 0);
    return empty;
}

void MixtureSampler::update_weights() {
    const int r = state_.params.components();
    std::vector<double> conc(r);
    for (int j = 0; j < r; ++j) conc[j] = static_cast<double>(counts_[j]) + prior_.alpha0;
    state_.params.weights = rng_.dirichlet(conc);
}

void MixtureSampler::update_components() {
    const int r = state_.params.components();
    std::vector<double> sum_lx(r, 0.0), sum_lx2(r, 0.0);
    for (std::size_t i = 0; i < state_.latent.z.size(); ++i) {
        const double lx = state_.latent.log_x[i];
        const int j = state_.latent.z[i];
        sum_lx[j] += lx;
        sum_lx2[j] += lx * lx;
    }
    for (int j = 0; j < r; ++j) {
        const double nj = static_cast<double>(counts_[j]);
        const double prec = nj / state_.params.sigma2s[j] + 1.0 / state_.tau2;
        const double tau_hat2 = 1.0 / prec;
        const double mu_hat =
            tau_hat2 * (sum_lx[j] / state_.params.sigma2s[j] + state_.mu / state_.tau2);
        const double lo = (j == 0) ? -kInf : state_.params.mus[j - 1];
        const double hi = (j == r - 1) ? kInf : state_.params.mus[j + 1];
        state_.params.mus[j] = draw_truncated_normal(mu_hat, tau_hat2, lo, hi, rng_);

        const double mu_j = state_.params.mus[j];
        const double quad = sum_lx2[j] - 2.0 * mu_j * sum_lx[j] + nj * mu_j * mu_j;
        const double nu_hat = 0.5 * nj + prior_.nu0;
        const double beta_hat = 0.5 * std::max(quad, 0.0) + state_.beta;
        state_.params.sigma2s[j] = 1.0 / rng_.gamma(nu_hat, beta_hat);
    }
}

std::vector<double> MixtureSampler::allocation_probabilities(double log_x) const {
    const int r = state_.params.components();
    std::vector<double> probs(r);
    double max_lw = -kInf;
    for (int j = 0; j < r; ++j) {
        const double dev = log_x - state_.params.mus[j];
        probs[j] = std::log(state_.params.weights[j]) - 0.5 * std::log(state_.params.sigma2s[j]) -
                   dev * dev / (2.0 * state_.params.sigma2s[j]);
        max_lw = std::max(max_lw, probs[j]);
    }
    double total = 0.0;
    for (double& lw : probs) {
        lw = std::exp(lw - max_lw);
        total += lw;
    }
    for (double& w : probs) w /= total;
    return probs;
}

void MixtureSampler::update_allocations() {
    if (prior_only()) return;
    const int r = state_.params.components();
    if (r == 1) {
        std::fill(state_.latent.z.begin(), state_.latent.z.end(), 0);
        refresh_counts();
        return;
    }
    std::vector<double> base(r), inv2s(r), lw(r);
    for (int j = 0; j < r; ++j) {
        base[j] = std::log(state_.params.weights[j]) - 0.5 * std::log(state_.params.sigma2s[j]);
        inv2s[j] = 0.5 / state_.params.sigma2s[j];
    }
    counts_.assign(r, 0);
    for (std::size_t i = 0; i < state_.latent.z.size(); ++i) {
        const double lx = state_.latent.log_x[i];
        double max_lw = -kInf;
        for (int j = 0; j < r; ++j) {
            const double dev = lx - state_.params.mus[j];
            lw[j] = base[j] - dev * dev * inv2s[j];
            if (lw[j] > max_lw) max_lw = lw[j];
        }
        // After centering on the max, the largest weight is exactly 1, so a
        // fully-underflowed row degenerates to picking the arg max.
        double total = 0.0;
        for (int j = 0; j < r; ++j) {
            lw[j] = std::exp(lw[j] - max_lw);
            total += lw[j];
        }
        double u = rng_.uniform() * total;
        int pick = r - 1;
        for (int j = 0; j < r; ++j) {
            u -= lw[j];
            if (u <= 0.0) {
                pick = j;
                break;
            }
        }
        state_.latent.z[i] = pick;
        ++counts_[pick];
    }
}

void MixtureSampler::update_latent_incomes() {
    if (prior_only()) return;
    const int r = state_.params.components();
    const int k_groups = data_->groups();
    std::vector<double> sigma(r);
    for (int j = 0; j < r; ++j) sigma[j] = std::sqrt(state_.params.sigma2s[j]);

    // Interval table on the standard normal scale, one entry per
    // (group, component) pair; boundaries are fixed within a sweep.
    std::vector<TruncatedNormalInterval> table;
    table.reserve(static_cast<std::size_t>(k_groups) * r);
    for (int k = 0; k < k_groups; ++k) {
        for (int j = 0; j < r; ++j) {
            const double za =
                (k == 0) ? -kInf : (log_boundaries_[k - 1] - state_.params.mus[j]) / sigma[j];
            const double zb = (k == k_groups - 1)
                                  ? kInf
                                  : (log_boundaries_[k] - state_.params.mus[j]) / sigma[j];
            table.emplace_back(za, zb);
        }
    }

    std::vector<char> is_boundary(state_.latent.x.size(), 0);
    for (std::size_t slot : state_.latent.boundary_slots) is_boundary[slot] = 1;

    for (std::size_t i = 0; i < state_.latent.x.size(); ++i) {
        if (is_boundary[i]) continue;
        const int k = state_.latent.d[i];
        const int j = state_.latent.z[i];
        const TruncatedNormalInterval& interval = table[static_cast<std::size_t>(k) * r + j];
        if (interval.mass() < 1e-300) {
            std::ostringstream msg;
            msg << "update_latent_incomes: group " << (k + 1) << " has vanishing mass under "
                << "component " << (j + 1) << " LN(" << state_.params.mus[j] << ", "
                << state_.params.sigma2s[j] << ")";
            throw degeneracy_error(msg.str());
        }
        const double z = interval.draw_z(rng_);
        const double lx = state_.params.mus[j] + sigma[j] * z;
        double x = std::exp(lx);
        const double lo = data_->lower_edge(k);
        const double hi = data_->upper_edge(k);
        if (x <= lo) x = std::nextafter(lo, kInf);
        if (x > hi) x = hi;
        state_.latent.x[i] = x;
        state_.latent.log_x[i] = lx;
    }
}

void MixtureSampler::update_hypers() {
    const int r = state_.params.components();
    double sum_mu = 0.0;
    for (double m : state_.params.mus) sum_mu += m;
    const double tau_hat2 = 1.0 / (r / state_.tau2 + 1.0 / prior_.tau0_2);
    const double mu_hat = tau_hat2 * (sum_mu / state_.tau2 + prior_.mu0 / prior_.tau0_2);
    state_.mu = rng_.normal(mu_hat, tau_hat2);

    double sq = 0.0;
    for (double m : state_.params.mus) sq += (m - state_.mu) * (m - state_.mu);
    state_.tau2 = 1.0 / rng_.gamma(prior_.n0 + 0.5 * r, prior_.s0 + 0.5 * sq);

    double sum_prec = 0.0;
    for (double s2 : state_.params.sigma2s) sum_prec += 1.0 / s2;
    state_.beta = rng_.gamma(r * prior_.nu0 + prior_.g0, sum_prec + prior_.h0);
}

bool MixtureSampler::birth_death_move() {
    const int r = state_.params.components();
    if (prior_.r_max <= 1) return false;
    const long long n = data_ ? data_->total() : 0;
    const double b_r = birth_probability(r, prior_.r_max);
    if (rng_.uniform() < b_r) {
        ++stats_.birth_proposed;
        const double w_new = rng_.beta(1.0, static_cast<double>(r));
        const double mu_new = rng_.normal(state_.mu, state_.tau2);
        const double sigma2_new = 1.0 / rng_.gamma(prior_.nu0, state_.beta);
        const double d_next = 1.0 - birth_probability(r + 1, prior_.r_max);
        const double log_a =
            birth_log_acceptance(r, n, count_empty(), w_new, prior_, b_r, d_next);
        if (std::log(rng_.uniform()) < log_a) {
            int pos = 0;
            while (pos < r && state_.params.mus[pos] < mu_new) ++pos;
            for (double& w : state_.params.weights) w *= 1.0 - w_new;
            state_.params.weights.insert(state_.params.weights.begin() + pos, w_new);
            state_.params.mus.insert(state_.params.mus.begin() + pos, mu_new);
            state_.params.sigma2s.insert(state_.params.sigma2s.begin() + pos, sigma2_new);
            counts_.insert(counts_.begin() + pos, 0);
            for (int& label : state_.latent.z)
                if (label >= pos) ++label;
            ++stats_.birth_accepted;
            return true;
        }
        return false;
    }
    // Death: pick uniformly among the empty components, if any.
    std::vector<int> empties;
    for (int j = 0; j < r; ++j)
        if (counts_[j] == 0) empties.push_back(j);
    if (empties.empty()) {
        ++stats_.death_unavailable;
        return false;
    }
    ++stats_.death_proposed;
    const int victim =
        empties[std::min<std::size_t>(static_cast<std::size_t>(rng_.uniform() * empties.size()),
                                      empties.size() - 1)];
    const double w_del = state_.params.weights[victim];
    const int r_small = r - 1;
    const double b_small = birth_probability(r_small, prior_.r_max);
    const double d_here = 1.0 - birth_probability(r, prior_.r_max);
    const double log_a = birth_log_acceptance(r_small, n, static_cast<int>(empties.size()) - 1,
                                              w_del, prior_, b_small, d_here);
    if (std::log(rng_.uniform()) < -log_a) {
        state_.params.weights.erase(state_.params.weights.begin() + victim);
        state_.params.mus.erase(state_.params.mus.begin() + victim);
        state_.params.sigma2s.erase(state_.params.sigma2s.begin() + victim);
        counts_.erase(counts_.begin() + victim);
        for (double& w : state_.params.weights) w /= 1.0 - w_del;
        for (int& label : state_.latent.z)
            if (label > victim) --label;
        ++stats_.death_accepted;
        return true;
    }
    return false;
}

MixtureSampler::SplitProposal MixtureSampler::propose_split(int r_star, double u1, double u2,
                                                            double u3) {
    const int r = state_.params.components();
    SplitProposal prop;
    prop.r_star = r_star;
    prop.u1 = u1;
    prop.u2 = u2;
    prop.u3 = u3;
    const Component merged{state_.params.weights[r_star], state_.params.mus[r_star],
                           state_.params.sigma2s[r_star]};
    auto [c1, c2] = split_component(merged, u1, u2, u3);
    prop.c1 = c1;
    prop.c2 = c2;
    // Adjacency: the new means must stay between the neighbours of r_star.
    if (r_star > 0 && !(state_.params.mus[r_star - 1] < c1.mu)) return prop;
    if (r_star + 1 < r && !(c2.mu < state_.params.mus[r_star + 1])) return prop;
    prop.feasible = true;

    double log_p_alloc = 0.0;
    double quad1 = 0.0, quad2 = 0.0, quad_star = 0.0;
    const double base1 = std::log(c1.weight) - 0.5 * std::log(c1.sigma2);
    const double base2 = std::log(c2.weight) - 0.5 * std::log(c2.sigma2);
    for (std::size_t i = 0; i < state_.latent.z.size(); ++i) {
        if (state_.latent.z[i] != r_star) continue;
        prop.members.push_back(i);
        const double lx = state_.latent.log_x[i];
        const double dev1 = lx - c1.mu;
        const double dev2 = lx - c2.mu;
        const double lw1 = base1 - dev1 * dev1 / (2.0 * c1.sigma2);
        const double lw2 = base2 - dev2 * dev2 / (2.0 * c2.sigma2);
        const double m = std::max(lw1, lw2);
        const double e1 = std::exp(lw1 - m);
        const double e2 = std::exp(lw2 - m);
        const double p1 = e1 / (e1 + e2);
        const bool to_second = rng_.uniform() >= p1;
        prop.assign_to_second.push_back(to_second ? 1 : 0);
        if (to_second) {
            ++prop.l2;
            log_p_alloc += std::log1p(-p1);
            quad2 += dev2 * dev2;
        } else {
            ++prop.l1;
            log_p_alloc += std::log(p1);
            quad1 += dev1 * dev1;
        }
        const double dev_star = lx - merged.mu;
        quad_star += dev_star * dev_star;
    }
    prop.log_p_alloc = log_p_alloc;

    const double delta_log_aug =
        prop.l1 * std::log(c1.weight) + prop.l2 * std::log(c2.weight) -
        (prop.l1 + prop.l2) * std::log(merged.weight) - 0.5 * prop.l1 * std::log(c1.sigma2) -
        quad1 / (2.0 * c1.sigma2) - 0.5 * prop.l2 * std::log(c2.sigma2) -
        quad2 / (2.0 * c2.sigma2) +
        0.5 * (prop.l1 + prop.l2) * std::log(merged.sigma2) + quad_star / (2.0 * merged.sigma2);

    const double b_r = birth_probability(r, prior_.r_max);
    const double d_next = 1.0 - birth_probability(r + 1, prior_.r_max);
    prop.log_accept =
        split_log_acceptance(prior_, r, merged, c1, c2, u1, u2, u3, log_p_alloc, delta_log_aug,
                             state_.mu, state_.tau2, state_.beta, b_r, d_next);
    return prop;
}

void MixtureSampler::apply_split(const SplitProposal& prop) {
    const int pos = prop.r_star;
    state_.params.weights[pos] = prop.c1.weight;
    state_.params.mus[pos] = prop.c1.mu;
    state_.params.sigma2s[pos] = prop.c1.sigma2;
    state_.params.weights.insert(state_.params.weights.begin() + pos + 1, prop.c2.weight);
    state_.params.mus.insert(state_.params.mus.begin() + pos + 1, prop.c2.mu);
    state_.params.sigma2s.insert(state_.params.sigma2s.begin() + pos + 1, prop.c2.sigma2);
    for (int& label : state_.latent.z)
        if (label > pos) ++label;
    for (std::size_t m = 0; m < prop.members.size(); ++m)
        if (prop.assign_to_second[m]) state_.latent.z[prop.members[m]] = pos + 1;
    counts_.insert(counts_.begin() + pos + 1, prop.l2);
    counts_[pos] = prop.l1;
}

MixtureSampler::CombineProposal MixtureSampler::propose_combine(int r1) {
    const int r = state_.params.components();
    if (r1 < 0 || r1 + 1 >= r)
        throw std::invalid_argument("propose_combine: pair index out of range");
    CombineProposal prop;
    prop.r1 = r1;
    const Component c1{state_.params.weights[r1], state_.params.mus[r1],
                       state_.params.sigma2s[r1]};
    const Component c2{state_.params.weights[r1 + 1], state_.params.mus[r1 + 1],
                       state_.params.sigma2s[r1 + 1]};
    prop.merged = combine_components(c1, c2);
    prop.us = recover_split_us(prop.merged, c1, c2);

    double log_p_alloc = 0.0;
    double quad1 = 0.0, quad2 = 0.0, quad_star = 0.0;
    long long l1 = 0, l2 = 0;
    const double base1 = std::log(c1.weight) - 0.5 * std::log(c1.sigma2);
    const double base2 = std::log(c2.weight) - 0.5 * std::log(c2.sigma2);
    for (std::size_t i = 0; i < state_.latent.z.size(); ++i) {
        const int label = state_.latent.z[i];
        if (label != r1 && label != r1 + 1) continue;
        const double lx = state_.latent.log_x[i];
        const double dev1 = lx - c1.mu;
        const double dev2 = lx - c2.mu;
        const double lw1 = base1 - dev1 * dev1 / (2.0 * c1.sigma2);
        const double lw2 = base2 - dev2 * dev2 / (2.0 * c2.sigma2);
        const double m = std::max(lw1, lw2);
        const double e1 = std::exp(lw1 - m);
        const double e2 = std::exp(lw2 - m);
        const double p1 = e1 / (e1 + e2);
        if (label == r1) {
            ++l1;
            log_p_alloc += std::log(p1);
            quad1 += dev1 * dev1;
        } else {
            ++l2;
            log_p_alloc += std::log1p(-p1);
            quad2 += dev2 * dev2;
        }
        const double dev_star = lx - prop.merged.mu;
        quad_star += dev_star * dev_star;
    }

    const double delta_log_aug =
        l1 * std::log(c1.weight) + l2 * std::log(c2.weight) -
        (l1 + l2) * std::log(prop.merged.weight) - 0.5 * l1 * std::log(c1.sigma2) -
        quad1 / (2.0 * c1.sigma2) - 0.5 * l2 * std::log(c2.sigma2) - quad2 / (2.0 * c2.sigma2) +
        0.5 * (l1 + l2) * std::log(prop.merged.sigma2) +
        quad_star / (2.0 * prop.merged.sigma2);

    const int r_small = r - 1;
    const double b_small = birth_probability(r_small, prior_.r_max);
    const double d_here = 1.0 - birth_probability(r, prior_.r_max);
    const double log_a_split =
        split_log_acceptance(prior_, r_small, prop.merged, c1, c2, prop.us.u1, prop.us.u2,
                             prop.us.u3, log_p_alloc, delta_log_aug, state_.mu, state_.tau2,
                             state_.beta, b_small, d_here);
    prop.log_accept = -log_a_split;
    return prop;
}

void MixtureSampler::apply_combine(const CombineProposal& prop) {
    const int pos = prop.r1;
    state_.params.weights[pos] = prop.merged.weight;
    state_.params.mus[pos] = prop.merged.mu;
    state_.params.sigma2s[pos] = prop.merged.sigma2;
    state_.params.weights.erase(state_.params.weights.begin() + pos + 1);
    state_.params.mus.erase(state_.params.mus.begin() + pos + 1);
    state_.params.sigma2s.erase(state_.params.sigma2s.begin() + pos + 1);
    counts_[pos] += counts_[pos + 1];
    counts_.erase(counts_.begin() + pos + 1);
    for (int& label : state_.latent.z)
        if (label > pos) --label;
}

bool MixtureSampler::split_combine_move() {
    const int r = state_.params.components();
    if (prior_.r_max <= 1) return false;
    const double b_r = birth_probability(r, prior_.r_max);
    if (rng_.uniform() < b_r) {
        ++stats_.split_proposed;
        const int r_star =
            std::min<int>(static_cast<int>(rng_.uniform() * r), r - 1);
        const double u1 = rng_.beta(2.0, 2.0);
        const double u2 = rng_.beta(2.0, 2.0);
        const double u3 = rng_.uniform();
        const SplitProposal prop = propose_split(r_star, u1, u2, u3);
        if (!prop.feasible) {
            ++stats_.split_infeasible;
            return false;
        }
        if (std::log(rng_.uniform()) < prop.log_accept) {
            apply_split(prop);
            ++stats_.split_accepted;
            return true;
        }
        return false;
    }
    ++stats_.combine_proposed;
    const int r1 = std::min<int>(static_cast<int>(rng_.uniform() * (r - 1)), r - 2);
    const CombineProposal prop = propose_combine(r1);
    if (std::log(rng_.uniform()) < prop.log_accept) {
        apply_combine(prop);
        ++stats_.combine_accepted;
        return true;
    }
    return false;
}

void MixtureSampler::sweep() {
    birth_death_move();
    split_combine_move();
    update_weights();
    update_components();
    update_allocations();
    update_latent_incomes();
    update_hypers();
}

namespace {

Draws run_impl(MixtureSampler& sampler, const GroupedData* data, const RunConfig& run) {
    Draws out;
    out.records.reserve(static_cast<std::size_t>((run.iterations - run.burn_in + run.thin - 1) /
                                                 run.thin));
    for (long long it = 0; it < run.iterations; ++it) {
        const bool bd = sampler.birth_death_move();
        const bool sc = sampler.split_combine_move();
        sampler.update_weights();
        sampler.update_components();
        sampler.update_allocations();
        sampler.update_latent_incomes();
        sampler.update_hypers();
        if (it >= run.burn_in && (it - run.burn_in) % run.thin == 0) {
            DrawRecord rec;
            rec.iteration = it + 1;
            rec.r = sampler.state().params.components();
            rec.weights = sampler.state().params.weights;
            rec.mus = sampler.state().params.mus;
            rec.sigma2s = sampler.state().params.sigma2s;
            rec.mu = sampler.state().mu;
            rec.tau2 = sampler.state().tau2;
            rec.beta = sampler.state().beta;
            rec.log_lik = data ? log_likelihood_grouped(*data, sampler.state().params) : kNaN;
            rec.birth_death_accepted = bd;
            rec.split_combine_accepted = sc;
            out.records.push_back(std::move(rec));
        }
    }
    out.stats = sampler.stats();
    return out;
}

}  // namespace

Draws run_chain(const GroupedData& data, const PriorConfig& prior, const RunConfig& run) {
    run.validate();
    if (run.initial_r > prior.r_max)
        throw std::invalid_argument("run_chain: initial_r exceeds R_max");
    MixtureSampler sampler(data, prior, run.seed, run.initial_r);
    return run_impl(sampler, &data, run);
}

Draws run_prior_chain(const PriorConfig& prior, const RunConfig& run) {
    run.validate();
    if (run.initial_r > prior.r_max)
        throw std::invalid_argument("run_prior_chain: initial_r exceeds R_max");
    MixtureSampler sampler(prior, run.seed, run.initial_r);
    return run_impl(sampler, nullptr, run);
}

}  // namespace rjmix
