#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rjmix/distributions.hpp"
#include "rjmix/grouped_data.hpp"
#include "rjmix/likelihood.hpp"
#include "rjmix/rng.hpp"

namespace rjmix {

// Hierarchical prior: R ~ Poisson(lambda0) truncated at R_max,
// pi ~ Dirichlet(alpha0,...), mu_r | mu,tau2 ~ N(mu,tau2),
// mu ~ N(mu0,tau0_2), 1/tau2 ~ G(n0,s0), 1/sigma2_r | beta ~ G(nu0,beta),
// beta ~ G(g0,h0). Gamma is shape-rate throughout.
struct PriorConfig {
    double lambda0 = 10.0;
    int r_max = 50;
    double alpha0 = 1.0;
    double mu0 = 0.0;
    double tau0_2 = 100.0;
    double n0 = 2.0;
    double s0 = 0.01;
    double nu0 = 2.0;
    double g0 = 0.2;
    double h0 = 0.01;

    void validate() const;
};

struct RunConfig {
    long long iterations = 100000;
    long long burn_in = 20000;
    int thin = 10;
    std::uint64_t seed = 1;
    int initial_r = 1;

    void validate() const;
};

struct ChainState {
    MixtureParams params;
    LatentState latent;
    double mu = 0.0;    // hyper-mean of the component log-means
    double tau2 = 1.0;  // hyper-variance of the component log-means
    double beta = 1.0;  // rate hyper-parameter of the sigma^{-2} prior
};

struct DrawRecord {
    long long iteration = 0;
    int r = 0;
    std::vector<double> weights;
    std::vector<double> mus;
    std::vector<double> sigma2s;
    double mu = 0.0;
    double tau2 = 0.0;
    double beta = 0.0;
    double log_lik = 0.0;  // grouped-data log-likelihood at this draw
    bool birth_death_accepted = false;
    bool split_combine_accepted = false;
};

struct MoveStats {
    long long birth_proposed = 0, birth_accepted = 0;
    long long death_proposed = 0, death_accepted = 0;
    long long death_unavailable = 0;  // no empty component to delete
    long long split_proposed = 0, split_accepted = 0;
    long long split_infeasible = 0;  // adjacency violated before allocation
    long long combine_proposed = 0, combine_accepted = 0;
};

struct Draws {
    std::vector<DrawRecord> records;
    MoveStats stats;
};

// A single mixture component; used by the trans-dimensional moves.
struct Component {
    double weight = 0.0;
    double mu = 0.0;
    double sigma2 = 0.0;
};

// Moment-matched merge of two components (weight, mean and second moment
// of the component log-means are preserved).
Component combine_components(const Component& c1, const Component& c2);

// Inverse map: split a component by (u1, u2, u3) in (0,1)^3.
std::pair<Component, Component> split_component(const Component& merged, double u1, double u2,
                                                double u3);

// Recover the (u1, u2, u3) that split_component(merged, ...) would need
// to reproduce (c1, c2); merged must be combine_components(c1, c2).
struct SplitUs {
    double u1 = 0.0, u2 = 0.0, u3 = 0.0;
};
SplitUs recover_split_us(const Component& merged, const Component& c1, const Component& c2);

// |d(new pair)/d(merged, u)| of the split transformation.
double split_jacobian(const Component& merged, const Component& c1, const Component& c2,
                      double u2, double u3);

// log acceptance ratio for a birth move from an R-component state;
// death from R+1 components uses the negative. n_empty counts empty
// components before the birth.
double birth_log_acceptance(int r, long long n, int n_empty, double new_weight,
                            const PriorConfig& prior, double b_r, double d_r_plus_1);

// log acceptance ratio for a split from an r_small-component state; the
// matched combine from r_small+1 components uses the negative.
// delta_log_aug is the augmented log-likelihood change of the split and
// log_p_alloc the log-probability of the proposed reallocation.
double split_log_acceptance(const PriorConfig& prior, int r_small, const Component& merged,
                            const Component& c1, const Component& c2, double u1, double u2,
                            double u3, double log_p_alloc, double delta_log_aug,
                            double hyper_mu, double tau2, double beta, double b_r,
                            double d_r_plus_1);

// Probability of birth (vs death) at a given R: 0.5 inside the range,
// forced to 1 at R = 1 and 0 at R = r_max.
double birth_probability(int r, int r_max);

// One full posterior simulator for the grouped-data lognormal mixture.
// Construct with data for the real posterior, or without data for a
// prior-only chain (a sampler-validation mode: no latent variables, all
// likelihood terms drop out).
class MixtureSampler {
public:
    MixtureSampler(const GroupedData& data, const PriorConfig& prior, std::uint64_t seed,
                   int initial_r = 1);
    MixtureSampler(const PriorConfig& prior, std::uint64_t seed, int initial_r = 1);

    void update_weights();
    void update_components();
    void update_allocations();
    void update_latent_incomes();
    void update_hypers();
    bool birth_death_move();
    bool split_combine_move();

    // Sweep order: birth/death, split/combine, weights, component
    // parameters, allocations, latent incomes, hyper-parameters.
    void sweep();

    const ChainState& state() const { return state_; }
    const std::vector<long long>& allocation_counts() const { return counts_; }
    const MoveStats& stats() const { return stats_; }
    bool prior_only() const { return !data_.has_value(); }
    Rng& rng() { return rng_; }

    // Direct state access for verification harnesses; call
    // refresh_allocation_counts() after editing the labels.
    ChainState& mutable_state() { return state_; }
    void refresh_allocation_counts() { refresh_counts(); }

    // Unnormalized-allocation probabilities for one observation (the
    // discrete full conditional of z_i), exposed for verification.
    std::vector<double> allocation_probabilities(double log_x) const;

    // Trans-dimensional proposal machinery, exposed so the acceptance
    // ratios can be checked against their reverse moves.
    struct SplitProposal {
        bool feasible = false;
        int r_star = 0;
        Component c1, c2;
        double u1 = 0.0, u2 = 0.0, u3 = 0.0;
        double log_accept = 0.0;
        std::vector<std::size_t> members;  // indices with z == r_star
        std::vector<int> assign_to_second;  // parallel to members
        long long l1 = 0, l2 = 0;
        double log_p_alloc = 0.0;
    };
    SplitProposal propose_split(int r_star, double u1, double u2, double u3);
    void apply_split(const SplitProposal& proposal);

    struct CombineProposal {
        int r1 = 0;  // merges components r1 and r1+1
        Component merged;
        SplitUs us;
        double log_accept = 0.0;  // log acceptance of the combine itself
    };
    CombineProposal propose_combine(int r1);
    void apply_combine(const CombineProposal& proposal);

private:
    void init_state(int initial_r);
    void refresh_counts();
    int count_empty() const;

    std::optional<GroupedData> data_;
    PriorConfig prior_;
    Rng rng_;
    ChainState state_;
    std::vector<long long> counts_;  // allocation counts per component
    std::vector<double> log_boundaries_;
    MoveStats stats_;
};

// Run a full chain and keep every thin-th sweep after burn-in.
Draws run_chain(const GroupedData& data, const PriorConfig& prior, const RunConfig& run);

// Prior-only chain over (R, pi, Theta, hypers); DrawRecord.log_lik is NaN.
Draws run_prior_chain(const PriorConfig& prior, const RunConfig& run);

}  // namespace rjmix
