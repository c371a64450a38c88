#pragma once

#include <vector>

#include "rjmix/rng.hpp"

namespace rjmix {

struct LognormalParams {
    double mu = 0.0;      // log-scale location
    double sigma2 = 1.0;  // log-scale variance, > 0
    void validate() const;
};

struct Gb2Params {
    double a = 1.0;  // shape
    double b = 1.0;  // scale, same units as income
    double p = 1.0;  // shape
    double q = 1.0;  // shape; finite mean (and Gini) needs a*q > 1
    void validate() const;
};

// Finite lognormal mixture: weights on the simplex, component log-means
// kept strictly increasing so labels are identified.
struct MixtureParams {
    std::vector<double> weights;
    std::vector<double> mus;
    std::vector<double> sigma2s;

    int components() const { return static_cast<int>(weights.size()); }
    void validate() const;
};

double ln_log_pdf(double x, const LognormalParams& params);
double ln_pdf(double x, const LognormalParams& params);
double ln_cdf(double x, const LognormalParams& params);

double mln_pdf(double x, const MixtureParams& params);
double mln_cdf(double x, const MixtureParams& params);

double gb2_log_pdf(double x, const Gb2Params& params);
double gb2_pdf(double x, const Gb2Params& params);
double gb2_cdf(double x, const Gb2Params& params);

double sample_lognormal(const LognormalParams& params, Rng& rng);
double sample_mixture(const MixtureParams& params, Rng& rng);
double sample_gb2(const Gb2Params& params, Rng& rng);

// Standard-normal restriction to (za, zb], drawn by inverse CDF. The CDF
// values are taken on whichever tail holds the interval, so draws stay
// usable when both endpoints sit far out.
class TruncatedNormalInterval {
public:
    TruncatedNormalInterval(double za, double zb);  // za < zb, +-inf allowed

    double mass() const { return mass_; }
    double draw_z(Rng& rng) const;

private:
    double za_, zb_;
    double fa_, fb_;  // direct or complementary CDF at the endpoints
    double mass_;
    bool use_upper_;
};

// One draw from LN(mu, sigma2) restricted to (lo, hi]. Throws
// degeneracy_error when the interval mass underflows (below 1e-300).
double sample_truncated_lognormal(const LognormalParams& params, double lo, double hi,
                                  Rng& rng);

}  // namespace rjmix
