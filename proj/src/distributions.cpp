#include "rjmix/distributions.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rjmix/errors.hpp"
#include "rjmix/special.hpp"

namespace rjmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive_income(double x, const char* who) {
    if (!(x > 0.0)) {
        std::ostringstream msg;
        msg << who << ": x must be positive, got " << x;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

void LognormalParams::validate() const {
    if (!std::isfinite(mu)) throw std::invalid_argument("LognormalParams: mu must be finite");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("LognormalParams: sigma2 must be positive");
}

void Gb2Params::validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !(p > 0.0) || !(q > 0.0))
        throw std::invalid_argument("Gb2Params: all four parameters must be positive");
}

void MixtureParams::validate() const {
    const std::size_t r = weights.size();
    if (r == 0 || mus.size() != r || sigma2s.size() != r)
        throw std::invalid_argument("MixtureParams: component vectors must be non-empty and equal length");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("MixtureParams: negative weight");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("MixtureParams: weights must sum to 1 within 1e-12");
    for (std::size_t i = 0; i < r; ++i) {
        if (!std::isfinite(mus[i])) throw std::invalid_argument("MixtureParams: non-finite mu");
        if (!(sigma2s[i] > 0.0)) throw std::invalid_argument("MixtureParams: sigma2 must be positive");
        if (i > 0 && !(mus[i - 1] < mus[i]))
            throw std::invalid_argument("MixtureParams: mus must be strictly increasing");
    }
}

double ln_log_pdf(double x, const LognormalParams& params) {
    require_positive_income(x, "ln_pdf");
    params.validate();
    const double lx = std::log(x);
    const double d = lx - params.mu;
    return -kLogSqrt2Pi - 0.5 * std::log(params.sigma2) - lx - d * d / (2.0 * params.sigma2);
}

double ln_pdf(double x, const LognormalParams& params) { return std::exp(ln_log_pdf(x, params)); }

double ln_cdf(double x, const LognormalParams& params) {
    require_positive_income(x, "ln_cdf");
    params.validate();
    return norm_cdf((std::log(x) - params.mu) / std::sqrt(params.sigma2));
}

namespace {

void check_weight_sum(const MixtureParams& params, const char* who) {
    double sum = 0.0;
    for (double w : params.weights) sum += w;
    if (std::fabs(sum - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << who << ": mixture weights sum to " << sum << ", expected 1 within 1e-12";
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

double mln_pdf(double x, const MixtureParams& params) {
    require_positive_income(x, "mln_pdf");
    check_weight_sum(params, "mln_pdf");
    const double lx = std::log(x);
    double sum = 0.0;
    for (int r = 0; r < params.components(); ++r) {
        const double d = lx - params.mus[r];
        sum += params.weights[r] / std::sqrt(params.sigma2s[r]) *
               std::exp(-d * d / (2.0 * params.sigma2s[r]));
    }
    return sum / (std::exp(kLogSqrt2Pi) * x);
}

double mln_cdf(double x, const MixtureParams& params) {
    require_positive_income(x, "mln_cdf");
    check_weight_sum(params, "mln_cdf");
    const double lx = std::log(x);
    double sum = 0.0;
    for (int r = 0; r < params.components(); ++r)
        sum += params.weights[r] * norm_cdf((lx - params.mus[r]) / std::sqrt(params.sigma2s[r]));
    return sum;
}

double gb2_log_pdf(double x, const Gb2Params& params) {
    require_positive_income(x, "gb2_pdf");
    params.validate();
    const double t = params.a * (std::log(x) - std::log(params.b));
    // log(1 + (x/b)^a) without overflow on either side.
    const double softplus = (t > 0.0) ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    return std::log(params.a) + (params.a * params.p - 1.0) * std::log(x) -
           params.a * params.p * std::log(params.b) - log_beta(params.p, params.q) -
           (params.p + params.q) * softplus;
}

double gb2_pdf(double x, const Gb2Params& params) { return std::exp(gb2_log_pdf(x, params)); }

double gb2_cdf(double x, const Gb2Params& params) {
    require_positive_income(x, "gb2_cdf");
    params.validate();
    // u = (x/b)^a / (1 + (x/b)^a), computed without overflow on either side.
    const double t = params.a * (std::log(x) - std::log(params.b));
    double u;
    if (t >= 0.0) {
        const double e = std::exp(-t);
        u = 1.0 / (1.0 + e);
    } else {
        const double e = std::exp(t);
        u = e / (1.0 + e);
    }
    return reg_inc_beta(u, params.p, params.q);
}

double sample_lognormal(const LognormalParams& params, Rng& rng) {
    params.validate();
    return std::exp(params.mu + std::sqrt(params.sigma2) * rng.normal());
}

double sample_mixture(const MixtureParams& params, Rng& rng) {
    params.validate();
    double u = rng.uniform();
    int r = 0;
    for (; r + 1 < params.components(); ++r) {
        u -= params.weights[r];
        if (u <= 0.0) break;
    }
    return std::exp(params.mus[r] + std::sqrt(params.sigma2s[r]) * rng.normal());
}

double sample_gb2(const Gb2Params& params, Rng& rng) {
    params.validate();
    const double y = rng.beta(params.p, params.q);
    return params.b * std::pow(y / (1.0 - y), 1.0 / params.a);
}

TruncatedNormalInterval::TruncatedNormalInterval(double za, double zb) : za_(za), zb_(zb) {
    if (!(za < zb)) throw std::invalid_argument("TruncatedNormalInterval: za must be below zb");
    // Work with upper-tail CDF values when the interval sits on the right,
    // so the interval mass keeps relative precision out in the tail.
    if (std::isinf(za) && za < 0.0)
        use_upper_ = false;
    else if (std::isinf(zb) && zb > 0.0)
        use_upper_ = true;
    else
        use_upper_ = (za + zb > 0.0);
    if (use_upper_) {
        fa_ = norm_cdf_upper(za);
        fb_ = norm_cdf_upper(zb);
        mass_ = fa_ - fb_;
    } else {
        fa_ = norm_cdf(za);
        fb_ = norm_cdf(zb);
        mass_ = fb_ - fa_;
    }
}

double TruncatedNormalInterval::draw_z(Rng& rng) const {
    const double u = rng.uniform();
    double z;
    if (use_upper_) {
        // c(z) = (1-u)*c(za) + u*c(zb); z = -Phi^{-1}(c(z)).
        const double c = (1.0 - u) * fa_ + u * fb_;
        z = -norm_quantile(c);
    } else {
        const double f = (1.0 - u) * fa_ + u * fb_;
        z = norm_quantile(f);
    }
    // Inverse CDF puts z in [za, zb] up to rounding; containment is (za, zb].
    if (z <= za_) z = std::nextafter(za_, kInf);
    if (z > zb_) z = zb_;
    return z;
}

double sample_truncated_lognormal(const LognormalParams& params, double lo, double hi, Rng& rng) {
    params.validate();
    if (!(lo >= 0.0)) throw std::invalid_argument("sample_truncated_lognormal: lo must be >= 0");
    if (!(lo < hi)) throw std::invalid_argument("sample_truncated_lognormal: need lo < hi");
    const double sigma = std::sqrt(params.sigma2);
    const double za = (lo > 0.0) ? (std::log(lo) - params.mu) / sigma : -kInf;
    const double zb = std::isinf(hi) ? kInf : (std::log(hi) - params.mu) / sigma;
    TruncatedNormalInterval interval(za, zb);
    if (interval.mass() < 1e-300) {
        std::ostringstream msg;
        msg << "sample_truncated_lognormal: interval (" << lo << ", " << hi
            << "] has vanishing mass under LN(" << params.mu << ", " << params.sigma2 << ")";
        throw degeneracy_error(msg.str());
    }
    const double z = interval.draw_z(rng);
    double x = std::exp(params.mu + sigma * z);
    if (x <= lo) x = std::nextafter(lo, kInf);
    if (x > hi) x = hi;
    return x;
}

}  // namespace rjmix
