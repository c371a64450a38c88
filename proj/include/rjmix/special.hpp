#pragma once

namespace rjmix {

inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

// Standard normal density.
double norm_pdf(double z);

// Standard normal CDF Phi(z), absolute error below 1e-15 (erfc based).
double norm_cdf(double z);

// Upper tail 1 - Phi(z), accurate to full relative precision far out.
double norm_cdf_upper(double z);

// Phi(zb) - Phi(za) for za <= zb, computed on whichever tail keeps the
// subtraction well conditioned. Accepts +-inf endpoints.
double norm_cdf_increment(double za, double zb);

// Inverse of norm_cdf, relative accuracy ~1e-14 over p in (1e-300, 1).
double norm_quantile(double p);

// log Beta(a, b).
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double reg_inc_beta(double x, double a, double b);

}  // namespace rjmix
