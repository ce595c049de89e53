#pragma once

// Special functions and divergences used by the bound evaluators and the
// simulations. Everything here is a pure function of its arguments.

namespace lsc {

inline constexpr double kLn2 = 0.69314718055994530942;

/// Relative entropy D(p || phat) between Bernoulli laws, in bits.
/// Returns +infinity when phat puts zero mass on an outcome p can produce.
double binary_kl(double p, double phat);

/// Poisson divergence d(x, y) = y - x + x ln(x / y), in nats. Requires y > 0.
double poisson_div(double x, double y);

/// Binary entropy h(p) in bits.
double binary_entropy(double p);

/// Standard normal upper tail Q(x) = 1 - Phi(x).
double q_function(double x);
/// Standard normal CDF.
double normal_cdf(double x);
/// Inverse of q_function on (0, 1).
double q_inv(double u);

enum class LambertBranch { principal = 0, lower = -1 };

/// Solves w * exp(w) = x on the requested branch.
double lambert_w(LambertBranch branch, double x);

/// P(K <= k) for K ~ Poisson(gamma); non-integer k > -1 continues through the
/// regularized upper incomplete gamma function Q(k + 1, gamma).
double poisson_cdf(double k, double gamma);
/// 1 - poisson_cdf(k, gamma), evaluated without cancellation.
double poisson_sf(double k, double gamma);

/// Inverse CDF of the chi-square law with two degrees of freedom.
double chi2_2_quantile(double u);

/// Binomial(m, p) probability mass at k, evaluated in log space.
double binomial_pmf(long m, long k, double p);

}  // namespace lsc
