#include "lsc/specfn.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lsc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// g(t) = t ln t - t + 1, the per-unit Poisson divergence d(t, 1).
// Series around t = 1 avoids the cancellation of the first-order terms.
double unit_poisson_div(double t) {
  if (t == 0.0) return 1.0;
  const double u = t - 1.0;
  if (std::abs(u) < 0.1) {
    double term = u * u;
    double sum = 0.0;
    for (int n = 2; n < 40; ++n) {
      const double c = term / (static_cast<double>(n) * (n - 1));
      sum += (n % 2 == 0) ? c : -c;
      term *= u;
      if (std::abs(c) < 1e-19 * sum) break;
    }
    return sum;
  }
  return t * std::log(t) - t + 1.0;
}

// y * g(x / y), the Poisson divergence with the 0 ln 0 convention.
double scaled_div(double x, double y) { return y * unit_poisson_div(x / y); }

}  // namespace

double binary_kl(double p, double phat) {
  if (!(p >= 0.0 && p <= 1.0) || !(phat >= 0.0 && phat <= 1.0)) {
    throw std::domain_error("binary_kl: probabilities must lie in [0, 1]");
  }
  // D ln2 = d(p, phat) + d(q, qhat); the linear parts of the two brackets
  // cancel exactly, so each bracket can be evaluated on its own.
  const double q = 1.0 - p;
  const double qhat = 1.0 - phat;
  double nats = 0.0;
  if (phat == 0.0) {
    if (p > 0.0) return kInf;
  } else {
    nats += scaled_div(p, phat);
  }
  if (qhat == 0.0) {
    if (q > 0.0) return kInf;
  } else {
    nats += scaled_div(q, qhat);
  }
  return nats > 0.0 ? nats / kLn2 : 0.0;
}

double poisson_div(double x, double y) {
  if (!(y > 0.0)) throw std::domain_error("poisson_div: y must be positive");
  if (!(x >= 0.0)) throw std::domain_error("poisson_div: x must be nonnegative");
  return scaled_div(x, y);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binary_entropy: p outside [0, 1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// Rational approximation of the lower half of the normal quantile,
// relative error about 1e-9 (P. J. Acklam).
double acklam_lower(double u) {
  static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                              -2.759285104469687e+02, 1.383577518672690e+02,
                                              -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                              -1.556989798598866e+02, 6.680131188771972e+01,
                                              -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                              -2.400758277161838e+00, -2.549732539343734e+00,
                                              4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  if (u < kLow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double q_inv(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("q_inv: argument must lie in (0, 1)");
  if (u > 0.5) return -q_inv(1.0 - u);
  if (u == 0.5) return 0.0;
  // Phi(y) = u with y <= 0, then Q^{-1}(u) = -y.
  double y = acklam_lower(u);
  for (int i = 0; i < 2; ++i) {
    const double density = std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi);
    y -= (normal_cdf(y) - u) / density;
  }
  return -y;
}

double lambert_w(LambertBranch branch, double x) {
  const double branch_point = -std::exp(-1.0);
  if (std::isnan(x)) throw std::domain_error("lambert_w: NaN argument");
  if (x < branch_point) {
    throw std::domain_error("lambert_w: argument below -1/e: " + std::to_string(x));
  }
  const bool lower = branch == LambertBranch::lower;
  if (lower && x >= 0.0) {
    throw std::domain_error("lambert_w: branch -1 requires x < 0, got " + std::to_string(x));
  }
  if (x == branch_point) return -1.0;
  if (!lower) {
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return x;
  }

  // Distance to the branch point, p = sqrt(2 (e x + 1)).
  const double p = std::sqrt(std::max(0.0, 2.0 * std::fma(std::numbers::e, x, 1.0)));
  const double sp = lower ? -p : p;
  const double series = -1.0 + sp - sp * sp / 3.0 + 11.0 / 72.0 * sp * sp * sp -
                        43.0 / 540.0 * sp * sp * sp * sp;
  if (p < 1e-4) return series;

  double w;
  bool log_form = false;
  if (p < 0.5) {
    w = series;
  } else if (!lower) {
    if (x < 10.0) {
      const double l = std::log1p(x);
      w = l * (1.0 - std::log1p(l) / (2.0 + l));
    } else {
      const double l1 = std::log(x);
      const double l2 = std::log(l1);
      w = l1 - l2 + l2 / l1;
      log_form = true;
    }
  } else {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
    log_form = x > -0.1;
  }

  if (log_form) {
    // Newton on w + ln|w| = ln|x|, which stays finite for extreme arguments.
    const double target = std::log(std::abs(x));
    for (int i = 0; i < 64; ++i) {
      const double f = w + std::log(std::abs(w)) - target;
      const double dw = f / (1.0 + 1.0 / w);
      w -= dw;
      if (std::abs(dw) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) {
        break;
      }
    }
    return w;
  }

  // Halley iteration on w e^w - x.
  for (int i = 0; i < 64; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double dw = f / denom;
    w -= dw;
    if (std::abs(dw) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) {
      break;
    }
  }
  return w;
}

double poisson_cdf(double k, double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("poisson_cdf: gamma must be positive");
  if (!(k > -1.0)) throw std::domain_error("poisson_cdf: k must exceed -1");
  if (std::isinf(k)) return 1.0;
  return boost::math::gamma_q(k + 1.0, gamma);
}

double poisson_sf(double k, double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("poisson_sf: gamma must be positive");
  if (!(k > -1.0)) throw std::domain_error("poisson_sf: k must exceed -1");
  if (std::isinf(k)) return 0.0;
  return boost::math::gamma_p(k + 1.0, gamma);
}

double chi2_2_quantile(double u) {
  if (!(u >= 0.0 && u < 1.0)) throw std::domain_error("chi2_2_quantile: u must lie in [0, 1)");
  return -2.0 * std::log1p(-u);
}

double binomial_pmf(long m, long k, double p) {
  if (m < 0 || !(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial_pmf: bad parameters");
  if (k < 0 || k > m) return 0.0;
  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  if (p == 1.0) return k == m ? 1.0 : 0.0;
  return boost::math::pdf(boost::math::binomial_distribution<double>(static_cast<double>(m), p),
                          static_cast<double>(k));
}

}  // namespace lsc
