#include "lsc/bounds.hpp"

#include "lsc/estimators.hpp"
#include "lsc/io.hpp"
#include "lsc/specfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lsc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_tail_args(std::uint64_t m, double pe) {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (!(pe > 0.0 && pe < 0.5)) throw std::invalid_argument("pe must lie in (0, 1/2)");
}

// Value of the b_upper objective at gamma~ (> 1/2).
double b_objective(double gamma_t, double pe, double alpha, double level) {
  const double kappa = std::max(kappa_tilde(KappaSide::minus, gamma_t, pe, alpha), alpha / level);
  return 2.0 * poisson_div(gamma_t, kappa);
}

// Smallest x in [-1, inf) with f(x) >= target for nondecreasing f.
template <class F>
double bisect_increasing(F f, double target, double hi) {
  double lo = -1.0;
  while (f(hi) < target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return hi;
}

double div_or_inf(double x, double y) { return y > 0.0 ? poisson_div(x, y) : kInf; }

}  // namespace

double gaussian_level(double pe) {
  const double q = q_inv(pe / 2.0);
  return q * q;
}

TailBoundResult iid_converse_a(std::uint64_t m, double pe) {
  check_tail_args(m, pe);
  const double a = gaussian_level(pe) / (2.0 * static_cast<double>(m) * kLn2);
  return {a, BoundKind::converse, pe, m, kNaN, kNaN};
}

double kappa_tilde(KappaSide side, double gamma_t, double pe, double alpha) {
  if (!(gamma_t > 0.0)) throw std::domain_error("kappa_tilde: gamma~ must be positive");
  const double level = gaussian_level(pe);
  const double z = (1.0 / (2.0 * gamma_t) - 1.0) / std::numbers::e;
  if (side == KappaSide::minus) {
    if (!(gamma_t > 0.5)) {
      std::ostringstream msg;
      msg << "kappa_tilde: lower solution needs gamma~ > 1/2, got " << gamma_t;
      throw std::domain_error(msg.str());
    }
    const double w = lambert_w(LambertBranch::lower, z);
    return gamma_t * std::exp(1.0 + w) + (alpha - 1.0) / level;
  }
  const double w = lambert_w(LambertBranch::principal, z);
  return gamma_t * std::exp(1.0 + w) + (alpha + 1.0) / level;
}

double b_upper(double pe, const GammaGrid& grid) {
  if (!(pe > 0.0 && pe < 0.5)) throw std::invalid_argument("pe must lie in (0, 1/2)");
  const double alpha = alpha_range(pe).lo;
  if (!(alpha > 0.0)) return kInf;
  const double level = gaussian_level(pe);
  const auto gammas = log_grid(std::max(grid.lo, 0.5), grid.hi, grid.points);

  std::size_t best = 0;
  double best_val = -kInf;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.5)) continue;
    const double v = b_objective(gammas[i], pe, alpha, level);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }

  double a = gammas[best > 0 ? best - 1 : 0];
  double b = gammas[std::min(best + 1, gammas.size() - 1)];
  a = std::max(a, std::nextafter(0.5, 1.0));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = b_objective(c, pe, alpha, level);
  double fd = b_objective(d, pe, alpha, level);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = b_objective(c, pe, alpha, level);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = b_objective(d, pe, alpha, level);
    }
  }
  best_val = std::max({best_val, fc, fd});
  return std::max(1.0, best_val);
}

TailBoundResult iid_achievable_a(std::uint64_t m, double pe) {
  auto r = iid_converse_a(m, pe);
  r.kind = BoundKind::achievable;
  r.alpha = alpha_range(pe).lo;
  r.b = b_upper(pe);
  r.a *= r.b;
  return r;
}

double universal_redundancy(std::uint64_t l, ModelClass cls) {
  if (l < 2) throw std::invalid_argument("universal_redundancy: l must be at least 2");
  const double ld = static_cast<double>(l);
  const double iid = std::log2(ld) / (2.0 * ld);
  return cls == ModelClass::iid ? iid : 2.0 * iid;
}

std::uint64_t training_threshold(std::uint64_t l, ThresholdMode mode, ModelClass, double pe) {
  if (l < 2) throw std::invalid_argument("training_threshold: l must be at least 2");
  const double ld = static_cast<double>(l);
  const double per_log = ld / std::log2(ld);
  double m = 0.0;
  if (mode == ThresholdMode::average) {
    m = per_log / kLn2;
  } else {
    if (!(pe > 0.0 && pe < 1.0)) throw std::invalid_argument("training_threshold: pe must lie in (0, 1)");
    m = gaussian_level(pe) / (2.0 * kLn2) * per_log;
  }
  return static_cast<std::uint64_t>(std::ceil(m));
}

double markov_error_level(double pe) { return -std::expm1(0.5 * std::log1p(-pe)); }

TailBoundResult markov_achievable_a(std::uint64_t m, double pe) {
  check_tail_args(m, pe);
  auto r = iid_achievable_a(m, markov_error_level(pe));
  r.a *= 2.0;
  r.pe = pe;
  return r;
}

TailBoundResult markov_converse_a(std::uint64_t m, double pe) {
  check_tail_args(m, pe);
  const double a = chi2_2_quantile(1.0 - pe) / (2.0 * static_cast<double>(m) * kLn2);
  return {a, BoundKind::converse, pe, m, kNaN, kNaN};
}

AvgBounds markov_avg_bounds(std::uint64_t m) {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  const double md = static_cast<double>(m);
  return {2.0 * kAlpha0 / (md * kLn2), 1.0 / (md * kLn2)};
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0 && hi >= lo) || points == 0) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
  g.back() = hi;
  return g;
}

std::vector<Figure1Row> figure1_data(double pe, double alpha, const std::vector<double>& gamma_grid) {
  if (!(pe > 0.0 && pe < 0.5)) throw std::invalid_argument("pe must lie in (0, 1/2)");
  const double level = gaussian_level(pe);
  const double half = pe / 2.0;
  std::vector<Figure1Row> rows;
  rows.reserve(gamma_grid.size());
  for (double gt : gamma_grid) {
    Figure1Row row{gt, kNaN, kNaN, kNaN, kNaN};
    row.d_plus = div_or_inf(gt, kappa_tilde(KappaSide::plus, gt, pe, alpha));
    if (gt > 0.5) row.d_minus = div_or_inf(gt, kappa_tilde(KappaSide::minus, gt, pe, alpha));

    const double gamma = gt * level;
    const double start = gamma + 10.0 * std::sqrt(gamma) + 10.0;
    // Lower tail: smallest integer k with P(K <= k - 1) >= pe/2, using the
    // continuous continuation of the CDF.
    const double xc = bisect_increasing([&](double x) { return poisson_cdf(x, gamma); }, half, start);
    const double k_minus = std::floor(xc) + 1.0;
    row.d_minus_exact = div_or_inf(gamma, k_minus + alpha) / level;
    // Upper tail: smallest integer k with P(K > k) <= pe/2.
    const double xp = bisect_increasing([&](double x) { return -poisson_sf(x, gamma); }, -half, start);
    const double k_plus = std::ceil(xp);
    row.d_plus_exact = div_or_inf(gamma, k_plus + alpha) / level;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Figure2Row> figure2_data(const std::vector<double>& pe_grid) {
  std::vector<Figure2Row> rows;
  rows.reserve(pe_grid.size());
  for (double pe : pe_grid) {
    const double iid = iid_converse_a(1, pe).a;
    rows.push_back({pe, b_upper(pe), markov_converse_a(1, pe).a / iid, markov_achievable_a(1, pe).a / iid});
  }
  return rows;
}

namespace {

void put_row(std::ostringstream& os, const std::string& kind, double a, double pe, std::uint64_t m, double alpha,
             double b) {
  os << kind << ',' << format_real(a) << ',' << format_real(pe) << ',' << m << ',' << format_real(alpha) << ','
     << format_real(b) << '\n';
}

void put_result(std::ostringstream& os, const std::string& prefix, const TailBoundResult& r) {
  put_row(os, prefix + (r.kind == BoundKind::converse ? "converse" : "achievable"), r.a, r.pe, r.m, r.alpha, r.b);
}

}  // namespace

std::string bounds_table_csv(std::uint64_t m, double pe, ModelClass cls) {
  std::ostringstream os;
  os << "kind,a_bits,pe,m,alpha,b_upper\n";
  if (cls == ModelClass::iid) {
    put_result(os, "", iid_converse_a(m, pe));
    put_result(os, "", iid_achievable_a(m, pe));
  } else {
    put_result(os, "", markov_converse_a(m, pe));
    put_result(os, "", markov_achievable_a(m, pe));
    const auto avg = markov_avg_bounds(m);
    put_row(os, "avg_converse", avg.converse, kNaN, m, kNaN, kNaN);
    put_row(os, "avg_achievable", avg.achievable, kNaN, m, kAlpha0, kNaN);
  }
  return os.str();
}

std::string figure1_csv(const std::vector<Figure1Row>& rows) {
  std::ostringstream os;
  os << "gamma_t,d_minus,d_plus,d_minus_exact,d_plus_exact\n";
  for (const auto& r : rows) {
    os << format_real(r.gamma_t) << ',' << format_real(r.d_minus) << ',' << format_real(r.d_plus) << ','
       << format_real(r.d_minus_exact) << ',' << format_real(r.d_plus_exact) << '\n';
  }
  return os.str();
}

std::string figure2_csv(const std::vector<Figure2Row>& rows) {
  std::ostringstream os;
  os << "pe,b_upper,markov_converse_gap,markov_achievable_gap\n";
  for (const auto& r : rows) {
    os << format_real(r.pe) << ',' << format_real(r.b) << ',' << format_real(r.markov_converse_gap) << ','
       << format_real(r.markov_achievable_gap) << '\n';
  }
  return os.str();
}

}  // namespace lsc
