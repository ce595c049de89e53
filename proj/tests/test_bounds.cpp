#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lsc/bounds.hpp"
#include "lsc/estimators.hpp"
#include "lsc/specfn.hpp"
#include "oracles.hpp"

#include <cmath>
#include <string>

using namespace lsc;

namespace {

double level_oracle(double pe) {
  const double z = oracle::upper_quantile(pe / 2);
  return z * z;
}

// Dense-grid maximization of the b(pe) objective with bisection roots.
double b_upper_oracle(double pe) {
  const double q2 = level_oracle(pe);
  const double alpha = q2 / 6 - 1;
  double best = 0.0;
  const int points = 100'000;
  for (int i = 1; i <= points; ++i) {
    const double g = 0.5 * std::pow(2000.0, double(i) / points);
    const double kappa = std::max(oracle::half_level_below(g) + (alpha - 1) / q2, alpha / q2);
    best = std::max(best, 2 * oracle::poisson_div(g, kappa));
  }
  // The floor alpha/Q^2 creates a corner where the lower root equals 1/Q^2;
  // the maximum can sit exactly there.
  const double corner = oracle::bisect([&](double g) { return oracle::half_level_below(g) - 1 / q2; }, 0.5, 1000.0);
  best = std::max(best, 2 * oracle::poisson_div(corner, alpha / q2));
  return std::max(best, 1.0);
}

}  // namespace

TEST_CASE("IID converse") {
  const double z = oracle::upper_quantile(0.025);
  const auto r = iid_converse_a(1000, 0.05);
  CHECK(r.a == doctest::Approx(z * z / (2000 * std::log(2.0))).epsilon(1e-12));
  CHECK(r.a == doctest::Approx(0.002771).epsilon(1e-4));
  CHECK(z * z == doctest::Approx(3.841459).epsilon(1e-6));
  CHECK(r.kind == BoundKind::converse);
  for (std::uint64_t m : {1u, 17u, 1000u}) {
    CHECK(iid_converse_a(2 * m, 0.01).a == iid_converse_a(m, 0.01).a / 2);
  }
  CHECK_THROWS(iid_converse_a(10, 0.5));
  CHECK_THROWS(iid_converse_a(0, 0.1));
}

TEST_CASE("kappa_tilde solves the half-level equation on both branches") {
  for (double pe : {1e-2, 1e-6, 1e-12}) {
    const double alpha = alpha_range(pe).lo;
    const double q2 = level_oracle(pe);
    for (double g = 1e-3; g < 1e3; g *= 1.07) {
      const double kp = kappa_tilde(KappaSide::plus, g, pe, alpha) - (alpha + 1) / q2;
      CHECK(std::fabs(poisson_div(kp, g) - 0.5) <= 1e-10);
      CHECK(kp > g);
      CHECK(kp == doctest::Approx(oracle::half_level_above(g)).epsilon(1e-8));
      if (g > 0.5) {
        const double km = kappa_tilde(KappaSide::minus, g, pe, alpha) - (alpha - 1) / q2;
        CHECK(std::fabs(poisson_div(km, g) - 0.5) <= 1e-10);
        CHECK(km < g);
        CHECK(km == doctest::Approx(oracle::half_level_below(g)).epsilon(1e-8).scale(1e-8));
      }
    }
  }
  const double alpha = alpha_range(1e-6).lo;
  const double v = kappa_tilde(KappaSide::minus, 10, 1e-6, alpha);
  CHECK(v == doctest::Approx(oracle::half_level_below(10) + (alpha - 1) / level_oracle(1e-6)).epsilon(1e-9));
  CHECK(v == doctest::Approx(7.09228309782).epsilon(1e-10));

  try {
    kappa_tilde(KappaSide::minus, 0.25, 1e-6, alpha);
    FAIL("expected a domain error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("0.25") != std::string::npos);
  }
}

TEST_CASE("b_upper") {
  double prev = INFINITY;
  for (double pe : {1e-2, 1e-3, 1e-4, 1e-6, 1e-9, 1e-12}) {
    const double b = b_upper(pe);
    CHECK(b >= 1.0);
    CHECK(b < prev);
    prev = b;
  }
  CHECK(b_upper(1e-12) < b_upper(1e-3));
  CHECK(b_upper(1e-12) < 1.03);
  CHECK(std::isinf(b_upper(0.05)));  // lower alpha endpoint is negative there
  CHECK(b_upper(1e-6) == doctest::Approx(b_upper_oracle(1e-6)).epsilon(1e-6));
  CHECK(b_upper(1e-3) == doctest::Approx(b_upper_oracle(1e-3)).epsilon(1e-6));
}

TEST_CASE("IID achievable") {
  for (double pe : {1e-2, 1e-4, 1e-8}) {
    const auto c = iid_converse_a(1000, pe);
    const auto a = iid_achievable_a(1000, pe);
    CHECK(a.a / c.a == doctest::Approx(b_upper(pe)).epsilon(1e-15));
    CHECK(a.b == b_upper(pe));
    CHECK(a.alpha == alpha_range(pe).lo);
    CHECK(a.a >= c.a);
    CHECK(iid_achievable_a(2000, pe).a < a.a);
  }
  CHECK(std::isinf(iid_achievable_a(1000, 0.05).a));
}

TEST_CASE("universal redundancy and training thresholds") {
  CHECK(universal_redundancy(1024, ModelClass::iid) == doctest::Approx(10.0 / 2048).epsilon(1e-15));
  CHECK(universal_redundancy(1024, ModelClass::markov) == 2 * universal_redundancy(1024, ModelClass::iid));
  CHECK(universal_redundancy(2, ModelClass::iid) == 0.25);
  CHECK_THROWS(universal_redundancy(1, ModelClass::iid));

  CHECK(training_threshold(1024, ThresholdMode::average, ModelClass::iid) == 148);
  CHECK(training_threshold(1024, ThresholdMode::average, ModelClass::iid) ==
        std::ceil(1024 / (std::log(2.0) * 10)));
  CHECK(training_threshold(1024, ThresholdMode::tail, ModelClass::iid, 0.05) == 284);
  CHECK(training_threshold(1024, ThresholdMode::tail, ModelClass::markov, 0.05) == 284);
  double prev = 1.0;
  for (std::uint64_t l = 16; l <= (1u << 24); l *= 4) {
    const double ratio = double(training_threshold(l, ThresholdMode::average, ModelClass::iid)) / l;
    CHECK(ratio < prev);
    prev = ratio;
  }
  const double l = 1 << 20;
  const double asym = level_oracle(0.05) / (2 * std::log(2.0)) * l / 20.0;
  CHECK(training_threshold(1u << 20, ThresholdMode::tail, ModelClass::iid, 0.05) / asym ==
        doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("Markov bounds") {
  CHECK(markov_error_level(0.01) / 2 == doctest::Approx((1 - std::sqrt(0.99)) / 2).epsilon(1e-12));
  CHECK(markov_error_level(0.01) / 2 == doctest::Approx(0.0025063).epsilon(1e-4));
  const auto c = markov_converse_a(1000, 0.05);
  CHECK(c.a == doctest::Approx(-2 * std::log(0.05) / (2000 * std::log(2.0))).epsilon(1e-12));
  CHECK(c.a == doctest::Approx(0.004322).epsilon(1e-3));
  for (std::uint64_t m : {100u, 10'000u}) {
    for (double pe : {1e-2, 1e-4, 1e-8}) {
      const auto a = markov_achievable_a(m, pe);
      CHECK(a.a > markov_converse_a(m, pe).a);
      CHECK(a.a == doctest::Approx(2 * iid_achievable_a(m, markov_error_level(pe)).a).epsilon(1e-15));
    }
  }
  const auto avg = markov_avg_bounds(10'000);
  CHECK(avg.achievable == doctest::Approx(2 * 0.50922 / (1e4 * std::log(2.0))).epsilon(1e-14));
  CHECK(avg.achievable == doctest::Approx(1.469298e-4).epsilon(1e-6));
  CHECK(avg.converse == doctest::Approx(1.44270e-4).epsilon(1e-5));
  CHECK(avg.achievable / avg.converse == doctest::Approx(1.01844).epsilon(1e-12));
  CHECK(markov_avg_bounds(20'000).converse == avg.converse / 2);
}

TEST_CASE("figure 1 curves") {
  const double pe = 1e-6;
  const double alpha = alpha_range(pe).lo;
  const double q2 = level_oracle(pe);
  const auto grid = log_grid(1e-2, 1e3, 3000);
  const auto rows = figure1_data(pe, alpha, grid);
  REQUIRE(rows.size() == grid.size());
  double max_minus = 0.0;
  for (const auto& r : rows) {
    CHECK(r.d_plus <= 0.5 + 1e-9);
    if (r.gamma_t > 0.5) {
      max_minus = std::max(max_minus, r.d_minus);
    } else {
      CHECK(std::isnan(r.d_minus));
    }
    if (r.gamma_t > 40) continue;
    // exact curves against partial-sum quantiles
    const long double gamma = r.gamma_t * q2;
    long double term = std::exp(-gamma), cdf = term;
    int k_minus = 0;
    while (cdf <= pe / 2) {
      term *= gamma / ++k_minus;
      cdf += term;
    }
    int k_plus = k_minus;
    while (1.0L - cdf > pe / 2) {
      term *= gamma / ++k_plus;
      cdf += term;
    }
    const double g = static_cast<double>(gamma);
    CHECK(r.d_minus_exact == doctest::Approx(oracle::poisson_div(g, k_minus + alpha) / q2).epsilon(1e-9));
    CHECK(r.d_plus_exact == doctest::Approx(oracle::poisson_div(g, k_plus + alpha) / q2).epsilon(1e-9));
    // the bound caps the exact curve wherever the quantile lies below gamma
    if (r.gamma_t > 0.5 && k_minus + alpha <= g) CHECK(r.d_minus_exact <= r.d_minus + 1e-12);
  }
  CHECK(rows.back().d_plus == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(rows.back().d_plus > rows[rows.size() / 2].d_plus);
  CHECK(2 * max_minus == doctest::Approx(b_upper(pe)).epsilon(1e-6));
}

TEST_CASE("figure 2 and CSV tables") {
  const auto rows = figure2_data(log_grid(1e-12, 1e-2, 11));
  for (const auto& r : rows) {
    CHECK(r.b >= 1.0);
    CHECK(r.markov_achievable_gap > r.markov_converse_gap);
  }
  const auto csv = bounds_table_csv(1000, 0.05, ModelClass::iid);
  CHECK(csv.rfind("kind,a_bits,pe,m,alpha,b_upper\n", 0) == 0);
  CHECK(csv.find("converse,0.0027710267952,0.05,1000,nan,nan") != std::string::npos);
  CHECK(csv.find("achievable,inf") != std::string::npos);
  const auto markov = bounds_table_csv(10'000, 0.01, ModelClass::markov);
  CHECK(markov.find("avg_achievable,0.000146929833744") != std::string::npos);
  CHECK(figure1_csv({}).rfind("gamma_t,", 0) == 0);
}
