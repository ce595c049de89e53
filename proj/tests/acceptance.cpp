// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "lsc/bounds.hpp"
#include "lsc/coders.hpp"
#include "lsc/estimators.hpp"
#include "lsc/experiments.hpp"
#include "lsc/models.hpp"
#include "lsc/rng.hpp"
#include "lsc/specfn.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace lsc;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome crit1() {
  const auto p_grid = log_grid(1e-3, 0.5, 20);
  const std::vector<EstimatorSpec> specs = {EstimatorSpec::mle(), EstimatorSpec::add_alpha(kAlpha0),
                                            EstimatorSpec::add_beta(0.05)};
  std::size_t event_mismatch = 0;
  double worst = 0.0;
  for (int m : {1, 5, 10, 14}) {
    for (const auto& spec : specs) {
      for (double p : p_grid) {
        for (double a : {0.005, 0.05, 0.3}) {
          const auto flags = exceedance_set(m, p, a, spec);
          long double mass = 0.0L;
          oracle::for_each_sequence(m, [&](const std::vector<std::uint8_t>& x) {
            std::uint64_t k = 0;
            for (auto b : x) k += b;
            double phat = 0.0;
            if (spec.kind == EstimatorSpec::Kind::mle) {
              phat = double(k) / m;
            } else {
              const double al = spec.kind == EstimatorSpec::Kind::add_alpha ? spec.param : spec.param * m;
              phat = (k + al) / (m + 2 * al);
            }
            const bool hit = oracle::kl_bits(p, phat) > a;
            if (hit != bool(flags[k])) ++event_mismatch;
            if (hit) mass += std::pow((long double)p, (long double)k) * std::pow(1.0L - p, (long double)(m - k));
          });
          worst = std::max(worst, std::fabs(exact_tail_iid(m, p, a, spec).value - double(mass)));
        }
      }
    }
  }
  // Monte Carlo at m = 100 against the exact tail.
  SweepConfig cfg;
  cfg.p_grid = {0.003, 0.03, 0.2, 0.5};
  cfg.m = 100;
  cfg.a = 0.01;
  cfg.trials = 100'000;
  double worst_z = 0.0;
  bool mc_ok = true;
  for (const auto& spec : specs) {
    cfg.spec = spec;
    cfg.seed = 1000 + static_cast<std::uint64_t>(spec.kind);
    const auto mc = mc_tail_iid(cfg);
    for (std::size_t i = 0; i < cfg.p_grid.size(); ++i) {
      const double ex = exact_tail_iid(cfg.m, cfg.p_grid[i], cfg.a, spec).value;
      const double sigma = std::sqrt(ex * (1 - ex) / cfg.trials);
      const double diff = std::fabs(mc.points[i].value - ex);
      if (sigma > 0) worst_z = std::max(worst_z, diff / sigma);
      if (diff > 4 * sigma) mc_ok = false;
    }
  }
  const bool ok = event_mismatch == 0 && worst <= 1e-12 && mc_ok;
  return {ok, fmt("event mismatches %.0f, max |exact-enum| %.2e, MC max |z| %.2f", double(event_mismatch), worst,
                  worst_z)};
}

Outcome crit2() {
  const std::uint64_t m = 100;
  const auto mle = EstimatorSpec::mle();
  const double at = exact_tail_iid(m, 1e-3, 1.0, mle).value;
  const double floor = std::pow(1 - 1e-3, 100);
  // walk down the grid below 1e-3
  auto grid = default_p_grid(m);
  std::vector<double> below;
  for (double p : grid)
    if (p <= 1e-3) below.push_back(p);
  std::sort(below.rbegin(), below.rend());
  bool monotone = true;
  double prev = at, last = at;
  for (double p : below) {
    last = exact_tail_iid(m, p, 1.0, mle).value;
    if (last < prev) monotone = false;
    prev = last;
  }
  const double smallest = exact_tail_iid(m, 1e-7, 1.0, mle).value;
  const bool ok = at >= floor * (1 - 1e-12) && monotone && smallest > 1 - 1e-4;
  return {ok, fmt("E(100,1) at p=1e-3: %.6f >= %.6f, at p=1e-7: %.8f", at, floor, smallest)};
}

Outcome crit3() {
  const std::uint64_t m = 1000;
  const auto sweep = exact_avg_sweep(m, default_p_grid(m), EstimatorSpec::add_alpha(kAlpha0));
  const double v = m * sweep.sup().value;
  const double lo = 1 / (2 * std::log(2.0)) - 0.05, hi = kAlpha0 / std::log(2.0) + 0.05;
  return {v >= lo && v <= hi, fmt("m*sup E[D] = %.4f in [%.3f, %.3f]", v, lo, hi)};
}

Outcome crit4() {
  const std::uint64_t m = 10'000;
  const double pe = 1e-2;
  const auto ach = iid_achievable_a(m, pe);
  SweepConfig cfg;
  cfg.p_grid = default_p_grid(m);
  cfg.m = m;
  cfg.spec = EstimatorSpec::add_alpha(ach.alpha);
  cfg.a = ach.a;
  const double at_ach = exact_tail_sweep(cfg).sup().value;
  cfg.a = 0.5 * iid_converse_a(m, pe).a;
  const double at_half = exact_tail_sweep(cfg).sup().value;
  const bool ok = at_ach <= 1.25 * pe && at_half > pe;
  return {ok, fmt("sup tail at achievable a: %.5f <= %.4f; at converse/2: %.5f > %.2f", at_ach, 1.25 * pe, at_half,
                  pe)};
}

Outcome crit5() {
  const std::vector<double> pes = {1e-2, 1e-4, 1e-6, 1e-9, 1e-12};
  bool ok = true;
  double prev = INFINITY;
  std::string values;
  for (double pe : pes) {
    const double b = b_upper(pe);
    if (!(b >= 1.0) || !(b < prev)) ok = false;
    prev = b;
    values += fmt("%.4f ", b);
  }
  const auto rows = figure1_data(1e-6, alpha_range(1e-6).lo, log_grid(1e-3, 1e7, 2000));
  double max_plus = 0.0;
  for (const auto& r : rows) max_plus = std::max(max_plus, r.d_plus);
  const double tail = rows.back().d_plus;
  ok = ok && max_plus <= 0.5 + 1e-9 && std::fabs(tail - 0.5) < 1e-3;
  return {ok, "b_upper " + values + fmt("-> 1; max d_plus %.10f, d_plus(1e7) %.6f", max_plus, tail)};
}

Outcome crit6() {
  const auto gammas = log_grid(1e-2, 1e2, 100);
  std::size_t violations = 0, checks = 0;
  for (int k = 0; k <= 50; ++k) {
    for (double g : gammas) {
      const double zl = std::copysign(std::sqrt(2.0 * poisson_div(k, g)), k - g);
      const double zh = std::copysign(std::sqrt(2.0 * poisson_div(k + 1, g)), k + 1 - g);
      const double cdf = poisson_cdf(k, g);
      bool strict;
      if (cdf < 0.5) {
        const double lo = normal_cdf(zl), hi = normal_cdf(zh);
        strict = lo < cdf * (1 - 1e-12) && cdf < hi * (1 - 1e-12);
      } else {
        // complementary form keeps the resolution once the cdf is near one
        const double sf = poisson_sf(k, g);
        const double lo = q_function(zh), hi = q_function(zl);
        strict = lo < sf * (1 - 1e-12) && sf < hi * (1 - 1e-12);
      }
      ++checks;
      if (!strict) ++violations;
    }
  }
  return {violations == 0, fmt("%.0f of %.0f (k, gamma) pairs violate strict sandwich", double(violations),
                               double(checks))};
}

Outcome crit7() {
  MarkovConfig cfg;
  const std::vector<double> axis = {0.05, 0.3, 0.5, 0.7, 0.95};
  for (double a : axis)
    for (double b : axis) cfg.grid.emplace_back(a, b);
  cfg.n = 100;
  cfg.l = 100;
  cfg.genie = true;
  cfg.trials = 10'000;
  cfg.seed = 7;
  const double bound = p_e2_hoeffding(cfg.n, default_genie_eps(cfg.n));
  const double sigma = std::sqrt(bound * (1 - bound) / cfg.trials);
  double worst = 0.0;
  for (const auto& p : mc_markov(cfg)) worst = std::max(worst, p.invalid_rate.value);
  return {worst <= bound + 4 * sigma, fmt("max P(E2) %.2e <= %.2e + 4 sigma (%.2e)", worst, bound, 4 * sigma)};
}

Outcome crit8() {
  MarkovConfig cfg;
  cfg.grid = {{0.98, 0.98}};
  cfg.n = 1;
  cfg.l = 100;
  cfg.spec = EstimatorSpec::add_alpha(0.5);
  cfg.a = 0.5 * (1 - binary_entropy(0.02));
  cfg.trials = 20'000;
  cfg.seed = 8;
  const double frac = mc_markov(cfg)[0].tail.value;
  const double target = std::pow(0.98, 99);
  const double sigma = std::sqrt(target * (1 - target) / cfg.trials);
  return {frac >= target - 4 * sigma, fmt("fraction above threshold %.4f >= %.4f - 4 sigma", frac, target)};
}

Outcome crit9() {
  MarkovConfig cfg;
  const std::vector<double> axis = {1e-4, 3e-4, 1e-3, 3e-3, 0.01, 0.1, 0.5};
  for (double a : axis)
    for (double b : axis) cfg.grid.emplace_back(a, b);
  cfg.n = 100;
  cfg.l = 100;
  cfg.genie = true;
  cfg.eps = 0.0;
  cfg.trials = 2000;
  cfg.seed = 9;
  double sup = 0.0;
  for (const auto& p : mc_markov(cfg)) sup = std::max(sup, p.redundancy.value);
  const double v = 1e4 * sup;
  const double lo = 1 / std::log(2.0) * 0.85, hi = 2 * kAlpha0 / std::log(2.0) * 1.15;
  // for reference only: the default slack n^(-1/3) discards about 40% of the data at n = 100
  cfg.eps = -1.0;
  cfg.trials = 300;
  double sup_default = 0.0;
  for (const auto& p : mc_markov(cfg)) sup_default = std::max(sup_default, p.redundancy.value);
  return {v >= lo && v <= hi, fmt("eps=0: m*sup E[redundancy] = %.4f in [%.3f, %.3f] (default eps gives %.2f)", v, lo,
                                  hi, 1e4 * sup_default)};
}

Outcome crit10() {
  bool ok = true;
  std::string detail;
  for (double p : {0.1, 0.3, 0.5}) {
    BeatConfig cfg;
    cfg.l = 4096;
    cfg.p = p;
    cfg.seed = 10;
    const auto rep = beat_universal_experiment(cfg);
    if (rep.win_fraction < 0.95) ok = false;
    detail += fmt("p=%.1f win %.3f; ", p, rep.win_fraction);
    if (p == 0.5) detail += fmt("m=%.0f", double(rep.m));
  }
  return {ok, detail};
}

Outcome crit11() {
  Rng rng = make_stream(11, {});
  std::size_t bad_roundtrip = 0, bad_length = 0;
  double worst = -INFINITY;
  for (int c = 0; c < 10'000; ++c) {
    const auto cls = static_cast<StreamClass>(rng() % 4);
    const std::size_t len = rng() % 3 == 0 ? rng() % 16 : rng() % 3000;
    const auto param = [&] {
      const double u = uniform01(rng);
      return rng() % 5 == 0 ? std::exp(-12.0 * u) * (rng() % 2 ? 1.0 : -1.0) + (rng() % 2 ? 0.0 : 1.0)
                            : 0.01 + 0.98 * u;
    };
    double s0 = std::clamp(param(), 1e-6, 1 - 1e-6), s1 = std::clamp(param(), 1e-6, 1 - 1e-6);
    BitSequence x;
    if (cls == StreamClass::frozen_markov || cls == StreamClass::kt_markov) {
      x.resize(len);
      if (len) sample_markov_path(MarkovModel(s0, s1), stationary(MarkovModel(s0, s1)), rng, x);
    } else {
      sample_iid_into(BernoulliModel(s0), len, rng, x);
    }
    CoderModel model;
    switch (cls) {
      case StreamClass::frozen_iid:
        model = CoderModel::frozen(FrozenModel::iid(std::clamp(s0 + 0.1 * (uniform01(rng) - 0.5), 1e-6, 1 - 1e-6)));
        break;
      case StreamClass::frozen_markov:
        model = CoderModel::frozen(FrozenModel::markov(s0, s1));
        break;
      case StreamClass::kt_iid:
        model = CoderModel::kt(ModelClass::iid);
        break;
      case StreamClass::kt_markov:
        model = CoderModel::kt(ModelClass::markov);
        break;
    }
    const auto cs = arith_encode(model, x);
    const auto bytes = cs.serialize();
    if (arith_decode(bytes) != x) ++bad_roundtrip;
    const double ideal = ideal_codelength(model, x);
    const std::size_t header = 6 + 8 * (cls == StreamClass::frozen_iid ? 1 : cls == StreamClass::frozen_markov ? 2 : 0) + 8 + 4;
    const double excess = double(cs.payload_bits) - ideal;
    worst = std::max(worst, excess);
    if (excess > 2.0 || bytes.size() != header + (cs.payload_bits + 7) / 8) ++bad_length;
  }
  return {bad_roundtrip == 0 && bad_length == 0,
          fmt("roundtrip failures %.0f, length violations %.0f, max payload - ideal %.4f bits", double(bad_roundtrip),
              double(bad_length), worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 oracle equivalence", crit1},      {"2 MLE tail never vanishes", crit2},
      {"3 average redundancy band", crit3},  {"4 tail bounds at m=1e4", crit4},
      {"5 b_upper and kappa+ curve", crit5}, {"6 Poisson cdf sandwich", crit6},
      {"7 genie Hoeffding bound", crit7},    {"8 single-sequence training", crit8},
      {"9 Markov average band", crit9},      {"10 beat the universal coder", crit10},
      {"11 compression plumbing", crit11},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
