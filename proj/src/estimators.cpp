#include "lsc/estimators.hpp"

#include "lsc/specfn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lsc {

EstimatorSpec EstimatorSpec::add_alpha(double alpha) {
  if (!(alpha >= 0.0) || std::isinf(alpha)) throw std::invalid_argument("alpha must be >= 0");
  return {Kind::add_alpha, alpha};
}

EstimatorSpec EstimatorSpec::add_beta(double beta) {
  if (!(beta >= 0.0) || std::isinf(beta)) throw std::invalid_argument("beta must be >= 0");
  return {Kind::add_beta, beta};
}

EstimatorSpec EstimatorSpec::parse(const std::string& text) {
  if (text == "mle") return mle();
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("unknown estimator: " + text);
  const auto name = text.substr(0, colon);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text.substr(colon + 1), &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad estimator parameter: " + text);
  }
  if (used != text.size() - colon - 1) throw std::invalid_argument("bad estimator parameter: " + text);
  if (name == "add_alpha") return add_alpha(value);
  if (name == "add_beta") return add_beta(value);
  throw std::invalid_argument("unknown estimator: " + text);
}

std::string EstimatorSpec::to_string() const {
  char buf[64];
  switch (kind) {
    case Kind::mle:
      return "mle";
    case Kind::add_alpha:
      std::snprintf(buf, sizeof buf, "add_alpha:%.17g", param);
      return buf;
    case Kind::add_beta:
      std::snprintf(buf, sizeof buf, "add_beta:%.17g", param);
      return buf;
  }
  return "mle";
}

double estimate(CountStatistic stat, const EstimatorSpec& spec) {
  if (stat.k > stat.m) throw std::invalid_argument("estimate: k exceeds m");
  const double k = static_cast<double>(stat.k);
  const double m = static_cast<double>(stat.m);
  double num = k;
  double den = m;
  switch (spec.kind) {
    case EstimatorSpec::Kind::mle:
      break;
    case EstimatorSpec::Kind::add_alpha:
      num = k + spec.param;
      den = m + 2.0 * spec.param;
      break;
    case EstimatorSpec::Kind::add_beta:
      num = k + spec.param * m;
      den = m + 2.0 * spec.param * m;
      break;
  }
  if (den == 0.0) throw std::domain_error("estimate: no observations for " + spec.to_string());
  return num / den;
}

double estimate_or_half(CountStatistic stat, const EstimatorSpec& spec) {
  if (stat.m == 0 && !(spec.kind == EstimatorSpec::Kind::add_alpha && spec.param > 0.0)) return 0.5;
  return estimate(stat, spec);
}

AlphaRange alpha_range(double pe) {
  if (!(pe > 0.0 && pe < 1.0)) throw std::domain_error("alpha_range: pe must lie in (0, 1)");
  const double z = q_inv(pe / 2.0);
  const double center = z * z / 6.0;
  return {center - 1.0, center + 1.0};
}

MarkovCounts markov_counts(const TrainingSet& ts) {
  if (ts.l() < 2) throw std::invalid_argument("markov_counts: sequences need length >= 2");
  MarkovCounts c;
  CountStatistic* per_state[2] = {&c.state0, &c.state1};
  for (std::size_t i = 0; i < ts.n(); ++i) {
    auto seq = ts.sequence(i);
    for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
      auto& s = *per_state[seq[t]];
      ++s.m;
      if (seq[t + 1] == seq[t]) ++s.k;
    }
  }
  return c;
}

GenieResult genie_inhibit(const TrainingSet& ts, std::uint64_t m0, std::uint64_t m1,
                          const MarkovModel& model, std::uint64_t seed) {
  const std::uint64_t transitions = ts.l() == 0 ? 0 : ts.m() - ts.n();
  if (m0 + m1 > transitions) throw std::invalid_argument("genie_inhibit: budget exceeds m - n");
  const std::uint64_t budget[2] = {m0, m1};
  CountStatistic counts[2];
  for (std::size_t i = 0; i < ts.n(); ++i) {
    auto seq = ts.sequence(i);
    for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
      auto& c = counts[seq[t]];
      if (c.m == budget[seq[t]]) continue;
      ++c.m;
      if (seq[t + 1] == seq[t]) ++c.k;
    }
  }
  GenieResult r;
  for (int s = 0; s < 2; ++s) {
    if (counts[s].m == budget[s]) continue;
    r.invalid = true;
    // Each further visit to state s is an independent stay/leave trial.
    auto rng = make_stream(seed, {0x6E1Eull, static_cast<std::uint64_t>(s)});
    const double stay = s ? model.p1 : model.p0;
    while (counts[s].m < budget[s]) {
      ++counts[s].m;
      if (bernoulli(rng, stay)) ++counts[s].k;
    }
  }
  r.counts0 = counts[0];
  r.counts1 = counts[1];
  return r;
}

GenieBudget genie_budget(const MarkovModel& model, std::size_t n, std::size_t l, double eps) {
  const auto pi = stationary(model);
  const double transitions = l == 0 ? 0.0 : static_cast<double>(n) * static_cast<double>(l - 1);
  auto one = [&](double p) {
    const double v = std::floor((p - eps) * transitions);
    return v > 0.0 ? static_cast<std::uint64_t>(v) : std::uint64_t{0};
  };
  return {one(pi.pi0), one(pi.pi1)};
}

double default_genie_eps(std::size_t n) {
  if (n == 0) throw std::invalid_argument("default_genie_eps: n must be positive");
  return std::cbrt(1.0 / static_cast<double>(n));
}

double p_e2_hoeffding(std::size_t n, double eps) {
  if (n == 0 || !(eps > 0.0)) throw std::invalid_argument("p_e2_hoeffding: need n >= 1, eps > 0");
  return std::min(1.0, 2.0 * std::exp(-2.0 * static_cast<double>(n) * eps * eps));
}

}  // namespace lsc
