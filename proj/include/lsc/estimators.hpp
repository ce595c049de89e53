#pragma once

#include "lsc/models.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lsc {

/// Maps a count statistic to a frozen probability.
struct EstimatorSpec {
  enum class Kind { mle, add_alpha, add_beta };
  Kind kind = Kind::mle;
  double param = 0.0;  // alpha or beta

  static EstimatorSpec mle() { return {Kind::mle, 0.0}; }
  static EstimatorSpec add_alpha(double alpha);
  static EstimatorSpec add_beta(double beta);

  /// "mle", "add_alpha:<a>" or "add_beta:<b>".
  static EstimatorSpec parse(const std::string& text);
  std::string to_string() const;
};

/// k successes (ones, or self-transitions) out of m observations.
struct CountStatistic {
  std::uint64_t k = 0;
  std::uint64_t m = 0;
};

/// Approximate minimax-average constant for the add-alpha estimator.
inline constexpr double kAlpha0 = 0.50922;

double estimate(CountStatistic stat, const EstimatorSpec& spec);
/// Same as estimate() but falls back to 1/2 when the spec is undefined on
/// the statistic (no observations).
double estimate_or_half(CountStatistic stat, const EstimatorSpec& spec);

struct AlphaRange {
  double lo;
  double hi;
};
/// Q^{-1}(pe/2)^2 / 6 -/+ 1.
AlphaRange alpha_range(double pe);

struct MarkovCounts {
  CountStatistic state0;
  CountStatistic state1;
};

/// Per-state visits (excluding each sequence's last symbol) and stays.
MarkovCounts markov_counts(const TrainingSet& ts);

struct GenieResult {
  CountStatistic counts0;
  CountStatistic counts1;
  bool invalid = false;
};

/// Truncates each state's visits to the first m_i (in sequence order) and
/// tops up with synthetic transitions from `model` when a state falls short,
/// flagging the training set invalid in that case.
GenieResult genie_inhibit(const TrainingSet& ts, std::uint64_t m0, std::uint64_t m1,
                          const MarkovModel& model, std::uint64_t seed);

struct GenieBudget {
  std::uint64_t m0;
  std::uint64_t m1;
};
/// m_i = floor((pi_i - eps) * (m - n)), clamped at zero.
GenieBudget genie_budget(const MarkovModel& model, std::size_t n, std::size_t l, double eps);
/// Default slack eps = n^(-1/3).
double default_genie_eps(std::size_t n);

/// Hoeffding bound min(1, 2 exp(-2 n eps^2)) on the invalid-set probability.
double p_e2_hoeffding(std::size_t n, double eps);

}  // namespace lsc
