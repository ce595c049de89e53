#pragma once

#include "lsc/bounds.hpp"
#include "lsc/estimators.hpp"
#include "lsc/models.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lsc {

enum class EstimateMethod { exact, montecarlo };

/// Estimated probability P(D(p||phat) > a).
struct TailEstimate {
  double value = 0.0;
  double ci_halfwidth = 0.0;  // 95% normal approximation; 0 for exact values
  std::uint64_t trials = 0;
  EstimateMethod method = EstimateMethod::exact;
};

/// Estimated mean of a redundancy, in bits per symbol.
struct MeanEstimate {
  double value = 0.0;
  double ci_halfwidth = 0.0;
  std::uint64_t trials = 0;
  EstimateMethod method = EstimateMethod::exact;
};

/// Worker count: LSC_THREADS if set, otherwise the hardware concurrency.
std::size_t worker_count();
/// Runs fn(0..count-1) on the worker pool. Callers write results by index,
/// so output never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Exact summation limit for the binomial oracles.
inline constexpr std::uint64_t kExactBudget = 1'000'000;

/// Per-k flag: does an estimate from k ones out of m exceed redundancy a?
std::vector<std::uint8_t> exceedance_set(std::uint64_t m, double p, double a, const EstimatorSpec& spec);
TailEstimate exact_tail_iid(std::uint64_t m, double p, double a, const EstimatorSpec& spec);
/// E[D(p||phat)] by summation over the binomial count.
double exact_avg_redundancy_iid(std::uint64_t m, double p, const EstimatorSpec& spec);

/// Geometric grid from 1/(10m) to 1/2 plus the Poisson-regime points gamma/m.
std::vector<double> default_p_grid(std::uint64_t m);

struct SweepConfig {
  std::vector<double> p_grid;
  std::uint64_t m = 0;
  EstimatorSpec spec;
  double a = 0.0;
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 0;
};

struct TailSweep {
  std::vector<TailEstimate> points;  // aligned with the p grid
  std::size_t argmax = 0;
  TailEstimate sup() const { return points.at(argmax); }
};

TailSweep exact_tail_sweep(const SweepConfig& cfg);
TailSweep mc_tail_iid(const SweepConfig& cfg);

struct MeanSweep {
  std::vector<MeanEstimate> points;
  std::size_t argmax = 0;
  MeanEstimate sup() const { return points.at(argmax); }
};

/// Exact summation when m <= 20, Monte Carlo otherwise.
MeanSweep mc_avg_redundancy_iid(std::uint64_t m, const std::vector<double>& p_grid, const EstimatorSpec& spec,
                                std::uint64_t trials, std::uint64_t seed);
MeanSweep exact_avg_sweep(std::uint64_t m, const std::vector<double>& p_grid, const EstimatorSpec& spec);

struct MarkovConfig {
  std::vector<std::pair<double, double>> grid;  // (p0, p1) self-transition pairs
  std::size_t n = 1;
  std::size_t l = 2;
  EstimatorSpec spec = EstimatorSpec::add_alpha(kAlpha0);
  bool genie = false;
  double eps = -1.0;  // genie slack; negative selects default_genie_eps(n)
  double a = 0.0;     // tail threshold in bits per symbol
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
};

struct MarkovPoint {
  double p0;
  double p1;
  MeanEstimate redundancy;
  TailEstimate tail;          // P(redundancy > a)
  TailEstimate invalid_rate;  // genie mode only
};

std::vector<MarkovPoint> mc_markov(const MarkovConfig& cfg);

struct BeatConfig {
  std::uint64_t l = 4096;
  ModelClass cls = ModelClass::iid;
  double p = 0.5;                // IID source
  double p0 = 0.5, p1 = 0.5;     // Markov source
  ThresholdMode mode = ThresholdMode::average;
  double pe = 0.05;              // tail mode level
  std::uint64_t replicates = 200;
  std::uint64_t trials = 100;    // paired trainings and tests per replicate
  double safety = 2.0;           // training size multiplier over the threshold
  std::uint64_t seed = 0;
};

struct BeatReport {
  std::uint64_t l = 0;
  std::uint64_t m = 0;
  std::vector<double> learned;    // per-replicate per-symbol excess
  std::vector<double> universal;
  double learned_mean = 0.0;
  double universal_mean = 0.0;
  double diff_se = 0.0;           // standard error of universal - learned
  double win_fraction = 0.0;      // replicates where learned < universal
  std::string winner;             // "learned", "universal" or "inconclusive"
};

BeatReport beat_universal_experiment(const BeatConfig& cfg);

// Plain-text experiment configs: one key=value per line, '#' comments.
using Config = std::map<std::string, std::string>;
Config parse_config(std::string_view text);
/// FNV-1a over the canonical (sorted) key=value listing, as 16 hex digits.
std::string config_hash(const Config& cfg);

struct ResultRow {
  bool operator==(const ResultRow&) const = default;
  std::string metric;
  double value;
  double ci;
  std::uint64_t trials;
};

std::vector<ResultRow> run_simulation(const Config& cfg, std::uint64_t seed);
inline constexpr std::string_view kResultsHeader = "config_hash,metric,value,ci,trials,seed\n";
std::string results_csv(const std::string& hash, const std::vector<ResultRow>& rows, std::uint64_t seed);

}  // namespace lsc
