#pragma once

#include "lsc/models.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lsc {

enum class BoundKind { converse, achievable };

struct TailBoundResult {
  double a = 0.0;  // bits per symbol
  BoundKind kind = BoundKind::converse;
  double pe = 0.0;
  std::uint64_t m = 0;
  double alpha = 0.0;  // NaN when the bound uses no estimator constant
  double b = 0.0;      // NaN for converse bounds
};

/// Q^{-1}(pe/2)^2, the squared two-sided Gaussian quantile.
double gaussian_level(double pe);

TailBoundResult iid_converse_a(std::uint64_t m, double pe);

enum class KappaSide { minus, plus };

/// Normalized Poisson quantile bound kappa~ at gamma~; alpha is the
/// additive estimator constant. The minus side exists only for gamma~ > 1/2.
double kappa_tilde(KappaSide side, double gamma_t, double pe, double alpha);

struct GammaGrid {
  double lo = 1e-3;
  double hi = 1e3;
  std::size_t points = 2048;
};

/// Upper bound on b(pe) with alpha at the lower end of alpha_range(pe).
/// +inf when that alpha is not positive.
double b_upper(double pe, const GammaGrid& grid = {});

TailBoundResult iid_achievable_a(std::uint64_t m, double pe);

/// log2(l)/(2l) for IID sources, log2(l)/l for Markov sources.
double universal_redundancy(std::uint64_t l, ModelClass cls);

enum class ThresholdMode { average, tail };
/// Training size needed for a frozen coder to match the universal coder.
/// `pe` is used by the tail mode only.
std::uint64_t training_threshold(std::uint64_t l, ThresholdMode mode, ModelClass cls, double pe = 0.0);

/// 1 - sqrt(1 - pe): the per-state error level used by the Markov bound.
double markov_error_level(double pe);
TailBoundResult markov_achievable_a(std::uint64_t m, double pe);
TailBoundResult markov_converse_a(std::uint64_t m, double pe);

struct AvgBounds {
  double achievable;
  double converse;
};
AvgBounds markov_avg_bounds(std::uint64_t m);

std::vector<double> log_grid(double lo, double hi, std::size_t points);

struct Figure1Row {
  double gamma_t;
  double d_minus;        // Lambert-W bound, NaN where gamma~ <= 1/2
  double d_plus;         // Lambert-W bound
  double d_minus_exact;  // from Poisson inversion
  double d_plus_exact;
};
std::vector<Figure1Row> figure1_data(double pe, double alpha, const std::vector<double>& gamma_grid);

struct Figure2Row {
  double pe;
  double b;                     // b_upper(pe)
  double markov_converse_gap;   // markov converse / iid converse
  double markov_achievable_gap; // markov achievable / iid converse
};
std::vector<Figure2Row> figure2_data(const std::vector<double>& pe_grid);

// CSV tables: header row, 12 significant digits.
std::string bounds_table_csv(std::uint64_t m, double pe, ModelClass cls);
std::string figure1_csv(const std::vector<Figure1Row>& rows);
std::string figure2_csv(const std::vector<Figure2Row>& rows);

}  // namespace lsc
