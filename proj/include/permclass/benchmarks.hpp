#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "permclass/kernel.hpp"

namespace permclass {

// ---- timing ---------------------------------------------------------------

struct BenchConfig {
  std::vector<std::size_t> sizes{100, 200, 400, 800};
  std::vector<int> orders{1, 2, 3};
  Kernel kernel = Kernel::gaussian(1.0);
  double alpha = 1.0;
  std::uint64_t seed = 0;
  std::size_t queries = 20;
  /// Each query is repeated until one measurement lasts at least this long.
  double min_sample_seconds = 2e-3;
};

struct BenchRow {
  std::size_t n = 0;
  int order = 0;
  double median_query_seconds = 0.0;
  double table_seconds = 0.0;
  std::size_t repeats = 0;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchRow> rows;
  /// Least-squares slope of log(time) on log(n), one per entry of config.orders.
  std::vector<double> slopes;
};

/// Per-query timing of ratio_approx on triangular training points over
/// (-pi, pi). Tables are built once per (n, order) and timed separately.
/// Runs on the calling thread only.
BenchReport bench_orders(const BenchConfig& config);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

nlohmann::json to_json(const BenchReport& report);
std::string bench_csv(const BenchReport& report);

// ---- accuracy -------------------------------------------------------------

struct AccuracyConfig {
  std::size_t n = 100;
  double tau = 1.0;
  double alpha = 1.0;
  std::size_t grid_points = 201;
  /// The central peak is |t| <= peak_halfwidth.
  double peak_halfwidth = 0.5;
  /// Size of the random subsample compared against exact enumeration.
  std::size_t exact_subsample = 10;
  std::size_t exact_queries = 5;
  /// Centres of the second class, each on an interval of halfwidth pi.
  double separated_center = 6.283185307179586;
  double overlapped_center = 4.71238898038469;
  std::size_t probability_grid_points = 201;
  std::uint64_t seed = 20100301;
};

struct ExactComparison {
  std::vector<double> t;
  std::vector<double> exact;
  /// approx[k-1][i] for orders k = 1..3.
  std::vector<std::vector<double>> approx;
  /// Mean relative error per order 1..3.
  std::vector<double> mean_relative_error;
};

struct ProbabilityCurves {
  double class2_center = 0.0;
  std::vector<double> t;
  /// p1[k-1][i] = P(class 1 | t_i) under order k = 1..3.
  std::vector<std::vector<double>> p1;
  /// Largest |p1 difference| between any two orders.
  double max_abs_difference = 0.0;
};

struct AccuracyReport {
  AccuracyConfig config;
  std::vector<double> x;
  std::vector<double> t;
  /// ratio[k-1][i] = R^(k)(t_i; x) for k = 1..3.
  std::vector<std::vector<double>> ratio;
  /// Central-peak means of R3/R2 and R2/R1.
  double peak_ratio_32 = 0.0;
  double peak_ratio_21 = 0.0;
  /// Grid means of |R3 - R2| / R2 and |R2 - R1| / R1.
  double gap_32 = 0.0;
  double gap_21 = 0.0;
  ExactComparison exact;
  ProbabilityCurves separated;
  ProbabilityCurves overlapped;
  double seconds = 0.0;
};

/// Ratio curves for a triangular sample on (-pi, pi) with a Gaussian
/// kernel, their central-peak gaps, an exact check on a subsample, and
/// two-class probability curves for a separated and an overlapped class 2.
AccuracyReport accuracy_study(const AccuracyConfig& config);

nlohmann::json to_json(const AccuracyConfig& config);
nlohmann::json to_json(const AccuracyReport& report);
std::string ratio_curves_csv(const AccuracyReport& report);
std::string probability_curves_csv(const ProbabilityCurves& curves);

}  // namespace permclass
