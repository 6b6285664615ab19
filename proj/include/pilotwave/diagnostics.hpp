#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pilotwave/classical.hpp"
#include "pilotwave/errors.hpp"

namespace pilotwave {

/// Refinement ladder for quadratic-variation estimates. Dyadic doubles the
/// interval count per level; Uniform grows it arithmetically.
struct PartitionSpec {
  enum class Mode { Uniform, Dyadic };
  Mode mode = Mode::Dyadic;
  int levels = 5;
  int base_intervals = 32;
};

struct QvReport {
  std::vector<int> intervals;   // per level
  std::vector<double> qv;       // sum of squared increments
  std::vector<double> ratios;   // qv[l] / qv[l+1]
};

/// Sum of squared increments over each partition level. The sampled series
/// must divide evenly into every requested level, otherwise the request
/// out-resolves the data.
QvReport quadratic_variation(std::span<const double> values,
                             const PartitionSpec& partition);
QvReport quadratic_variation(const Trajectory& trajectory, int component,
                             const PartitionSpec& partition);

struct DriftBin {
  double lo = 0.0, hi = 0.0;
  long count = 0;
  double mean = 0.0, se = 0.0, z = 0.0;
};

struct DriftLagReport {
  int lag = 1;
  std::vector<DriftBin> bins;
  double z = 0.0;        // Stouffer combination across bins
  double p_value = 1.0;
  bool degenerate = false;  // too few distinct levels to bin
  bool rejected = false;
};

/// Fair-game check: E(q_{t+lag} - q_t | q_t) should vanish for a martingale.
/// Conditional means are estimated on equal-count bins of q_t (rank-based,
/// so adding a constant to all prices changes nothing), combined into one
/// z statistic per lag. Rejection across lags is Bonferroni-corrected.
struct DriftTestReport {
  double significance = 0.01;
  std::vector<DriftLagReport> lags;
  bool rejected = false;
};

DriftTestReport martingale_drift_test(
    const std::vector<std::vector<double>>& paths,
    std::span<const int> lags = {}, double significance = 0.01, int bins = 10);

struct LognormalityReport {
  long n = 0;
  double mean_log = 0.0, expected_mean = 0.0;
  double var_log = 0.0, expected_var = 0.0;
  double ks = 0.0, ks_threshold = 0.0;
  bool normality_rejected = false;
  bool degenerate = false;  // zero variance, nothing to test
};

/// Moments and a Kolmogorov-Smirnov normality check of log(S_t / S0)
/// against the fitted normal law.
LognormalityReport lognormality_check(std::span<const double> terminal,
                                      double s0, double u, double v, double t,
                                      double significance = 0.01);

struct MomentSeries {
  int dims = 1;
  std::vector<double> times;
  std::vector<double> mean;        // times x dims
  std::vector<double> dispersion;  // times x dims, unbiased
};

/// Per-time mean and unbiased variance across ensemble members. Members
/// must share their time mesh.
MomentSeries ensemble_moments(const std::vector<Trajectory>& members);

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

double normal_cdf(double z);

}  // namespace pilotwave
