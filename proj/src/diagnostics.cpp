#include "pilotwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

namespace pilotwave {

namespace {

double qv_at_stride(std::span<const double> v, std::size_t stride) {
  double sum = 0.0;
  for (std::size_t k = 0; k + stride < v.size(); k += stride) {
    const double d = v[k + stride] - v[k];
    sum += d * d;
  }
  return sum;
}

constexpr double kHugeZ = 1e18;

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

QvReport quadratic_variation(std::span<const double> values,
                             const PartitionSpec& partition) {
  if (values.size() < 2) throw PreconditionError("trajectory too short");
  if (partition.levels < 1 || partition.base_intervals < 1) {
    throw ConfigError("partition needs at least one level and interval");
  }
  const std::size_t data_intervals = values.size() - 1;
  QvReport report;
  for (int level = 0; level < partition.levels; ++level) {
    const long k = partition.mode == PartitionSpec::Mode::Dyadic
                       ? static_cast<long>(partition.base_intervals) << level
                       : static_cast<long>(partition.base_intervals) *
                             (level + 1);
    if (static_cast<std::size_t>(k) > data_intervals ||
        data_intervals % k != 0) {
      throw ResolutionError("partition with " + std::to_string(k) +
                            " intervals does not fit " +
                            std::to_string(data_intervals) +
                            " sampled intervals");
    }
    report.intervals.push_back(static_cast<int>(k));
    report.qv.push_back(qv_at_stride(values, data_intervals / k));
  }
  for (std::size_t l = 0; l + 1 < report.qv.size(); ++l) {
    report.ratios.push_back(report.qv[l + 1] > 0.0
                                ? report.qv[l] / report.qv[l + 1]
                                : std::numeric_limits<double>::infinity());
  }
  return report;
}

QvReport quadratic_variation(const Trajectory& trajectory, int component,
                             const PartitionSpec& partition) {
  std::vector<double> v = trajectory.component(component);
  return quadratic_variation(v, partition);
}

DriftTestReport martingale_drift_test(
    const std::vector<std::vector<double>>& paths, std::span<const int> lags,
    double significance, int bins) {
  static const int kDefaultLags[] = {1};
  if (lags.empty()) lags = kDefaultLags;
  if (bins < 1) throw ConfigError("need at least one bin");

  DriftTestReport report;
  report.significance = significance;

  for (int lag : lags) {
    if (lag < 1) throw ConfigError("lags must be >= 1");
    // non-overlapping (q_t, q_{t+lag} - q_t) pairs pooled over paths
    std::vector<std::pair<double, double>> pairs;
    for (const auto& path : paths) {
      for (std::size_t t = 0; t + lag < path.size(); t += lag) {
        pairs.emplace_back(path[t], path[t + lag] - path[t]);
      }
    }
    if (pairs.size() < 100) {
      throw PreconditionError("drift test needs at least 100 increments");
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    DriftLagReport lr;
    lr.lag = lag;
    long distinct = 1;
    for (std::size_t i = 1; i < pairs.size(); ++i) {
      if (pairs[i].first != pairs[i - 1].first) ++distinct;
    }
    int used_bins = bins;
    if (distinct < bins) {
      used_bins = static_cast<int>(std::max<long>(1, distinct));
      lr.degenerate = true;
    }

    double stouffer = 0.0;
    int live_bins = 0;
    for (int b = 0; b < used_bins; ++b) {
      const std::size_t begin = pairs.size() * b / used_bins;
      const std::size_t end = pairs.size() * (b + 1) / used_bins;
      if (end <= begin) continue;
      DriftBin bin;
      bin.lo = pairs[begin].first;
      bin.hi = pairs[end - 1].first;
      bin.count = static_cast<long>(end - begin);
      double mean = 0.0, m2 = 0.0;
      long n = 0;
      for (std::size_t i = begin; i < end; ++i) {
        ++n;
        const double delta = pairs[i].second - mean;
        mean += delta / n;
        m2 += delta * (pairs[i].second - mean);
      }
      bin.mean = mean;
      const double var = n > 1 ? m2 / (n - 1) : 0.0;
      bin.se = n > 0 ? std::sqrt(var / n) : 0.0;
      if (bin.se > 0.0) {
        bin.z = bin.mean / bin.se;
      } else {
        bin.z = bin.mean == 0.0 ? 0.0 : (bin.mean > 0.0 ? kHugeZ : -kHugeZ);
      }
      stouffer += bin.z;
      ++live_bins;
      lr.bins.push_back(bin);
    }
    lr.z = live_bins > 0 ? stouffer / std::sqrt(double(live_bins)) : 0.0;
    if (std::abs(lr.z) >= kHugeZ) {
      lr.p_value = 0.0;
    } else {
      lr.p_value = 2.0 * (1.0 - normal_cdf(std::abs(lr.z)));
    }
    lr.rejected = lr.p_value < significance;
    report.lags.push_back(std::move(lr));
  }

  const double corrected = significance / report.lags.size();
  for (const auto& lr : report.lags) {
    if (lr.p_value < corrected) report.rejected = true;
  }
  return report;
}

LognormalityReport lognormality_check(std::span<const double> terminal,
                                      double s0, double u, double v, double t,
                                      double significance) {
  if (terminal.size() < 1000) {
    throw PreconditionError("lognormality check needs at least 1000 paths");
  }
  LognormalityReport rep;
  rep.n = static_cast<long>(terminal.size());
  rep.expected_mean = (u - 0.5 * v * v) * t;
  rep.expected_var = v * v * t;

  std::vector<double> logs(terminal.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    logs[i] = std::log(terminal[i] / s0);
  }
  double mean = 0.0, m2 = 0.0;
  long n = 0;
  for (double x : logs) {
    ++n;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }
  rep.mean_log = mean;
  rep.var_log = n > 1 ? m2 / (n - 1) : 0.0;

  if (rep.var_log < 1e-300) {
    rep.degenerate = true;
    return rep;
  }
  const double sd = std::sqrt(rep.var_log);
  rep.ks = ks_statistic(std::move(logs), [&](double x) {
    return normal_cdf((x - mean) / sd);
  });
  // asymptotic KS critical value; fitting the parameters first makes the
  // test conservative, which is fine for a gross-shape check
  const double c = significance <= 0.01 ? 1.628 : 1.358;
  rep.ks_threshold = c / std::sqrt(double(rep.n));
  rep.normality_rejected = rep.ks > rep.ks_threshold;
  return rep;
}

MomentSeries ensemble_moments(const std::vector<Trajectory>& members) {
  if (members.size() < 2) {
    throw PreconditionError("ensemble moments need at least two members");
  }
  const Trajectory& first = members.front();
  for (const auto& tr : members) {
    if (tr.times != first.times || tr.dims != first.dims) {
      throw ConfigError("ensemble members disagree on time mesh or dimension");
    }
  }
  MomentSeries out;
  out.dims = first.dims;
  out.times = first.times;
  const std::size_t nt = first.samples();
  out.mean.assign(nt * first.dims, 0.0);
  out.dispersion.assign(nt * first.dims, 0.0);
  for (std::size_t k = 0; k < nt; ++k) {
    for (int d = 0; d < first.dims; ++d) {
      double mean = 0.0, m2 = 0.0;
      long n = 0;
      for (const auto& tr : members) {
        ++n;
        const double x = tr.q_at(k, d);
        const double delta = x - mean;
        mean += delta / n;
        m2 += delta * (x - mean);
      }
      out.mean[k * first.dims + d] = mean;
      out.dispersion[k * first.dims + d] = m2 / (n - 1);
    }
  }
  return out;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw PreconditionError("ks_statistic needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    worst = std::max(worst, std::abs(f - (i + 1) / n));
    worst = std::max(worst, std::abs(f - i / n));
  }
  return worst;
}

}  // namespace pilotwave
