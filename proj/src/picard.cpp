#include "pilotwave/picard.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pilotwave {

namespace {

// One-sided nudge so endpoint samples of an interval never straddle a
// declared jump: the left endpoint of an interval starting at a jump is
// evaluated just after it, the right endpoint of an interval ending at a
// jump just before it.
constexpr double kJumpNudge = 1e-12;

bool is_jump(double t, std::span<const double> jumps, double scale) {
  for (double j : jumps) {
    if (std::abs(t - j) <= kJumpNudge * scale) return true;
  }
  return false;
}

double euclid(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> segment_mesh(double a, double b,
                                 std::span<const double> jumps,
                                 double mesh_dt) {
  const long n = std::max<long>(1, std::lround(std::ceil((b - a) / mesh_dt)));
  std::vector<double> mesh(n + 1);
  for (long k = 0; k <= n; ++k) {
    mesh[k] = a + (b - a) * static_cast<double>(k) / n;
  }
  mesh.back() = b;
  for (double j : jumps) {
    if (j > a && j < b) mesh.push_back(j);
  }
  std::sort(mesh.begin(), mesh.end());
  mesh.erase(std::unique(mesh.begin(), mesh.end(),
                         [&](double x, double y) {
                           return std::abs(x - y) < 1e-15 * (std::abs(b) + 1.0);
                         }),
             mesh.end());
  return mesh;
}

}  // namespace

PicardSolution picard_solve(const ForceField& field, std::span<const double> x0,
                            double t0, double T, const PicardConfig& cfg) {
  if (!(T > t0)) throw PreconditionError("picard_solve needs T > t0");
  if (static_cast<int>(x0.size()) != field.dim) {
    throw PreconditionError("initial point dimension does not match field");
  }
  if (!field.eval) throw ConfigError("force field has no evaluator");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) {
    throw ConfigError("gamma must lie in (0, 1)");
  }

  const int dim = field.dim;
  const double span = T - t0;
  const double seg_len =
      field.lipschitz > 0.0 ? cfg.gamma / field.lipschitz : span;

  PicardSolution sol;
  sol.dim = dim;
  sol.alpha = field.lipschitz > 0.0 ? cfg.gamma
                                    : 0.0;  // c = 0: the map contracts at once

  std::vector<double> x_start(x0.begin(), x0.end());
  std::vector<double> f_left(dim), f_right(dim);

  double seg_a = t0;
  int seg_index = 0;
  while (seg_a < T - 1e-15 * span) {
    const double seg_b = std::min(T, seg_a + seg_len);
    std::vector<double> mesh =
        segment_mesh(seg_a, seg_b, field.jump_times, cfg.mesh_dt);
    const std::size_t m = mesh.size();

    // iterate x_{n+1}(t_i) = x_start + cumulative trapezoid of F(., x_n(.))
    std::vector<double> x_cur(m * dim), x_next(m * dim);
    for (std::size_t i = 0; i < m; ++i) {
      std::copy(x_start.begin(), x_start.end(), x_cur.begin() + i * dim);
    }

    PicardSegment seg;
    seg.t0 = seg_a;
    seg.t1 = seg_b;

    auto eval_at = [&](double t, bool from_right, std::span<const double> x,
                       std::span<double> out) {
      double tt = t;
      if (!field.jump_times.empty() &&
          is_jump(t, field.jump_times, std::abs(span) + 1.0)) {
        tt += (from_right ? 1.0 : -1.0) * kJumpNudge * (std::abs(span) + 1.0);
      }
      field.eval(tt, x, out);
      if (cfg.probe_bound && field.bound > 0.0) {
        const double mag = euclid(out);
        if (mag > field.bound * (1.0 + 1e-9)) {
          throw ContractError("declared bound K=" + std::to_string(field.bound) +
                              " violated at t=" + std::to_string(t) +
                              " with |F|=" + std::to_string(mag));
        }
      }
    };

    auto apply_map = [&](const std::vector<double>& in,
                         std::vector<double>& out) {
      std::copy(x_start.begin(), x_start.end(), out.begin());
      eval_at(mesh[0], true, {in.data(), static_cast<std::size_t>(dim)},
              f_left);
      for (std::size_t i = 1; i < m; ++i) {
        eval_at(mesh[i], false, {in.data() + i * dim,
                                 static_cast<std::size_t>(dim)},
                f_right);
        const double half_dt = 0.5 * (mesh[i] - mesh[i - 1]);
        for (int d = 0; d < dim; ++d) {
          out[i * dim + d] = out[(i - 1) * dim + d] +
                             half_dt * (f_left[d] + f_right[d]);
        }
        // the right endpoint becomes the next interval's left endpoint,
        // re-evaluated from the correct side when it is a jump node
        eval_at(mesh[i], true, {in.data() + i * dim,
                                static_cast<std::size_t>(dim)},
                f_left);
      }
    };

    auto distance = [&](const std::vector<double>& a,
                        const std::vector<double>& b) {
      if (cfg.norm == PicardNorm::Sup) {
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          double s = 0.0;
          for (int d = 0; d < dim; ++d) {
            const double diff = a[i * dim + d] - b[i * dim + d];
            s += diff * diff;
          }
          worst = std::max(worst, s);
        }
        return std::sqrt(worst);
      }
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        double s0 = 0.0, s1 = 0.0;
        for (int d = 0; d < dim; ++d) {
          const double d0 = a[i * dim + d] - b[i * dim + d];
          const double d1 = a[(i + 1) * dim + d] - b[(i + 1) * dim + d];
          s0 += d0 * d0;
          s1 += d1 * d1;
        }
        acc += 0.5 * (mesh[i + 1] - mesh[i]) * (s0 + s1);
      }
      return std::sqrt(acc);
    };

    bool converged = false;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
      apply_map(x_cur, x_next);
      const double diff = distance(x_cur, x_next);
      seg.diff_norms.push_back(diff);
      std::swap(x_cur, x_next);
      seg.iterations = it;
      if (diff < cfg.tolerance) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      double ratio = 0.0;
      const auto& dn = seg.diff_norms;
      if (dn.size() >= 2 && dn[dn.size() - 2] > 0.0) {
        ratio = dn.back() / dn[dn.size() - 2];
      }
      throw NumericError(
          "Picard iteration did not converge on [" + std::to_string(seg_a) +
          ", " + std::to_string(seg_b) + "]: observed ratio " +
          std::to_string(ratio) + " vs declared alpha " +
          std::to_string(sol.alpha));
    }
    // honest fixed-point residual: one more application of the map
    apply_map(x_cur, x_next);
    seg.final_residual = distance(x_cur, x_next);

    // append to the global mesh, skipping the duplicated segment start
    const std::size_t skip = sol.t.empty() ? 0 : 1;
    seg.mesh_begin = sol.t.empty() ? 0 : sol.t.size() - 1;
    for (std::size_t i = skip; i < m; ++i) {
      sol.t.push_back(mesh[i]);
      for (int d = 0; d < dim; ++d) sol.x.push_back(x_cur[i * dim + d]);
      sol.segment_of.push_back(seg_index);
    }
    seg.mesh_end = sol.t.size();
    sol.segments.push_back(std::move(seg));

    x_start.assign(x_cur.end() - dim, x_cur.end());
    seg_a = seg_b;
    ++seg_index;
  }
  return sol;
}

ContractionReport contraction_diagnostics(const PicardSolution& solution) {
  ContractionReport report;
  report.alpha = solution.alpha;
  for (std::size_t s = 0; s < solution.segments.size(); ++s) {
    const auto& seg = solution.segments[s];
    ContractionReport::Segment entry;
    entry.index = static_cast<int>(s);
    entry.iterations = seg.iterations;
    for (std::size_t i = 1; i < seg.diff_norms.size(); ++i) {
      if (seg.diff_norms[i - 1] > 0.0 && seg.diff_norms[i] > 1e-14) {
        entry.max_ratio = std::max(entry.max_ratio,
                                   seg.diff_norms[i] / seg.diff_norms[i - 1]);
      }
    }
    if (solution.alpha > 0.0 && entry.max_ratio > 1.1 * solution.alpha) {
      report.within_bound = false;
    }
    report.segments.push_back(entry);
  }
  return report;
}

ForceField phase_space_lift(
    std::function<void(double, std::span<const double>, std::span<double>)>
        classical_force,
    std::function<void(double, std::span<const double>, std::span<double>)>
        quantum_force,
    std::span<const double> masses, double bound, double force_lipschitz,
    bool discontinuous_in_t, std::vector<double> jump_times) {
  const int n = static_cast<int>(masses.size());
  std::vector<double> m(masses.begin(), masses.end());
  double min_mass = m[0];
  for (double v : m) {
    if (!(v > 0.0)) throw ConfigError("masses must be positive");
    min_mass = std::min(min_mass, v);
  }
  ForceField lift;
  lift.dim = 2 * n;
  lift.bound = bound;
  lift.lipschitz = std::max(1.0 / min_mass, force_lipschitz);
  lift.discontinuous_in_t = discontinuous_in_t;
  lift.jump_times = std::move(jump_times);
  lift.eval = [n, m, cf = std::move(classical_force),
               qf = std::move(quantum_force)](double t,
                                              std::span<const double> x,
                                              std::span<double> out) {
    std::span<const double> q = x.subspan(0, n);
    std::span<const double> p = x.subspan(n, n);
    for (int j = 0; j < n; ++j) out[j] = p[j] / m[j];
    std::span<double> dp = out.subspan(n, n);
    cf(t, q, dp);
    if (qf) {
      std::vector<double> g(n);
      qf(t, q, g);
      for (int j = 0; j < n; ++j) dp[j] += g[j];
    }
  };
  return lift;
}

}  // namespace pilotwave
