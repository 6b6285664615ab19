#include <cmath>
#include <vector>

#include "doctest.h"
#include "pilotwave/classical.hpp"
#include "pilotwave/diagnostics.hpp"
#include "pilotwave/picard.hpp"

using namespace pilotwave;

namespace {

ForceField linear_growth(double bound = 3.0) {
  ForceField f;
  f.dim = 1;
  f.lipschitz = 1.0;
  f.bound = bound;
  f.eval = [](double, std::span<const double> x, std::span<double> out) {
    out[0] = x[0];
  };
  return f;
}

ForceField heaviside_kick(double t0 = 0.5) {
  ForceField f;
  f.dim = 1;
  f.lipschitz = 0.0;
  f.bound = 1.5;
  f.discontinuous_in_t = true;
  f.jump_times = {t0};
  f.eval = [t0](double t, std::span<const double>, std::span<double> out) {
    out[0] = t >= t0 ? 1.0 : 0.0;
  };
  return f;
}

// fixed-step RK4 reference, independent of the fixed-point machinery
std::vector<double> rk4_reference(
    const std::function<void(double, std::span<const double>,
                             std::span<double>)>& f,
    std::vector<double> x, double t0, double t1, long steps) {
  const double dt = (t1 - t0) / steps;
  const std::size_t n = x.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (long s = 0; s < steps; ++s) {
    const double t = t0 + s * dt;
    f(t, x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    f(t + 0.5 * dt, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    f(t + 0.5 * dt, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    f(t + dt, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
  return x;
}

}  // namespace

TEST_SUITE("picard") {

TEST_CASE("exponential growth reaches e at t = 1") {
  PicardConfig cfg;
  cfg.mesh_dt = 1e-4;
  cfg.tolerance = 1e-12;
  const double x0[1] = {1.0};
  PicardSolution sol = picard_solve(linear_growth(), x0, 0.0, 1.0, cfg);
  CHECK(sol.segments.size() == 2);  // gamma / c = 0.5 per segment
  CHECK(sol.x.back() == doctest::Approx(std::exp(1.0)).epsilon(1e-6));
  // fixed-point residual: one more application of the map stays below tol
  for (const auto& seg : sol.segments) {
    CHECK(seg.final_residual < cfg.tolerance);
  }
}

TEST_CASE("declared jumps integrate exactly and keep the solution continuous") {
  PicardConfig cfg;
  cfg.mesh_dt = 1e-3;
  const double x0[1] = {0.0};
  PicardSolution sol = picard_solve(heaviside_kick(), x0, 0.0, 1.0, cfg);
  CHECK(std::abs(sol.x.back() - 0.5) < 1e-12);
  // c = 0: the second iterate is already fixed
  for (const auto& seg : sol.segments) CHECK(seg.iterations == 2);
  // continuity: |dx| <= K dt between neighbors, with a kink at the jump
  double left_slope = 0.0, right_slope = 0.0;
  for (std::size_t k = 1; k < sol.t.size(); ++k) {
    const double dx = sol.x[k] - sol.x[k - 1];
    const double dt = sol.t[k] - sol.t[k - 1];
    CHECK(std::abs(dx) <= 1.5 * dt * 1.0001);
    if (std::abs(sol.t[k] - 0.5) < 1e-12) left_slope = dx / dt;
    if (std::abs(sol.t[k - 1] - 0.5) < 1e-12) right_slope = dx / dt;
  }
  CHECK(left_slope == doctest::Approx(0.0));
  CHECK(right_slope == doctest::Approx(1.0));
}

TEST_CASE("smooth force agrees with a high-order reference") {
  ForceField f;
  f.dim = 1;
  f.lipschitz = 1.0;  // |d/dx sin(x)| <= 1
  f.bound = 2.5;
  f.eval = [](double t, std::span<const double> x, std::span<double> out) {
    out[0] = std::sin(x[0]) + std::cos(t);
  };
  PicardConfig cfg;
  cfg.mesh_dt = 1e-4;
  cfg.tolerance = 1e-12;
  const double x0[1] = {0.3};
  PicardSolution sol = picard_solve(f, x0, 0.0, 2.0, cfg);
  auto ref = rk4_reference(f.eval, {0.3}, 0.0, 2.0, 200000);
  CHECK(sol.x.back() == doctest::Approx(ref[0]).epsilon(1e-6));
}

TEST_CASE("both stopping norms solve the same problem") {
  PicardConfig sup_cfg;
  sup_cfg.mesh_dt = 1e-3;
  PicardConfig l2_cfg = sup_cfg;
  l2_cfg.norm = PicardNorm::L2;
  const double x0[1] = {1.0};
  PicardSolution a = picard_solve(linear_growth(), x0, 0.0, 1.0, sup_cfg);
  PicardSolution b = picard_solve(linear_growth(), x0, 0.0, 1.0, l2_cfg);
  CHECK(a.x.back() == doctest::Approx(b.x.back()).epsilon(1e-9));
}

TEST_CASE("contraction diagnostics stay within the declared factor") {
  PicardConfig cfg;
  cfg.mesh_dt = 1e-3;
  cfg.tolerance = 1e-12;
  const double x0[1] = {1.0};
  PicardSolution sol = picard_solve(linear_growth(), x0, 0.0, 1.0, cfg);
  ContractionReport rep = contraction_diagnostics(sol);
  CHECK(rep.within_bound);
  for (const auto& seg : rep.segments) {
    CHECK(seg.max_ratio <= 0.55);  // 1.1 x declared alpha = 0.5
    CHECK(seg.max_ratio > 0.0);
  }

  // halving the segment length halves the observed ratio
  PicardConfig tight = cfg;
  tight.gamma = 0.25;
  PicardSolution sol2 = picard_solve(linear_growth(), x0, 0.0, 1.0, tight);
  ContractionReport rep2 = contraction_diagnostics(sol2);
  double worst = 0.0, worst2 = 0.0;
  for (const auto& s : rep.segments) worst = std::max(worst, s.max_ratio);
  for (const auto& s : rep2.segments) worst2 = std::max(worst2, s.max_ratio);
  CHECK(worst / worst2 >= 1.8);
}

TEST_CASE("declared-bound violations are caught while probing") {
  ForceField f = linear_growth(1.0);  // true sup over the run is e
  const double x0[1] = {1.0};
  CHECK_THROWS_AS(picard_solve(f, x0, 0.0, 1.0, {}), ContractError);
}

TEST_CASE("non-convergence reports the observed ratio") {
  PicardConfig cfg;
  cfg.max_iterations = 3;
  cfg.tolerance = 1e-14;
  const double x0[1] = {1.0};
  try {
    picard_solve(linear_growth(), x0, 0.0, 1.0, cfg);
    CHECK(false);
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("ratio") != std::string::npos);
    CHECK(msg.find("alpha") != std::string::npos);
  }
}

TEST_CASE("mesh halving improves the smooth-case error by 3x or better") {
  auto error_at = [](double mesh_dt) {
    PicardConfig cfg;
    cfg.mesh_dt = mesh_dt;
    cfg.tolerance = 1e-13;
    const double x0[1] = {1.0};
    PicardSolution sol = picard_solve(linear_growth(), x0, 0.0, 1.0, cfg);
    return std::abs(sol.x.back() - std::exp(1.0));
  };
  CHECK(error_at(2e-3) / error_at(1e-3) >= 3.0);
}

TEST_CASE("phase-space lift reproduces the leapfrog oscillator") {
  auto classical = [](double, std::span<const double> q, std::span<double> out) {
    out[0] = -2.0 * q[0];
  };
  const double m[1] = {1.0};
  ForceField lift = phase_space_lift(classical, nullptr, m, 2.2, 2.0);
  CHECK(lift.dim == 2);
  CHECK(lift.lipschitz == doctest::Approx(2.0));

  PicardConfig cfg;
  cfg.mesh_dt = 2e-4;
  cfg.tolerance = 1e-12;
  const double x0[2] = {1.0, 0.0};
  PicardSolution sol = picard_solve(lift, x0, 0.0, 1.0, cfg);

  Trajectory ref = integrate({{1.0}, {0.0}, 0.0}, FinancialMass({1.0}),
                             ClassicalPotential::quadratic(), 1e-4, 10000,
                             10000);
  const std::size_t last = sol.t.size() - 1;
  CHECK(std::abs(sol.at(last, 0) - ref.q.back()) < 1e-5);
  CHECK(std::abs(sol.at(last, 1) - ref.p.back()) < 1e-5);
}

TEST_CASE("a force jump leaves prices C1 while momentum kinks") {
  // f = 0 before t = 1 and f = 1 after; q0 = 0, p0 = 1, m = 1:
  // q(t) = t, then q(t) = t + (t-1)^2 / 2
  auto kick = [](double t, std::span<const double>, std::span<double> out) {
    out[0] = t >= 1.0 ? 1.0 : 0.0;
  };
  const double m[1] = {1.0};
  ForceField lift = phase_space_lift(kick, nullptr, m, 2.5, 0.0, true, {1.0});
  PicardConfig cfg;
  cfg.mesh_dt = 1e-3;
  const double x0[2] = {0.0, 1.0};
  PicardSolution sol = picard_solve(lift, x0, 0.0, 2.0, cfg);
  const std::size_t last = sol.t.size() - 1;
  CHECK(std::abs(sol.at(last, 0) - 2.5) < 1e-12);
  CHECK(std::abs(sol.at(last, 1) - 2.0) < 1e-12);

  // one-sided slopes of q agree at the jump; p jumps in slope
  double q_slope_l = 0, q_slope_r = 0, p_slope_l = 0, p_slope_r = 0;
  for (std::size_t k = 1; k < sol.t.size(); ++k) {
    const double dt = sol.t[k] - sol.t[k - 1];
    if (std::abs(sol.t[k] - 1.0) < 1e-12) {
      q_slope_l = (sol.at(k, 0) - sol.at(k - 1, 0)) / dt;
      p_slope_l = (sol.at(k, 1) - sol.at(k - 1, 1)) / dt;
    }
    if (std::abs(sol.t[k - 1] - 1.0) < 1e-12) {
      q_slope_r = (sol.at(k, 0) - sol.at(k - 1, 0)) / dt;
      p_slope_r = (sol.at(k, 1) - sol.at(k - 1, 1)) / dt;
    }
  }
  CHECK(std::abs(q_slope_r - q_slope_l) < 2e-3);  // price velocity continuous
  CHECK(p_slope_l == doctest::Approx(0.0));
  CHECK(p_slope_r == doctest::Approx(1.0));
}

TEST_CASE("free lift is exact uniform motion") {
  auto none = [](double, std::span<const double>, std::span<double> out) {
    out[0] = 0.0;
  };
  const double m[1] = {2.0};
  ForceField lift = phase_space_lift(none, nullptr, m, 1.0, 0.0);
  PicardConfig cfg;
  cfg.mesh_dt = 1e-2;
  const double x0[2] = {0.5, 1.0};
  PicardSolution sol = picard_solve(lift, x0, 0.0, 3.0, cfg);
  for (std::size_t k = 0; k < sol.t.size(); ++k) {
    CHECK(sol.at(k, 0) ==
          doctest::Approx(0.5 + sol.t[k] / 2.0).epsilon(1e-13));
    CHECK(sol.at(k, 1) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("bounded forces give mesh-vanishing quadratic variation") {
  PicardConfig cfg;
  cfg.mesh_dt = 1.0 / 512.0;
  cfg.tolerance = 1e-12;
  const double x0[1] = {1.0};
  PicardSolution sol = picard_solve(linear_growth(), x0, 0.0, 1.0, cfg);
  PartitionSpec spec;
  spec.levels = 4;
  spec.base_intervals = 32;
  QvReport qv = quadratic_variation(sol.x, spec);
  for (double r : qv.ratios) CHECK(r == doctest::Approx(2.0).epsilon(0.05));
}

}  // TEST_SUITE
