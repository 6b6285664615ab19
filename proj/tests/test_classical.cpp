#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pilotwave/classical.hpp"

using namespace pilotwave;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("classical") {

TEST_CASE("financial energy evaluates kinetic plus potential terms") {
  CHECK(financial_energy({{1.0}, {0.0}, 0.0}, FinancialMass({1.0}),
                         ClassicalPotential::quadratic()) ==
        doctest::Approx(1.0));
  CHECK(financial_energy({{0.0, 0.0}, {2.0, 0.0}, 0.0},
                         FinancialMass({2.0, 1.0}),
                         ClassicalPotential::pairwise_spread()) ==
        doctest::Approx(1.0));
  // equal prices carry no spread energy
  CHECK(ClassicalPotential::pairwise_spread().value(
            0.0, std::vector<double>{3.7, 3.7, 3.7}) == doctest::Approx(0.0));
}

TEST_CASE("oscillator reaches the analytic half period") {
  // q'' = -2q from V = q^2, so q(t) = cos(sqrt(2) t)
  const double t_end = kPi / std::numbers::sqrt2;
  const long steps = std::lround(t_end / 1e-4);
  const double dt = t_end / steps;
  Trajectory tr = integrate({{1.0}, {0.0}, 0.0}, FinancialMass({1.0}),
                            ClassicalPotential::quadratic(), dt, steps, steps);
  CHECK(tr.q.back() == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("zero potential gives uniform motion exactly") {
  MarketState s{{0.5}, {2.0}, 0.0};
  Trajectory tr = integrate(s, FinancialMass({4.0}),
                            ClassicalPotential::zero(), 0.25, 8, 1);
  for (std::size_t k = 0; k < tr.samples(); ++k) {
    CHECK(tr.q_at(k, 0) == doctest::Approx(0.5 + 2.0 / 4.0 * tr.times[k])
                               .epsilon(1e-14));
  }
}

TEST_CASE("energy drift stays below 1e-6 over a long run") {
  FinancialMass m({1.0});
  ClassicalPotential V = ClassicalPotential::quadratic();
  MarketState s{{1.0}, {0.0}, 0.0};
  const double h0 = financial_energy(s, m, V);
  for (long k = 0; k < 100000; ++k) s = hamiltonian_step(s, m, V, 1e-3);
  CHECK(std::abs(financial_energy(s, m, V) - h0) / h0 < 1e-6);
}

TEST_CASE("newton force matches hand values and finite differences") {
  CHECK(newton_force(ClassicalPotential::quadratic(),
                     std::vector<double>{3.0})[0] == doctest::Approx(-6.0));
  auto f = newton_force(ClassicalPotential::pairwise_spread(),
                        std::vector<double>{1.0, 0.0});
  CHECK(f[0] == doctest::Approx(-2.0));
  CHECK(f[1] == doctest::Approx(2.0));

  // finite-difference oracle on the smooth variants
  for (const auto& V : {ClassicalPotential::quadratic(),
                        ClassicalPotential::pairwise_spread()}) {
    const std::vector<double> q{0.3, -1.2, 2.1};
    auto force = newton_force(V, q);
    const double eps = 1e-6;
    for (std::size_t d = 0; d < q.size(); ++d) {
      std::vector<double> qp = q, qm = q;
      qp[d] += eps;
      qm[d] -= eps;
      const double fd = -(V.value(0.0, qp) - V.value(0.0, qm)) / (2.0 * eps);
      CHECK(force[d] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("leapfrog is reversible to roundoff") {
  FinancialMass m({1.0, 2.0});
  ClassicalPotential V = ClassicalPotential::pairwise_spread();
  MarketState s{{0.7, -0.3}, {0.1, 0.4}, 0.0};
  MarketState fwd = hamiltonian_step(s, m, V, 0.05);
  MarketState back = hamiltonian_step(fwd, m, V, -0.05);
  for (int d = 0; d < 2; ++d) {
    CHECK(back.q[d] == doctest::Approx(s.q[d]).epsilon(1e-12));
    CHECK(back.p[d] == doctest::Approx(s.p[d]).epsilon(1e-12));
  }
}

TEST_CASE("reversibility holds for time-dependent potentials too") {
  ClassicalPotential V = ClassicalPotential::time_dependent(
      ClassicalPotential::quadratic(),
      [](double t) { return 1.0 + 0.5 * std::sin(t); });
  FinancialMass m({1.0});
  MarketState s{{1.0}, {0.2}, 0.3};
  MarketState fwd = hamiltonian_step(s, m, V, 0.05);
  MarketState back = hamiltonian_step(fwd, m, V, -0.05);
  CHECK(back.q[0] == doctest::Approx(s.q[0]).epsilon(1e-12));
  CHECK(back.p[0] == doctest::Approx(s.p[0]).epsilon(1e-12));
}

TEST_CASE("pairwise-spread forces are translation invariant") {
  ClassicalPotential V = ClassicalPotential::pairwise_spread();
  // dyadic values keep the shifted additions exact in floating point
  const std::vector<double> q{0.5, -1.25, 2.75};
  for (double c : {0.5, -2.0, 8.25}) {
    std::vector<double> shifted = q;
    for (auto& x : shifted) x += c;
    auto f0 = newton_force(V, q);
    auto f1 = newton_force(V, shifted);
    for (std::size_t d = 0; d < q.size(); ++d) CHECK(f0[d] == f1[d]);
  }
}

TEST_CASE("tabulated potentials differentiate on the grid and guard domain") {
  SpatialGrid g = SpatialGrid::line(-2.0, 2.0, 257);
  std::vector<double> v(g.size());
  for (int i = 0; i < g.n[0]; ++i) v[i] = std::pow(g.coord(0, i), 2);
  ClassicalPotential V = ClassicalPotential::tabulated(g, v);
  CHECK(newton_force(V, std::vector<double>{0.5})[0] ==
        doctest::Approx(-1.0).epsilon(1e-4));
  CHECK_THROWS_AS(newton_force(V, std::vector<double>{2.5}), DomainError);
  try {
    newton_force(V, std::vector<double>{2.5});
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("2.5") != std::string::npos);
  }
}

TEST_CASE("scheduled potential scales its force at the evaluation time") {
  ClassicalPotential V = ClassicalPotential::time_dependent(
      ClassicalPotential::quadratic(),
      [](double t) { return 2.0 + std::sin(t); });
  auto f = newton_force(V, std::vector<double>{1.0}, 0.0);
  CHECK(f[0] == doctest::Approx(-4.0));
}

TEST_CASE("mass schedules respect their floor") {
  CHECK_THROWS_AS(MassSchedule::log_gaussian({1.0}, {0.2}, {0.0}),
                  ContractError);
  MassSchedule bad = MassSchedule::deterministic(
      {[](double t) { return 1.0 - t; }}, {0.5});
  auto s = bad.sampler(0.0);
  RngStream rng(1, 0);
  CHECK_THROWS_AS(s.advance(0.8, rng), ContractError);

  MassSchedule rnd = MassSchedule::log_gaussian({1.0}, {0.8}, {0.2});
  auto rs = rnd.sampler(0.0);
  RngStream rng2(7, 3);
  for (int k = 0; k < 2000; ++k) {
    rs.advance(0.01, rng2);
    CHECK(rs.at(0) >= 0.2);
  }
}

}  // TEST_SUITE
