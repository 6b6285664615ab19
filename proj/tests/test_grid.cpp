#include <cmath>

#include "doctest.h"
#include "pilotwave/grid.hpp"

using namespace pilotwave;

TEST_SUITE("grid") {

TEST_CASE("factories enforce the node minimum and ordering") {
  CHECK_THROWS_AS(SpatialGrid::line(0.0, 1.0, 8), ConfigError);
  CHECK_THROWS_AS(SpatialGrid::line(1.0, 1.0, 32), ConfigError);
  SpatialGrid g = SpatialGrid::line(-1.0, 1.0, 17);
  CHECK(g.dx(0) == doctest::Approx(0.125));
  CHECK(g.size() == 17);
}

TEST_CASE("derivatives are exact on low-degree polynomials") {
  SpatialGrid g = SpatialGrid::line(-2.0, 3.0, 64);
  std::vector<double> f(g.size()), df(g.size()), d2f(g.size());
  for (int i = 0; i < g.n[0]; ++i) {
    const double x = g.coord(0, i);
    f[i] = 2.0 * x * x * x - x * x + 0.5 * x - 4.0;
    df[i] = 6.0 * x * x - 2.0 * x + 0.5;
    d2f[i] = 12.0 * x - 2.0;
  }
  auto grad = gradient_axis(g, f, 0);
  auto curv = second_derivative_axis(g, f, 0);
  // centered stencils are exact for cubics from two nodes in; the
  // second-derivative stencils are exact for cubics everywhere
  for (int i = 2; i < g.n[0] - 2; ++i) {
    CHECK(grad[i] == doctest::Approx(df[i]).epsilon(1e-10));
  }
  for (int i = 0; i < g.n[0]; ++i) {
    CHECK(curv[i] == doctest::Approx(d2f[i]).epsilon(1e-9));
  }
}

TEST_CASE("interior gradient converges at fourth order") {
  auto worst_error = [](int n) {
    SpatialGrid g = SpatialGrid::line(-1.0, 1.0, n);
    std::vector<double> f(g.size());
    for (int i = 0; i < n; ++i) f[i] = std::sin(3.0 * g.coord(0, i));
    auto grad = gradient_axis(g, f, 0);
    double worst = 0.0;
    for (int i = 4; i < n - 4; ++i) {
      worst = std::max(worst,
                       std::abs(grad[i] - 3.0 * std::cos(3.0 * g.coord(0, i))));
    }
    return worst;
  };
  const double coarse = worst_error(101);
  const double fine = worst_error(201);
  CHECK(coarse / fine > 12.0);  // 2^4 up to edge effects
}

TEST_CASE("trapezoid quadrature integrates a 2D gaussian") {
  SpatialGrid g = SpatialGrid::plane(-7.0, 7.0, 201, -7.0, 7.0, 201);
  std::vector<double> f(g.size());
  for (int i = 0; i < g.n[0]; ++i) {
    for (int j = 0; j < g.n[1]; ++j) {
      const double x = g.coord(0, i), y = g.coord(1, j);
      f[g.index(i, j)] = std::exp(-(x * x + y * y));
    }
  }
  CHECK(trapezoid(g, f) == doctest::Approx(std::acos(-1.0)).epsilon(1e-8));
}

TEST_CASE("multilinear interpolation reproduces bilinear fields exactly") {
  SpatialGrid g = SpatialGrid::plane(0.0, 2.0, 21, -1.0, 1.0, 31);
  std::vector<double> f(g.size());
  for (int i = 0; i < g.n[0]; ++i) {
    for (int j = 0; j < g.n[1]; ++j) {
      const double x = g.coord(0, i), y = g.coord(1, j);
      f[g.index(i, j)] = 2.0 + 3.0 * x - y + 0.5 * x * y;
    }
  }
  const double pts[][2] = {{0.13, -0.4}, {1.77, 0.92}, {2.0, 1.0}};
  for (auto& p : pts) {
    const double expect = 2.0 + 3.0 * p[0] - p[1] + 0.5 * p[0] * p[1];
    CHECK(interpolate(g, f, std::span<const double>(p, 2)) ==
          doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("cubic interpolation beats linear on a smooth 1D field") {
  SpatialGrid g = SpatialGrid::line(0.0, 1.0, 33);
  std::vector<double> f(g.size());
  for (int i = 0; i < g.n[0]; ++i) f[i] = std::sin(6.0 * g.coord(0, i));
  double worst_lin = 0.0, worst_cub = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double x[1] = {0.1 + 0.8 * k / 199.0};
    const double exact = std::sin(6.0 * x[0]);
    worst_lin = std::max(
        worst_lin, std::abs(interpolate(g, f, x, InterpOrder::Linear) - exact));
    worst_cub = std::max(
        worst_cub, std::abs(interpolate(g, f, x, InterpOrder::Cubic) - exact));
  }
  CHECK(worst_cub < 0.05 * worst_lin);
}

TEST_CASE("cell flags cover interpolation support") {
  SpatialGrid g = SpatialGrid::line(0.0, 1.0, 17);
  std::vector<std::uint8_t> flags(g.size(), 0);
  flags[5] = 1;
  const double inside[1] = {g.coord(0, 5) + 0.3 * g.dx(0)};
  const double outside[1] = {g.coord(0, 8) + 0.3 * g.dx(0)};
  CHECK(cell_flagged(g, flags, inside));
  CHECK_FALSE(cell_flagged(g, flags, outside));
}

}  // TEST_SUITE
