#include "pilotwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pilotwave {

namespace {

constexpr int kMinNodes = 16;

void check_axis(double lo, double hi, int n) {
  if (n < kMinNodes) {
    throw ConfigError("grid axis needs at least " + std::to_string(kMinNodes) +
                      " nodes, got " + std::to_string(n));
  }
  if (!(lo < hi)) {
    throw ConfigError("grid axis needs lo < hi");
  }
}

// Derivative kernels over one line of data with the given stride.
// Layout: fourth-order centered where five nodes fit, second-order centered
// one node from the edge, one-sided second-order at the edge itself.
void gradient_line(const double* f, double* out, int n, std::size_t stride,
                   double dx) {
  auto at = [&](int i) { return f[i * stride]; };
  out[0] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * dx);
  out[(n - 1) * stride] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) /
                          (2.0 * dx);
  if (n > 2) {
    out[1 * stride] = (at(2) - at(0)) / (2.0 * dx);
    out[(n - 2) * stride] = (at(n - 1) - at(n - 3)) / (2.0 * dx);
  }
  for (int i = 2; i < n - 2; ++i) {
    out[i * stride] =
        (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) /
        (12.0 * dx);
  }
}

void second_derivative_line(const double* f, double* out, int n,
                            std::size_t stride, double dx) {
  auto at = [&](int i) { return f[i * stride]; };
  const double dx2 = dx * dx;
  out[0] = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / dx2;
  out[(n - 1) * stride] =
      (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / dx2;
  out[1 * stride] = (at(0) - 2.0 * at(1) + at(2)) / dx2;
  out[(n - 2) * stride] = (at(n - 3) - 2.0 * at(n - 2) + at(n - 1)) / dx2;
  for (int i = 2; i < n - 2; ++i) {
    out[i * stride] = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) +
                       16.0 * at(i + 1) - at(i + 2)) /
                      (12.0 * dx2);
  }
}

template <typename LineOp>
std::vector<double> apply_axis(const SpatialGrid& g, std::span<const double> f,
                               int axis, LineOp&& op) {
  if (axis < 0 || axis >= g.dims) {
    throw ConfigError("axis out of range");
  }
  if (f.size() != g.size()) {
    throw ConfigError("field size does not match grid");
  }
  std::vector<double> out(f.size());
  const double dx = g.dx(axis);
  if (axis == 0) {
    const std::size_t stride = g.n[1];
    for (int j = 0; j < g.n[1]; ++j) {
      op(f.data() + j, out.data() + j, g.n[0], stride, dx);
    }
  } else {
    for (int i = 0; i < g.n[0]; ++i) {
      op(f.data() + g.index(i, 0), out.data() + g.index(i, 0), g.n[1], 1, dx);
    }
  }
  return out;
}

// Catmull-Rom on a unit-spaced stencil f[-1], f[0], f[1], f[2].
double catmull_rom(double fm1, double f0, double f1, double f2, double t) {
  return 0.5 * (2.0 * f0 + (-fm1 + f1) * t +
                (2.0 * fm1 - 5.0 * f0 + 4.0 * f1 - f2) * t * t +
                (-fm1 + 3.0 * f0 - 3.0 * f1 + f2) * t * t * t);
}

struct CellPos {
  int i;      // left node
  double t;   // fractional offset in [0,1]
};

CellPos locate(const SpatialGrid& g, int axis, double x) {
  const double u = (x - g.lo[axis]) / g.dx(axis);
  int i = static_cast<int>(std::floor(u));
  i = std::clamp(i, 0, g.n[axis] - 2);
  return {i, u - i};
}

}  // namespace

SpatialGrid SpatialGrid::line(double lo, double hi, int nodes) {
  check_axis(lo, hi, nodes);
  SpatialGrid g;
  g.dims = 1;
  g.lo = {lo, 0.0};
  g.hi = {hi, 1.0};
  g.n = {nodes, 1};
  return g;
}

SpatialGrid SpatialGrid::plane(double lo0, double hi0, int n0, double lo1,
                               double hi1, int n1) {
  check_axis(lo0, hi0, n0);
  check_axis(lo1, hi1, n1);
  SpatialGrid g;
  g.dims = 2;
  g.lo = {lo0, lo1};
  g.hi = {hi0, hi1};
  g.n = {n0, n1};
  return g;
}

bool SpatialGrid::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dims) return false;
  for (int d = 0; d < dims; ++d) {
    if (!(x[d] >= lo[d] && x[d] <= hi[d])) return false;
  }
  return true;
}

std::vector<double> gradient_axis(const SpatialGrid& g,
                                  std::span<const double> f, int axis) {
  return apply_axis(g, f, axis, gradient_line);
}

std::vector<double> second_derivative_axis(const SpatialGrid& g,
                                           std::span<const double> f,
                                           int axis) {
  return apply_axis(g, f, axis, second_derivative_line);
}

double trapezoid(const SpatialGrid& g, std::span<const double> f) {
  if (f.size() != g.size()) {
    throw ConfigError("field size does not match grid");
  }
  auto w = [](int k, int n) { return (k == 0 || k == n - 1) ? 0.5 : 1.0; };
  double sum = 0.0;
  if (g.dims == 1) {
    for (int i = 0; i < g.n[0]; ++i) sum += w(i, g.n[0]) * f[i];
    return sum * g.dx(0);
  }
  for (int i = 0; i < g.n[0]; ++i) {
    double row = 0.0;
    for (int j = 0; j < g.n[1]; ++j) row += w(j, g.n[1]) * f[g.index(i, j)];
    sum += w(i, g.n[0]) * row;
  }
  return sum * g.dx(0) * g.dx(1);
}

double interpolate(const SpatialGrid& g, std::span<const double> f,
                   std::span<const double> x, InterpOrder order) {
  if (f.size() != g.size()) {
    throw ConfigError("field size does not match grid");
  }
  if (static_cast<int>(x.size()) != g.dims) {
    throw ConfigError("point dimension does not match grid");
  }
  const CellPos c0 = locate(g, 0, x[0]);

  auto line_value = [&](int axis, auto&& fetch, const CellPos& c) {
    if (order == InterpOrder::Cubic && c.i >= 1 && c.i <= g.n[axis] - 3) {
      return catmull_rom(fetch(c.i - 1), fetch(c.i), fetch(c.i + 1),
                         fetch(c.i + 2), c.t);
    }
    return (1.0 - c.t) * fetch(c.i) + c.t * fetch(c.i + 1);
  };

  if (g.dims == 1) {
    return line_value(0, [&](int i) { return f[i]; }, c0);
  }
  const CellPos c1 = locate(g, 1, x[1]);
  auto row_at = [&](int i) {
    return line_value(1, [&](int j) { return f[g.index(i, j)]; }, c1);
  };
  return line_value(0, row_at, c0);
}

bool cell_flagged(const SpatialGrid& g, std::span<const std::uint8_t> flags,
                  std::span<const double> x) {
  if (flags.empty()) return false;
  const CellPos c0 = locate(g, 0, x[0]);
  if (g.dims == 1) {
    return flags[c0.i] || flags[c0.i + 1];
  }
  const CellPos c1 = locate(g, 1, x[1]);
  return flags[g.index(c0.i, c1.i)] || flags[g.index(c0.i + 1, c1.i)] ||
         flags[g.index(c0.i, c1.i + 1)] || flags[g.index(c0.i + 1, c1.i + 1)];
}

}  // namespace pilotwave
