#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pilotwave/errors.hpp"

namespace pilotwave {

/// Uniform rectangular grid over a 1- or 2-dimensional price window.
/// Node k of axis d sits at lo[d] + k*dx(d). Storage is row-major with
/// axis 0 outermost. Every active axis needs at least 16 nodes.
struct SpatialGrid {
  int dims = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> n{2, 1};

  static SpatialGrid line(double lo, double hi, int nodes);
  static SpatialGrid plane(double lo0, double hi0, int n0, double lo1,
                           double hi1, int n1);

  double dx(int d) const { return (hi[d] - lo[d]) / (n[d] - 1); }
  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]);
  }
  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) * n[1] + j;
  }
  double coord(int d, int k) const { return lo[d] + k * dx(d); }
  bool contains(std::span<const double> x) const;
  bool operator==(const SpatialGrid&) const = default;
};

enum class InterpOrder { Linear, Cubic };

/// d f / d q_axis on the grid. Centered stencils: fourth order in the deep
/// interior, second order beside the edges, one-sided at boundary nodes.
std::vector<double> gradient_axis(const SpatialGrid& g,
                                  std::span<const double> f, int axis);

/// d^2 f / d q_axis^2 with the same stencil layout as gradient_axis.
std::vector<double> second_derivative_axis(const SpatialGrid& g,
                                           std::span<const double> f,
                                           int axis);

/// Trapezoid quadrature of a nodal field over the grid.
double trapezoid(const SpatialGrid& g, std::span<const double> f);

/// Field value at an off-grid point. Multilinear by default; the cubic
/// option uses Catmull-Rom stencils and falls back to linear within one
/// cell of the boundary. x must satisfy grid.contains(x).
double interpolate(const SpatialGrid& g, std::span<const double> f,
                   std::span<const double> x,
                   InterpOrder order = InterpOrder::Linear);

/// True when any corner of the cell containing x carries a set flag.
bool cell_flagged(const SpatialGrid& g, std::span<const std::uint8_t> flags,
                  std::span<const double> x);

}  // namespace pilotwave
