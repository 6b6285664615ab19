#include "pilotwave/wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pilotwave {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_pm_pi(double x) { return x - kTwoPi * std::round(x / kTwoPi); }

std::vector<double> abs2(const WaveField& w) {
  std::vector<double> rho(w.values.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(w.values[i]);
  return rho;
}

void require_same_grid(const WaveField& a, const SpatialGrid& g,
                       const char* what) {
  if (!(a.grid == g)) throw ConfigError(std::string(what) + ": grid mismatch");
}

// Unwraps theta along one strided line starting from the anchor index,
// accumulating into S (units of h). S[anchor] must be set already.
void unwrap_line(const double* theta, double* s, int n, std::size_t stride,
                 int anchor, double h) {
  for (int k = anchor + 1; k < n; ++k) {
    const double jump = wrap_pm_pi(theta[k * stride] - theta[(k - 1) * stride]);
    s[k * stride] = s[(k - 1) * stride] + h * jump;
  }
  for (int k = anchor - 1; k >= 0; --k) {
    const double jump = wrap_pm_pi(theta[k * stride] - theta[(k + 1) * stride]);
    s[k * stride] = s[(k + 1) * stride] + h * jump;
  }
}

}  // namespace

double wave_norm(const WaveField& w) {
  std::vector<double> rho = abs2(w);
  return std::sqrt(trapezoid(w.grid, rho));
}

WaveField normalized(WaveField w) {
  const double n = wave_norm(w);
  if (!(n > 1e-300)) throw ConfigError("cannot normalize a zero wave field");
  for (auto& v : w.values) v /= n;
  return w;
}

PolarDecomposition polar_decompose(const WaveField& w, double floor_rel) {
  PolarDecomposition d;
  d.grid = w.grid;
  d.h = w.h;
  const std::size_t sz = w.values.size();
  d.amplitude.resize(sz);
  d.action.resize(sz);
  d.nodal.assign(sz, 0);

  std::vector<double> theta(sz);
  double max_r = 0.0;
  for (std::size_t i = 0; i < sz; ++i) {
    d.amplitude[i] = std::abs(w.values[i]);
    theta[i] = std::arg(w.values[i]);
    max_r = std::max(max_r, d.amplitude[i]);
  }
  d.floor = floor_rel * max_r;
  for (std::size_t i = 0; i < sz; ++i) {
    if (d.amplitude[i] < d.floor) d.nodal[i] = 1;
  }

  const SpatialGrid& g = w.grid;
  const int c0 = g.n[0] / 2;
  if (g.dims == 1) {
    double base = theta[c0];
    if (base < 0.0) base += kTwoPi;  // gauge: S(center) in [0, 2 pi h)
    d.action[c0] = w.h * base;
    unwrap_line(theta.data(), d.action.data(), g.n[0], 1, c0, w.h);
  } else {
    const int c1 = g.n[1] / 2;
    double base = theta[g.index(c0, c1)];
    if (base < 0.0) base += kTwoPi;
    d.action[g.index(c0, c1)] = w.h * base;
    // center line along axis 0, then every line along axis 1
    unwrap_line(theta.data() + c1, d.action.data() + c1, g.n[0], g.n[1], c0,
                w.h);
    for (int i = 0; i < g.n[0]; ++i) {
      unwrap_line(theta.data() + g.index(i, 0), d.action.data() + g.index(i, 0),
                  g.n[1], 1, c1, w.h);
    }
  }
  return d;
}

PotentialGrid quantum_potential(const PolarDecomposition& d,
                                std::span<const double> masses, double h) {
  if (static_cast<int>(masses.size()) != d.grid.dims) {
    throw ConfigError("mass count does not match grid dimension");
  }
  PotentialGrid U;
  U.grid = d.grid;
  U.kind = PotentialKind::Quantum;
  U.mask = d.nodal;
  U.values.assign(d.amplitude.size(), 0.0);
  for (int axis = 0; axis < d.grid.dims; ++axis) {
    const double coeff = h * h / (2.0 * masses[axis]);
    std::vector<double> d2 = second_derivative_axis(d.grid, d.amplitude, axis);
    for (std::size_t i = 0; i < U.values.size(); ++i) {
      const double r = std::max(d.amplitude[i], d.floor);
      U.values[i] -= coeff * d2[i] / r;
    }
  }
  return U;
}

VectorFieldGrid mental_force(const PotentialGrid& U) {
  VectorFieldGrid g;
  g.grid = U.grid;
  g.mask = U.mask;
  for (int axis = 0; axis < U.grid.dims; ++axis) {
    g.comp[axis] = gradient_axis(U.grid, U.values, axis);
    for (auto& v : g.comp[axis]) v = -v;
  }
  return g;
}

VectorFieldGrid phase_gradient(const PolarDecomposition& d) {
  VectorFieldGrid g;
  g.grid = d.grid;
  g.mask = d.nodal;
  for (int axis = 0; axis < d.grid.dims; ++axis) {
    g.comp[axis] = gradient_axis(d.grid, d.action, axis);
  }
  return g;
}

double continuity_residual(const WaveField& before, const WaveField& after,
                           double dt) {
  require_same_grid(after, before.grid, "continuity_residual");
  if (!(dt > 0.0)) throw PreconditionError("continuity_residual needs dt > 0");
  const SpatialGrid& g = before.grid;

  std::vector<double> rho_b = abs2(before);
  std::vector<double> rho_a = abs2(after);
  PolarDecomposition pb = polar_decompose(before);

  std::vector<double> divergence(rho_b.size(), 0.0);
  for (int axis = 0; axis < g.dims; ++axis) {
    std::vector<double> ds = gradient_axis(g, pb.action, axis);
    std::vector<double> flux(rho_b.size());
    for (std::size_t i = 0; i < flux.size(); ++i) {
      flux[i] = rho_b[i] * ds[i] / before.masses[axis];
    }
    std::vector<double> dflux = gradient_axis(g, flux, axis);
    for (std::size_t i = 0; i < flux.size(); ++i) divergence[i] += dflux[i];
  }

  // Skip a margin near boundaries and near flagged nodes: the stencil depth
  // for the flux divergence of the phase gradient is 4.
  constexpr int kMargin = 4;
  auto valid = [&](int i, int j) {
    if (i < kMargin || i >= g.n[0] - kMargin) return false;
    if (g.dims == 2 && (j < kMargin || j >= g.n[1] - kMargin)) return false;
    const int jlo = g.dims == 2 ? std::max(0, j - kMargin) : 0;
    const int jhi = g.dims == 2 ? std::min(g.n[1] - 1, j + kMargin) : 0;
    for (int ii = i - kMargin; ii <= i + kMargin; ++ii) {
      for (int jj = jlo; jj <= jhi; ++jj) {
        if (pb.nodal[g.index(ii, jj)]) return false;
      }
    }
    return true;
  };

  double worst = 0.0;
  for (int i = 0; i < g.n[0]; ++i) {
    for (int j = 0; j < (g.dims == 2 ? g.n[1] : 1); ++j) {
      if (!valid(i, j)) continue;
      const std::size_t k = g.index(i, j);
      const double r = (rho_a[k] - rho_b[k]) / dt + divergence[k];
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

void SchrodingerStepper::CayleyLine::prepare() {
  const std::size_t n = diag_a.size();
  cp.resize(n);
  inv_d.resize(n);
  Complex d = diag_a[0];
  inv_d[0] = 1.0 / d;
  cp[0] = off_a * inv_d[0];
  for (std::size_t i = 1; i < n; ++i) {
    d = diag_a[i] - off_a * cp[i - 1];
    inv_d[i] = 1.0 / d;
    cp[i] = off_a * inv_d[i];
  }
}

void SchrodingerStepper::CayleyLine::apply(Complex* x, int n,
                                           std::size_t stride,
                                           std::vector<Complex>& gather,
                                           std::vector<Complex>& rhs,
                                           std::vector<Complex>& tmp) const {
  gather.resize(n);
  rhs.resize(n);
  tmp.resize(n);
  for (int i = 0; i < n; ++i) gather[i] = x[i * stride];
  // rhs = B psi (Dirichlet: nothing beyond the ends)
  for (int i = 0; i < n; ++i) {
    Complex v = diag_b[i] * gather[i];
    if (i > 0) v += off_b * gather[i - 1];
    if (i + 1 < n) v += off_b * gather[i + 1];
    rhs[i] = v;
  }
  // solve A x = rhs with the precomputed sweep
  tmp[0] = rhs[0] * inv_d[0];
  for (int i = 1; i < n; ++i) {
    tmp[i] = (rhs[i] - off_a * tmp[i - 1]) * inv_d[i];
  }
  gather[n - 1] = tmp[n - 1];
  for (int i = n - 2; i >= 0; --i) {
    gather[i] = tmp[i] - cp[i] * gather[i + 1];
  }
  for (int i = 0; i < n; ++i) x[i * stride] = gather[i];
}

SchrodingerStepper::SchrodingerStepper(const SpatialGrid& grid,
                                       std::span<const double> potential,
                                       std::span<const double> masses,
                                       double h, double dt)
    : grid_(grid), h_(h), dt_(dt) {
  if (!(dt > 0.0)) throw PreconditionError("stepper needs dt > 0");
  if (!(h > 0.0)) throw ConfigError("h must be positive");
  if (potential.size() != grid.size()) {
    throw ConfigError("potential size does not match grid");
  }
  for (int d = 0; d < grid.dims; ++d) {
    if (!(masses[d] > 0.0)) throw ConfigError("masses must be positive");
  }
  const Complex I(0.0, 1.0);
  if (grid.dims == 1) {
    const double kappa = h * h / (2.0 * masses[0] * grid.dx(0) * grid.dx(0));
    const Complex mu = I * dt / (2.0 * h);
    full_.diag_a.resize(grid.n[0]);
    full_.diag_b.resize(grid.n[0]);
    for (int i = 0; i < grid.n[0]; ++i) {
      const Complex hd = mu * (2.0 * kappa + potential[i]);
      full_.diag_a[i] = 1.0 + hd;
      full_.diag_b[i] = 1.0 - hd;
    }
    full_.off_a = -mu * kappa;
    full_.off_b = mu * kappa;
    full_.prepare();
  } else {
    auto make_kinetic = [&](int axis, double tau) {
      CayleyLine line;
      const double kappa =
          h * h / (2.0 * masses[axis] * grid.dx(axis) * grid.dx(axis));
      const Complex mu = I * tau / (2.0 * h);
      line.diag_a.assign(grid.n[axis], 1.0 + mu * 2.0 * kappa);
      line.diag_b.assign(grid.n[axis], 1.0 - mu * 2.0 * kappa);
      line.off_a = -mu * kappa;
      line.off_b = mu * kappa;
      line.prepare();
      return line;
    };
    axis_half_ = make_kinetic(0, 0.5 * dt);
    axis_full_ = make_kinetic(1, dt);
    phase_half_.resize(grid.size());
    for (std::size_t i = 0; i < phase_half_.size(); ++i) {
      phase_half_[i] = std::exp(-I * potential[i] * (0.5 * dt) / h);
    }
  }
}

void SchrodingerStepper::step(std::vector<Complex>& psi) {
  if (psi.size() != grid_.size()) {
    throw ConfigError("wave size does not match stepper grid");
  }
  if (reference_norm_ < 0.0) {
    std::vector<double> rho(psi.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(psi[i]);
    reference_norm_ = std::sqrt(trapezoid(grid_, rho));
  }
  if (grid_.dims == 1) {
    full_.apply(psi.data(), grid_.n[0], 1, gather_, rhs_, tmp_);
  } else {
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= phase_half_[i];
    for (int j = 0; j < grid_.n[1]; ++j) {
      axis_half_.apply(psi.data() + j, grid_.n[0], grid_.n[1], gather_, rhs_,
                       tmp_);
    }
    for (int i = 0; i < grid_.n[0]; ++i) {
      axis_full_.apply(psi.data() + grid_.index(i, 0), grid_.n[1], 1, gather_,
                       rhs_, tmp_);
    }
    for (int j = 0; j < grid_.n[1]; ++j) {
      axis_half_.apply(psi.data() + j, grid_.n[0], grid_.n[1], gather_, rhs_,
                       tmp_);
    }
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= phase_half_[i];
  }
  ++steps_;

  std::vector<double> rho(psi.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(psi[i]);
  const double norm = std::sqrt(trapezoid(grid_, rho));
  if (!(std::abs(norm - reference_norm_) <= 1e-3 * reference_norm_)) {
    throw NumericError("wave norm drifted beyond 1e-3 after step " +
                       std::to_string(steps_));
  }
}

WaveField evolve_schrodinger(const WaveField& psi, const PotentialGrid& V,
                             double dt, long steps) {
  if (!(V.grid == psi.grid)) {
    throw ConfigError("evolve_schrodinger: potential grid mismatch");
  }
  if (steps < 0) throw PreconditionError("steps must be >= 0");
  if (steps == 0) return psi;
  if (!(dt > 0.0)) throw PreconditionError("evolve_schrodinger needs dt > 0");
  const double n0 = wave_norm(psi);
  if (std::abs(n0 - 1.0) > 1e-6) {
    throw PreconditionError("evolve_schrodinger expects a normalized wave");
  }
  WaveField out = psi;
  SchrodingerStepper stepper(psi.grid, V.values, psi.mass_span(), psi.h, dt);
  for (long k = 0; k < steps; ++k) stepper.step(out.values);
  return out;
}

PotentialGrid sample_potential(const ClassicalPotential& V,
                               const SpatialGrid& grid, double t) {
  PotentialGrid p;
  p.grid = grid;
  p.kind = PotentialKind::Classical;
  p.values.resize(grid.size());
  double point[2];
  for (int i = 0; i < grid.n[0]; ++i) {
    point[0] = grid.coord(0, i);
    for (int j = 0; j < (grid.dims == 2 ? grid.n[1] : 1); ++j) {
      if (grid.dims == 2) point[1] = grid.coord(1, j);
      p.values[grid.index(i, j)] =
          V.value(t, std::span<const double>(point, grid.dims));
    }
  }
  return p;
}

namespace {

template <typename Fn>
WaveField build_wave(const SpatialGrid& grid, std::span<const double> masses,
                     double h, Fn&& value) {
  WaveField w;
  w.grid = grid;
  w.h = h;
  for (int d = 0; d < grid.dims; ++d) w.masses[d] = masses[d];
  w.values.resize(grid.size());
  double point[2];
  for (int i = 0; i < grid.n[0]; ++i) {
    point[0] = grid.coord(0, i);
    for (int j = 0; j < (grid.dims == 2 ? grid.n[1] : 1); ++j) {
      if (grid.dims == 2) point[1] = grid.coord(1, j);
      w.values[grid.index(i, j)] =
          value(std::span<const double>(point, grid.dims));
    }
  }
  return normalized(std::move(w));
}

}  // namespace

WaveField make_gaussian_wave(const SpatialGrid& grid,
                             std::span<const double> masses, double h,
                             std::span<const double> center,
                             std::span<const double> sigma,
                             std::span<const double> momentum) {
  const Complex I(0.0, 1.0);
  return build_wave(grid, masses, h, [&](std::span<const double> q) {
    double expo = 0.0;
    double phase = 0.0;
    for (int d = 0; d < grid.dims; ++d) {
      const double z = q[d] - center[d];
      expo -= z * z / (4.0 * sigma[d] * sigma[d]);
      if (!momentum.empty()) phase += momentum[d] * q[d] / h;
    }
    return std::exp(expo) * std::exp(I * phase);
  });
}

WaveField make_polynomial_wave(const SpatialGrid& grid,
                               std::span<const double> masses, double h,
                               PolynomialAmplitude family, double param) {
  if (grid.dims != 1) {
    throw ConfigError("polynomial amplitude families are one-dimensional");
  }
  return build_wave(grid, masses, h, [&](std::span<const double> q) {
    const double x = q[0];
    switch (family) {
      case PolynomialAmplitude::QuadraticPlusD:
        return Complex(x * x + param, 0.0);
      case PolynomialAmplitude::QuarticPlusB:
        return Complex(x * x * x * x + param, 0.0);
      case PolynomialAmplitude::ShiftedSquareGaussian:
        return Complex((x + 1.0) * (x + 1.0) * std::exp(-0.5 * x * x), 0.0);
    }
    return Complex(0.0, 0.0);
  });
}

WaveField make_constant_wave(const SpatialGrid& grid,
                             std::span<const double> masses, double h) {
  return build_wave(grid, masses, h,
                    [](std::span<const double>) { return Complex(1.0, 0.0); });
}

WaveField make_entangled_wave(const SpatialGrid& grid,
                              std::span<const double> masses, double h,
                              double coupling) {
  if (grid.dims != 2) throw ConfigError("entangled wave needs a 2D grid");
  const Complex I(0.0, 1.0);
  return build_wave(grid, masses, h, [&](std::span<const double> q) {
    return std::exp(I * coupling * q[0] * q[1] / h) *
           std::exp(-(q[0] * q[0] + q[1] * q[1]));
  });
}

WaveField make_harmonic_ground_state(const SpatialGrid& grid, double mass,
                                     double h, double spring) {
  if (grid.dims != 1) throw ConfigError("harmonic ground state is 1D here");
  const double alpha = std::sqrt(mass * spring / 2.0) / h;
  const double m[1] = {mass};
  return build_wave(grid, std::span<const double>(m, 1), h,
                    [&](std::span<const double> q) {
                      return Complex(std::exp(-alpha * q[0] * q[0]), 0.0);
                    });
}

WaveField make_two_bump_wave(const SpatialGrid& grid,
                             std::span<const double> masses, double h,
                             double separation, double sigma, double a1,
                             double a2) {
  if (grid.dims != 1) throw ConfigError("two-bump wave is one-dimensional");
  return build_wave(grid, masses, h, [&](std::span<const double> q) {
    const double xm = q[0] + 0.5 * separation;
    const double xp = q[0] - 0.5 * separation;
    return Complex(a1 * std::exp(-xm * xm / (2.0 * sigma * sigma)) +
                       a2 * std::exp(-xp * xp / (2.0 * sigma * sigma)),
                   0.0);
  });
}

}  // namespace pilotwave
