#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "pilotwave/classical.hpp"
#include "pilotwave/errors.hpp"
#include "pilotwave/grid.hpp"

namespace pilotwave {

using Complex = std::complex<double>;

/// The pilot wave: complex amplitude on a grid plus the financial masses
/// and the price scaling constant h that fix how it evolves and how it
/// steers prices.
struct WaveField {
  SpatialGrid grid;
  std::vector<Complex> values;
  std::array<double, 2> masses{1.0, 1.0};
  double h = 1.0;

  std::span<const double> mass_span() const {
    return {masses.data(), static_cast<std::size_t>(grid.dims)};
  }
};

/// Amplitude/phase split psi = R exp(i S / h). S is unwrapped per grid line
/// from the domain center outward and gauge-fixed so S(center) lies in
/// [0, 2 pi h). Nodes with R below the floor are flagged; their phase and
/// anything derived from it is unreliable.
struct PolarDecomposition {
  SpatialGrid grid;
  std::vector<double> amplitude;  // R >= 0
  std::vector<double> action;     // S
  std::vector<std::uint8_t> nodal;
  double floor = 0.0;
  double h = 1.0;
};

enum class PotentialKind { Classical, Quantum };

/// Scalar financial-energy field on a grid. Quantum potentials carry the
/// nodal mask of the decomposition they came from.
struct PotentialGrid {
  SpatialGrid grid;
  std::vector<double> values;
  PotentialKind kind = PotentialKind::Classical;
  std::vector<std::uint8_t> mask;
};

/// Per-axis components of a grid vector field (forces, phase gradients).
struct VectorFieldGrid {
  SpatialGrid grid;
  std::array<std::vector<double>, 2> comp;
  std::vector<std::uint8_t> mask;
};

/// Relative amplitude floor used to flag nodal regions.
inline constexpr double kNodalFloorRel = 1e-6;

double wave_norm(const WaveField& w);
WaveField normalized(WaveField w);

PolarDecomposition polar_decompose(const WaveField& w,
                                   double floor_rel = kNodalFloorRel);

/// U = - sum_j (h^2 / 2 m_j) (1/R) d^2R/dq_j^2. At flagged nodes the
/// denominator is floored, so the value stays finite and the flag rides
/// along in the output mask.
PotentialGrid quantum_potential(const PolarDecomposition& d,
                                std::span<const double> masses, double h);

/// g_j = -dU/dq_j on the grid.
VectorFieldGrid mental_force(const PotentialGrid& U);

/// Per-axis dS/dq_j of the unwrapped phase action, for guidance velocities.
VectorFieldGrid phase_gradient(const PolarDecomposition& d);

/// Max-node residual of d(R^2)/dt + sum_j (1/m_j) d/dq_j (R^2 dS/dq_j),
/// forward in time and centered in space. Solver health check: small for
/// an accurate evolution, O(dx^2 + dt) otherwise.
double continuity_residual(const WaveField& before, const WaveField& after,
                           double dt);

/**
 * Norm-preserving propagator for i h dpsi/dt = -sum_j (h^2/2 m_j)
 * d^2psi/dq_j^2 + V psi with homogeneous Dirichlet boundaries.
 *
 * Each sub-step applies a Cayley transform (1 + i tau H / 2h)^{-1}
 * (1 - i tau H / 2h), which is exactly unitary for Hermitian H, so the
 * grid norm is conserved to solver roundoff regardless of dt. In 1D the
 * full Hamiltonian goes into one tridiagonal solve; in 2D the kinetic
 * terms are Strang-split per axis around pointwise potential phases,
 * which costs O(dt^2) accuracy but keeps every factor unitary.
 */
class SchrodingerStepper {
 public:
  SchrodingerStepper(const SpatialGrid& grid, std::span<const double> potential,
                     std::span<const double> masses, double h, double dt);

  /// Advance psi by one dt in place. Throws NumericError if the grid norm
  /// drifts by more than 1e-3 relative to the first call.
  void step(std::vector<Complex>& psi);

  double dt() const { return dt_; }
  long steps_taken() const { return steps_; }

 private:
  struct CayleyLine {
    std::vector<Complex> diag_a, diag_b;
    Complex off_a, off_b;
    std::vector<Complex> cp, inv_d;
    void prepare();
    void apply(Complex* x, int n, std::size_t stride,
               std::vector<Complex>& gather, std::vector<Complex>& rhs,
               std::vector<Complex>& tmp) const;
  };

  SpatialGrid grid_;
  double h_ = 1.0;
  double dt_ = 0.0;
  long steps_ = 0;
  double reference_norm_ = -1.0;
  CayleyLine full_;               // 1D: kinetic + potential
  CayleyLine axis_half_, axis_full_;  // 2D kinetic sub-steps
  std::vector<Complex> phase_half_;   // 2D potential phases
  mutable std::vector<Complex> gather_, rhs_, tmp_;
};

/// Evolve for `steps` uniform steps of size dt and return the final field.
/// steps = 0 returns the input unchanged.
WaveField evolve_schrodinger(const WaveField& psi, const PotentialGrid& V,
                             double dt, long steps);

/// Classical potential sampled on a grid (for driving the wave evolution).
PotentialGrid sample_potential(const ClassicalPotential& V,
                               const SpatialGrid& grid, double t = 0.0);

// --- Initial wave families -------------------------------------------------

/// Normalized Gaussian packet exp(-(q-c)^2 / 4 sigma^2) exp(i k.q / h);
/// sigma is the position spread of |psi|^2.
WaveField make_gaussian_wave(const SpatialGrid& grid,
                             std::span<const double> masses, double h,
                             std::span<const double> center,
                             std::span<const double> sigma,
                             std::span<const double> momentum = {});

enum class PolynomialAmplitude {
  QuadraticPlusD,         // R = q^2 + d
  QuarticPlusB,           // R = q^4 + b
  ShiftedSquareGaussian,  // R = (q+1)^2 exp(-q^2/2), amplitude zero at q=-1
};

WaveField make_polynomial_wave(const SpatialGrid& grid,
                               std::span<const double> masses, double h,
                               PolynomialAmplitude family, double param = 1.0);

/// Flat amplitude over the whole grid (no behavioral force anywhere).
WaveField make_constant_wave(const SpatialGrid& grid,
                             std::span<const double> masses, double h);

/// Two-asset wave c exp(i coupling q1 q2 / h) exp(-(q1^2 + q2^2)); its
/// amplitude factorizes but its phase couples the assets.
WaveField make_entangled_wave(const SpatialGrid& grid,
                              std::span<const double> masses, double h,
                              double coupling = 1.0);

/// Stationary state of V = spring q^2 for one asset of mass m:
/// exp(-alpha q^2) with alpha = sqrt(m spring / 2) / h.
WaveField make_harmonic_ground_state(const SpatialGrid& grid, double mass,
                                     double h, double spring = 1.0);

/// Superposition of two Gaussian bumps (for sampling tests and demos).
WaveField make_two_bump_wave(const SpatialGrid& grid,
                             std::span<const double> masses, double h,
                             double separation, double sigma, double a1,
                             double a2);

}  // namespace pilotwave
