#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pilotwave/classical.hpp"
#include "pilotwave/grid.hpp"
#include "pilotwave/rng.hpp"
#include "pilotwave/wave.hpp"

namespace pilotwave {

enum class CouplingMode { BohmNewton, Guidance };
enum class WaveDynamics { Schrodinger, Static };
enum class DriftScheme { Midpoint, Euler };

struct BohmianConfig {
  CouplingMode mode = CouplingMode::BohmNewton;
  WaveDynamics wave_dynamics = WaveDynamics::Schrodinger;
  /// Guidance integrator. Midpoint is the default; Euler matches the
  /// Euler-Maruyama drift used when velocity noise is on, so a zero-noise
  /// stochastic run reproduces a guidance run exactly.
  DriftScheme guidance_scheme = DriftScheme::Midpoint;
  InterpOrder interp = InterpOrder::Linear;
  double dt = 1e-3;
  int record_stride = 1;
  /// Second-order runs start from p0 = dS/dq(q0) unless a momentum is
  /// supplied explicitly.
  bool momentum_from_phase = true;
  bool store_trajectories = true;
  int threads = 1;
};

/// Ensemble output: per-time moments always, trajectories when asked for.
struct EnsembleResult {
  int dims = 1;
  std::vector<double> times;
  std::vector<double> mean;        // times x dims
  std::vector<double> dispersion;  // times x dims, unbiased
  std::vector<Trajectory> trajectories;
  std::vector<double> final_positions;  // count x dims
  int count = 0;
  int terminated = 0;
  long nodal_hits = 0;

  double mean_at(std::size_t k, int d) const { return mean[k * dims + d]; }
  double dispersion_at(std::size_t k, int d) const {
    return dispersion[k * dims + d];
  }
};

/**
 * Price trajectories steered by a shared pilot wave.
 *
 * Each step advances the wave once (unless it is held static), refreshes
 * the quantum potential, mental force and phase gradient on the grid, and
 * then moves every particle with those fields frozen. Particles never react
 * back on the wave. A particle that leaves the grid is terminated (the run
 * continues for the others); a particle whose interpolation cell touches a
 * flagged nodal node uses the regularized field values and the event is
 * counted.
 */
class BohmianRun {
 public:
  BohmianRun(WaveField psi0, ClassicalPotential V, BohmianConfig cfg);

  /// Velocity noise (guidance mode only). Per-particle streams are derived
  /// from (seed, particle index).
  void set_noise(NoiseProcess noise, std::uint64_t seed);

  /// Per-asset mass over time for second-order dynamics; per-particle
  /// random mass paths are derived from (seed, particle index).
  void set_mass_schedule(MassSchedule schedule, std::uint64_t seed);

  /// Adds a particle at q0. Without p0 the guidance momentum dS/dq(q0) is
  /// used when momentum_from_phase is set, zero otherwise.
  void add_particle(std::span<const double> q0,
                    std::span<const double> p0 = {});

  void step();
  EnsembleResult run(long steps);

  double time() const { return t_; }
  const WaveField& wave() const { return psi_; }
  const PolarDecomposition& polar() const { return polar_; }
  const PotentialGrid& quantum_potential_grid() const { return U_; }
  const VectorFieldGrid& mental_force_grid() const { return force_; }
  const VectorFieldGrid& phase_gradient_grid() const { return grad_s_; }

 private:
  struct Particle {
    std::vector<double> q, p;
    bool alive = true;
    double exit_time = std::numeric_limits<double>::quiet_NaN();
    long nodal_hits = 0;
    RngStream noise;
    RngStream mass_rng;
    MassSchedule::Sampler mass;
  };

  void refresh_fields();
  void advance_particle(Particle& pt);

  WaveField psi_;
  ClassicalPotential V_;
  BohmianConfig cfg_;
  std::optional<SchrodingerStepper> stepper_;
  PolarDecomposition polar_;
  PotentialGrid U_;
  VectorFieldGrid force_;
  VectorFieldGrid grad_s_;
  NoiseProcess noise_;
  std::uint64_t noise_seed_ = 0;
  std::optional<MassSchedule> mass_schedule_;
  std::uint64_t mass_seed_ = 0;
  std::vector<Particle> particles_;
  double t_ = 0.0;
};

/// Draws i.i.d. positions from the grid density |psi|^2: inverse CDF on the
/// trapezoid-integrated density in 1D, marginal-then-conditional in 2D.
/// psi must be normalized.
std::vector<std::vector<double>> sample_born(const WaveField& psi, int count,
                                             std::uint64_t seed);

/// Ensemble with Born-sampled initial positions under a shared wave.
EnsembleResult run_ensemble(const WaveField& psi0, const ClassicalPotential& V,
                            const BohmianConfig& cfg, int count,
                            std::uint64_t seed, long steps);

}  // namespace pilotwave
