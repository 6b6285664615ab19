#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pilotwave/bohm.hpp"
#include "pilotwave/classical.hpp"
#include "pilotwave/rng.hpp"
#include "pilotwave/wave.hpp"

namespace pilotwave {

/// Wiener increments, Normal(0, dt), laid out (step, dimension).
std::vector<double> wiener_increments(int dims, double dt, long steps,
                                      std::uint64_t seed);

/// Geometric Brownian motion S_t = S0 exp((u - v^2/2) t + v w_t) sampled on
/// the uniform mesh via the exact solution (no discretization bias). The
/// Euler mode S_{k+1} = S_k (1 + u dt + v dW) exists for method-error
/// studies. Returns steps+1 values starting at S0.
std::vector<double> gbm_path(double s0, double u, double v, double dt,
                             long steps, std::uint64_t seed,
                             bool euler = false);

/// Stochastic-volatility model: the log-variance D = ln sigma^2 follows
/// dD = alpha(t, D) dt + b(t, D) dW^vol, the price follows
/// dq = q (mu(t, q, sigma) dt + sigma dW^price), with independent drivers.
struct SvModel {
  std::function<double(double, double, double)> mu;  // (t, q, sigma)
  std::function<double(double, double)> alpha;       // (t, D)
  std::function<double(double, double)> b;           // (t, D)
  double sigma0 = 0.2;
};

/// Constant drift plus mean-reverting log-variance d D = kappa (theta - D) dt
/// + b dW. theta and the initial point are expressed through sigma levels.
SvModel mean_reverting_sv(double mu, double kappa, double theta_sigma,
                          double b, double sigma0);

struct SvPath {
  std::vector<double> times, price, sigma, log_var;
};

/// Volatility first, then the price: Euler-Maruyama for the log-variance,
/// log-Euler for the price using the volatility at the start of each step.
SvPath stochastic_volatility_path(double q0, const SvModel& model, double dt,
                                  long steps, std::uint64_t seed);

/// Guidance drift plus additive Wiener velocity noise, dq = (dS/dq / m) dt
/// + sigma dW, with the wave advanced once per step and shared across the
/// ensemble. Zero noise reproduces an Euler guidance run exactly.
EnsembleResult bohm_vigier_ensemble(const WaveField& psi0,
                                    const ClassicalPotential& V,
                                    BohmianConfig cfg, NoiseProcess noise,
                                    int count, std::uint64_t seed, long steps);

/// Initial-condition law for ensembles.
struct RandomInitials {
  enum class Kind { PointMass, Gaussian, Born };
  Kind kind = Kind::PointMass;
  std::vector<double> q0, p0;            // point / mean
  std::vector<double> q_sigma, p_sigma;  // gaussian spreads
};

/// Draws for an initial-condition law. Born draws need the wave.
std::vector<std::vector<double>> draw_initial_positions(
    const RandomInitials& initials, const WaveField* wave, int count, int dims,
    std::uint64_t seed);
std::vector<std::vector<double>> draw_initial_momenta(
    const RandomInitials& initials, int count, int dims, std::uint64_t seed);

enum class DynamicsKind { Classical, BohmNewton, Guidance, BohmVigier };

/// Everything needed to run one family of dynamics over an ensemble.
struct DynamicsSpec {
  DynamicsKind kind = DynamicsKind::Classical;
  ClassicalPotential potential = ClassicalPotential::zero();
  std::vector<double> masses{1.0};
  std::optional<WaveField> wave;  // required for the quantum kinds
  BohmianConfig bohm;
  NoiseProcess noise;
  std::optional<MassSchedule> mass_schedule;
  double dt = 1e-3;
  long steps = 1000;
  int record_stride = 1;
};

/// Independent draws of (q0, p0), shared wave evolution where applicable;
/// per-time mean and dispersion reported as they come (no stationarity
/// assumed).
EnsembleResult random_initial_ensemble(const RandomInitials& initials,
                                       const DynamicsSpec& dynamics, int count,
                                       std::uint64_t seed);

/// Second-order dynamics with time-varying (possibly random) financial
/// mass; trajectories carry the mass and market capitalization series.
EnsembleResult random_mass_ensemble(const MassSchedule& schedule,
                                    const DynamicsSpec& dynamics,
                                    const RandomInitials& initials, int count,
                                    std::uint64_t seed);

}  // namespace pilotwave
