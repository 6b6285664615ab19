#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pilotwave/errors.hpp"
#include "pilotwave/grid.hpp"
#include "pilotwave/rng.hpp"

namespace pilotwave {

/// A point in the price phase space: prices q, price momenta p, model time.
struct MarketState {
  std::vector<double> q;
  std::vector<double> p;
  double t = 0.0;
};

/// Emission volumes per asset. Strictly positive.
struct FinancialMass {
  std::vector<double> m;

  explicit FinancialMass(std::vector<double> masses);
  int dims() const { return static_cast<int>(m.size()); }
};

/// Time-stamped samples of one realization. q and p are row-major
/// (sample, dimension); p may be empty for first-order dynamics.
/// Extra channels (volatility, mass, capitalization) ride along by name.
struct Trajectory {
  int dims = 1;
  std::vector<double> times;
  std::vector<double> q;
  std::vector<double> p;
  std::vector<std::string> extra_names;
  std::vector<double> extra;

  std::size_t samples() const { return times.size(); }
  double q_at(std::size_t k, int d) const { return q[k * dims + d]; }
  double p_at(std::size_t k, int d) const { return p[k * dims + d]; }
  std::vector<double> component(int d) const;
};

/// Classical ("hard") financial potential. Closed-form variants carry
/// analytic gradients; tabulated values live on a grid and differentiate
/// numerically; any variant can be modulated by a time schedule.
class ClassicalPotential {
 public:
  enum class Kind { Zero, Quadratic, PairwiseSpread, Tabulated, TimeDependent };

  static ClassicalPotential zero();
  static ClassicalPotential quadratic();        // V = sum q_j^2
  static ClassicalPotential pairwise_spread();  // V = sum_{i<j} (q_i - q_j)^2
  static ClassicalPotential tabulated(SpatialGrid grid,
                                      std::vector<double> values);
  static ClassicalPotential time_dependent(
      ClassicalPotential base, std::function<double(double)> scale,
      std::function<double(double)> shift = {});

  double value(double t, std::span<const double> q) const;
  void force(double t, std::span<const double> q, std::span<double> out) const;

  Kind kind() const { return kind_; }
  std::string tag() const;

 private:
  ClassicalPotential() = default;

  Kind kind_ = Kind::Zero;
  // tabulated
  SpatialGrid grid_;
  std::vector<double> table_;
  std::array<std::vector<double>, 2> grad_;
  // time-dependent
  std::shared_ptr<const ClassicalPotential> base_;
  std::function<double(double)> scale_;
  std::function<double(double)> shift_;
};

/// H = (1/2) sum p_j^2 / m_j + V(t, q).
double financial_energy(const MarketState& s, const FinancialMass& m,
                        const ClassicalPotential& V);

/// One kick-drift-kick leapfrog step. Time-dependent potentials are
/// evaluated at the step midpoint, which keeps the step reversible.
MarketState hamiltonian_step(const MarketState& s, const FinancialMass& m,
                             const ClassicalPotential& V, double dt);

Trajectory integrate(MarketState s, const FinancialMass& m,
                     const ClassicalPotential& V, double dt, long steps,
                     int record_stride = 1);

/// f_j = -dV/dq_j.
std::vector<double> newton_force(const ClassicalPotential& V,
                                 std::span<const double> q, double t = 0.0);

/// Shared leapfrog kernel. force(t, q, out) fills the force vector; both
/// kicks see the same t (midpoint convention handled by the caller).
template <typename ForceFn>
void leapfrog_kdk(std::vector<double>& q, std::vector<double>& p,
                  std::span<const double> m, double t_mid, double dt,
                  std::vector<double>& scratch, ForceFn&& force) {
  const std::size_t n = q.size();
  scratch.resize(n);
  force(t_mid, std::span<const double>(q), std::span<double>(scratch));
  for (std::size_t i = 0; i < n; ++i) p[i] += 0.5 * dt * scratch[i];
  for (std::size_t i = 0; i < n; ++i) q[i] += dt * p[i] / m[i];
  force(t_mid, std::span<const double>(q), std::span<double>(scratch));
  for (std::size_t i = 0; i < n; ++i) p[i] += 0.5 * dt * scratch[i];
}

/// Per-asset financial mass over time: constant, a deterministic schedule,
/// or a log-Gaussian random path. All variants honor a hard floor > 0;
/// random paths are clamped to it, deterministic schedules that dip below
/// it are a contract violation.
class MassSchedule {
 public:
  enum class Kind { Constant, Deterministic, LogGaussian };

  static MassSchedule constant(std::vector<double> m);
  static MassSchedule deterministic(
      std::vector<std::function<double(double)>> m_of_t,
      std::vector<double> floor);
  static MassSchedule log_gaussian(std::vector<double> m0,
                                   std::vector<double> volatility,
                                   std::vector<double> floor);

  Kind kind() const { return kind_; }
  int dims() const { return static_cast<int>(floor_.size()); }
  bool stochastic() const { return kind_ == Kind::LogGaussian; }

  /// Per-realization evaluator; random paths advance with the caller's
  /// stream so distinct realizations stay independent.
  class Sampler {
   public:
    void advance(double dt, RngStream& rng);
    double at(int d) const { return current_[d]; }
    std::span<const double> current() const { return current_; }
    double time() const { return t_; }

   private:
    friend class MassSchedule;
    const MassSchedule* schedule_ = nullptr;
    double t_ = 0.0;
    std::vector<double> current_;
    std::vector<double> brownian_;
  };

  Sampler sampler(double t0 = 0.0) const;

 private:
  MassSchedule() = default;
  std::vector<double> evaluate_deterministic(double t) const;

  Kind kind_ = Kind::Constant;
  std::vector<double> m0_;
  std::vector<double> floor_;
  std::vector<double> vol_;
  std::vector<std::function<double(double)>> fn_;
};

}  // namespace pilotwave
