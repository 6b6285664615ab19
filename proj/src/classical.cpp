#include "pilotwave/classical.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace pilotwave {

namespace {

std::string point_to_string(std::span<const double> q) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) os << ", ";
    os << q[i];
  }
  os << ")";
  return os.str();
}

}  // namespace

FinancialMass::FinancialMass(std::vector<double> masses) : m(std::move(masses)) {
  if (m.empty()) throw ConfigError("financial mass vector is empty");
  for (double v : m) {
    if (!(v > 0.0)) throw ConfigError("financial mass must be positive");
  }
}

std::vector<double> Trajectory::component(int d) const {
  std::vector<double> out(samples());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = q_at(k, d);
  return out;
}

ClassicalPotential ClassicalPotential::zero() {
  ClassicalPotential v;
  v.kind_ = Kind::Zero;
  return v;
}

ClassicalPotential ClassicalPotential::quadratic() {
  ClassicalPotential v;
  v.kind_ = Kind::Quadratic;
  return v;
}

ClassicalPotential ClassicalPotential::pairwise_spread() {
  ClassicalPotential v;
  v.kind_ = Kind::PairwiseSpread;
  return v;
}

ClassicalPotential ClassicalPotential::tabulated(SpatialGrid grid,
                                                 std::vector<double> values) {
  if (values.size() != grid.size()) {
    throw ConfigError("tabulated potential size does not match grid");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("tabulated potential has non-finite values");
  }
  ClassicalPotential v;
  v.kind_ = Kind::Tabulated;
  v.grid_ = grid;
  v.table_ = std::move(values);
  for (int d = 0; d < grid.dims; ++d) {
    v.grad_[d] = gradient_axis(grid, v.table_, d);
  }
  return v;
}

ClassicalPotential ClassicalPotential::time_dependent(
    ClassicalPotential base, std::function<double(double)> scale,
    std::function<double(double)> shift) {
  if (!scale && !shift) {
    throw ConfigError("time-dependent potential needs a scale or shift schedule");
  }
  ClassicalPotential v;
  v.kind_ = Kind::TimeDependent;
  v.base_ = std::make_shared<ClassicalPotential>(std::move(base));
  v.scale_ = std::move(scale);
  v.shift_ = std::move(shift);
  return v;
}

double ClassicalPotential::value(double t, std::span<const double> q) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Quadratic: {
      double s = 0.0;
      for (double x : q) s += x * x;
      return s;
    }
    case Kind::PairwiseSpread: {
      double s = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) {
        for (std::size_t j = i + 1; j < q.size(); ++j) {
          const double d = q[i] - q[j];
          s += d * d;
        }
      }
      return s;
    }
    case Kind::Tabulated: {
      if (!grid_.contains(q)) {
        throw DomainError("tabulated potential evaluated outside its grid at " +
                          point_to_string(q));
      }
      return interpolate(grid_, table_, q);
    }
    case Kind::TimeDependent: {
      const double s = scale_ ? scale_(t) : 1.0;
      const double c = shift_ ? shift_(t) : 0.0;
      return s * base_->value(t, q) + c;
    }
  }
  return 0.0;
}

void ClassicalPotential::force(double t, std::span<const double> q,
                               std::span<double> out) const {
  switch (kind_) {
    case Kind::Zero:
      for (auto& f : out) f = 0.0;
      return;
    case Kind::Quadratic:
      for (std::size_t j = 0; j < q.size(); ++j) out[j] = -2.0 * q[j];
      return;
    case Kind::PairwiseSpread: {
      // -dV/dq_k = -2 sum_{j != k} (q_k - q_j)
      double total = 0.0;
      for (double x : q) total += x;
      const double n = static_cast<double>(q.size());
      for (std::size_t k = 0; k < q.size(); ++k) {
        out[k] = -2.0 * (n * q[k] - total);
      }
      return;
    }
    case Kind::Tabulated: {
      if (!grid_.contains(q)) {
        throw DomainError("tabulated potential evaluated outside its grid at " +
                          point_to_string(q));
      }
      for (int d = 0; d < grid_.dims; ++d) {
        out[d] = -interpolate(grid_, grad_[d], q);
      }
      return;
    }
    case Kind::TimeDependent: {
      base_->force(t, q, out);
      const double s = scale_ ? scale_(t) : 1.0;
      for (auto& f : out) f *= s;  // shift has no gradient
      return;
    }
  }
}

std::string ClassicalPotential::tag() const {
  switch (kind_) {
    case Kind::Zero: return "zero";
    case Kind::Quadratic: return "quadratic";
    case Kind::PairwiseSpread: return "pairwise-spread";
    case Kind::Tabulated: return "tabulated";
    case Kind::TimeDependent: return "time-dependent(" + base_->tag() + ")";
  }
  return "?";
}

double financial_energy(const MarketState& s, const FinancialMass& m,
                        const ClassicalPotential& V) {
  if (s.q.size() != s.p.size() || s.q.size() != m.m.size()) {
    throw ConfigError("state and mass dimensions disagree");
  }
  double kinetic = 0.0;
  for (std::size_t j = 0; j < s.p.size(); ++j) {
    kinetic += 0.5 * s.p[j] * s.p[j] / m.m[j];
  }
  return kinetic + V.value(s.t, s.q);
}

MarketState hamiltonian_step(const MarketState& s, const FinancialMass& m,
                             const ClassicalPotential& V, double dt) {
  if (s.q.size() != s.p.size() || s.q.size() != m.m.size()) {
    throw ConfigError("state and mass dimensions disagree");
  }
  MarketState next = s;
  const double t_mid = s.t + 0.5 * dt;
  std::vector<double> scratch;
  leapfrog_kdk(next.q, next.p, m.m, t_mid, dt, scratch,
               [&](double t, std::span<const double> q, std::span<double> f) {
                 V.force(t, q, f);
               });
  next.t = s.t + dt;
  return next;
}

Trajectory integrate(MarketState s, const FinancialMass& m,
                     const ClassicalPotential& V, double dt, long steps,
                     int record_stride) {
  if (!(dt > 0.0)) throw PreconditionError("integrate needs dt > 0");
  if (record_stride < 1) throw PreconditionError("record stride must be >= 1");
  const int dims = static_cast<int>(s.q.size());
  Trajectory traj;
  traj.dims = dims;
  auto record = [&]() {
    traj.times.push_back(s.t);
    traj.q.insert(traj.q.end(), s.q.begin(), s.q.end());
    traj.p.insert(traj.p.end(), s.p.begin(), s.p.end());
  };
  record();
  std::vector<double> scratch;
  for (long k = 0; k < steps; ++k) {
    const double t_mid = s.t + 0.5 * dt;
    leapfrog_kdk(s.q, s.p, m.m, t_mid, dt, scratch,
                 [&](double t, std::span<const double> q, std::span<double> f) {
                   V.force(t, q, f);
                 });
    s.t += dt;
    if ((k + 1) % record_stride == 0 || k + 1 == steps) record();
  }
  return traj;
}

std::vector<double> newton_force(const ClassicalPotential& V,
                                 std::span<const double> q, double t) {
  std::vector<double> f(q.size());
  V.force(t, q, f);
  return f;
}

MassSchedule MassSchedule::constant(std::vector<double> m) {
  FinancialMass check(m);  // reuse positivity validation
  MassSchedule s;
  s.kind_ = Kind::Constant;
  s.m0_ = std::move(m);
  s.floor_.assign(s.m0_.size(), 0.0);
  for (std::size_t d = 0; d < s.m0_.size(); ++d) s.floor_[d] = s.m0_[d];
  return s;
}

MassSchedule MassSchedule::deterministic(
    std::vector<std::function<double(double)>> m_of_t,
    std::vector<double> floor) {
  if (m_of_t.empty() || m_of_t.size() != floor.size()) {
    throw ConfigError("mass schedule dimensions disagree");
  }
  for (double f : floor) {
    if (!(f > 0.0)) throw ContractError("mass floor must be positive");
  }
  MassSchedule s;
  s.kind_ = Kind::Deterministic;
  s.fn_ = std::move(m_of_t);
  s.floor_ = std::move(floor);
  return s;
}

MassSchedule MassSchedule::log_gaussian(std::vector<double> m0,
                                        std::vector<double> volatility,
                                        std::vector<double> floor) {
  if (m0.empty() || m0.size() != volatility.size() ||
      m0.size() != floor.size()) {
    throw ConfigError("mass schedule dimensions disagree");
  }
  for (std::size_t d = 0; d < m0.size(); ++d) {
    if (!(floor[d] > 0.0)) throw ContractError("mass floor must be positive");
    if (!(m0[d] >= floor[d])) throw ContractError("initial mass below floor");
  }
  MassSchedule s;
  s.kind_ = Kind::LogGaussian;
  s.m0_ = std::move(m0);
  s.vol_ = std::move(volatility);
  s.floor_ = std::move(floor);
  return s;
}

std::vector<double> MassSchedule::evaluate_deterministic(double t) const {
  std::vector<double> m(fn_.size());
  for (std::size_t d = 0; d < fn_.size(); ++d) {
    m[d] = fn_[d](t);
    if (m[d] < floor_[d]) {
      throw ContractError("mass schedule dipped below its floor at t=" +
                          std::to_string(t));
    }
  }
  return m;
}

MassSchedule::Sampler MassSchedule::sampler(double t0) const {
  Sampler s;
  s.schedule_ = this;
  s.t_ = t0;
  switch (kind_) {
    case Kind::Constant:
      s.current_ = m0_;
      break;
    case Kind::Deterministic:
      s.current_ = evaluate_deterministic(t0);
      break;
    case Kind::LogGaussian:
      s.current_ = m0_;
      s.brownian_.assign(m0_.size(), 0.0);
      break;
  }
  return s;
}

void MassSchedule::Sampler::advance(double dt, RngStream& rng) {
  t_ += dt;
  switch (schedule_->kind_) {
    case Kind::Constant:
      return;
    case Kind::Deterministic:
      current_ = schedule_->evaluate_deterministic(t_);
      return;
    case Kind::LogGaussian: {
      const double sqdt = std::sqrt(dt);
      for (std::size_t d = 0; d < current_.size(); ++d) {
        brownian_[d] += sqdt * rng.normal();
        const double vol = schedule_->vol_[d];
        const double m = schedule_->m0_[d] *
                         std::exp(vol * brownian_[d] - 0.5 * vol * vol * t_);
        current_[d] = std::max(schedule_->floor_[d], m);
      }
      return;
    }
  }
}

}  // namespace pilotwave
