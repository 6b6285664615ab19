#include "pilotwave/stochastic.hpp"

#include <cmath>
#include <utility>

namespace pilotwave {

std::vector<double> wiener_increments(int dims, double dt, long steps,
                                      std::uint64_t seed) {
  if (!(dt > 0.0)) throw PreconditionError("wiener_increments needs dt > 0");
  if (dims < 1) throw PreconditionError("wiener_increments needs dims >= 1");
  if (steps < 0) throw PreconditionError("steps must be >= 0");
  std::vector<double> inc(static_cast<std::size_t>(steps) * dims);
  RngStream rng(seed, 0);
  const double sd = std::sqrt(dt);
  for (auto& v : inc) v = sd * rng.normal();
  return inc;
}

std::vector<double> gbm_path(double s0, double u, double v, double dt,
                             long steps, std::uint64_t seed, bool euler) {
  if (!(s0 > 0.0)) throw PreconditionError("gbm_path needs S0 > 0");
  if (!(dt > 0.0)) throw PreconditionError("gbm_path needs dt > 0");
  std::vector<double> path(steps + 1);
  path[0] = s0;
  RngStream rng(seed, 0);
  const double sd = std::sqrt(dt);
  if (euler) {
    for (long k = 0; k < steps; ++k) {
      path[k + 1] = path[k] * (1.0 + u * dt + v * sd * rng.normal());
    }
    return path;
  }
  double w = 0.0;
  for (long k = 0; k < steps; ++k) {
    w += sd * rng.normal();
    const double t = (k + 1) * dt;
    path[k + 1] = s0 * std::exp((u - 0.5 * v * v) * t + v * w);
  }
  return path;
}

SvModel mean_reverting_sv(double mu, double kappa, double theta_sigma,
                          double b, double sigma0) {
  SvModel m;
  const double theta = std::log(theta_sigma * theta_sigma);
  m.mu = [mu](double, double, double) { return mu; };
  m.alpha = [kappa, theta](double, double d) { return kappa * (theta - d); };
  m.b = [b](double, double) { return b; };
  m.sigma0 = sigma0;
  return m;
}

SvPath stochastic_volatility_path(double q0, const SvModel& model, double dt,
                                  long steps, std::uint64_t seed) {
  if (!(q0 > 0.0)) throw PreconditionError("needs q0 > 0");
  if (!(dt > 0.0)) throw PreconditionError("needs dt > 0");
  if (!model.mu || !model.alpha || !model.b) {
    throw ConfigError("stochastic volatility model is incomplete");
  }
  // independent drivers: one stream for the price, one for the volatility
  RngStream price_rng(seed, 0);
  RngStream vol_rng(seed, 1);
  const double sd = std::sqrt(dt);

  SvPath out;
  out.times.resize(steps + 1);
  out.price.resize(steps + 1);
  out.sigma.resize(steps + 1);
  out.log_var.resize(steps + 1);

  double d = std::log(model.sigma0 * model.sigma0);
  double sigma = model.sigma0;
  double q = q0;
  out.times[0] = 0.0;
  out.price[0] = q;
  out.sigma[0] = sigma;
  out.log_var[0] = d;
  for (long k = 0; k < steps; ++k) {
    const double t = k * dt;
    const double dwe = sd * price_rng.normal();
    const double dwd = sd * vol_rng.normal();
    const double mu = model.mu(t, q, sigma);
    q *= std::exp((mu - 0.5 * sigma * sigma) * dt + sigma * dwe);
    d += model.alpha(t, d) * dt + model.b(t, d) * dwd;
    sigma = std::exp(0.5 * d);
    out.times[k + 1] = (k + 1) * dt;
    out.price[k + 1] = q;
    out.sigma[k + 1] = sigma;
    out.log_var[k + 1] = d;
  }
  return out;
}

EnsembleResult bohm_vigier_ensemble(const WaveField& psi0,
                                    const ClassicalPotential& V,
                                    BohmianConfig cfg, NoiseProcess noise,
                                    int count, std::uint64_t seed,
                                    long steps) {
  cfg.mode = CouplingMode::Guidance;
  cfg.guidance_scheme = DriftScheme::Euler;
  BohmianRun run(psi0, V, cfg);
  run.set_noise(std::move(noise), seed + 1);
  for (const auto& q0 : sample_born(psi0, count, seed)) {
    run.add_particle(q0);
  }
  return run.run(steps);
}

std::vector<std::vector<double>> draw_initial_positions(
    const RandomInitials& init, const WaveField* wave, int count, int dims,
    std::uint64_t seed) {
  std::vector<std::vector<double>> qs;
  qs.reserve(count);
  switch (init.kind) {
    case RandomInitials::Kind::PointMass:
      if (static_cast<int>(init.q0.size()) != dims) {
        throw ConfigError("point-mass initials need a q0 of full dimension");
      }
      for (int i = 0; i < count; ++i) qs.push_back(init.q0);
      break;
    case RandomInitials::Kind::Gaussian: {
      if (static_cast<int>(init.q0.size()) != dims ||
          static_cast<int>(init.q_sigma.size()) != dims) {
        throw ConfigError("gaussian initials need q0 and q_sigma");
      }
      RngStream rng(seed, 0);
      for (int i = 0; i < count; ++i) {
        std::vector<double> q(dims);
        for (int d = 0; d < dims; ++d) {
          q[d] = init.q0[d] + init.q_sigma[d] * rng.normal();
        }
        qs.push_back(std::move(q));
      }
      break;
    }
    case RandomInitials::Kind::Born:
      if (!wave) throw ConfigError("Born initials need a wave field");
      qs = sample_born(*wave, count, seed);
      break;
  }
  return qs;
}

std::vector<std::vector<double>> draw_initial_momenta(
    const RandomInitials& init, int count, int dims, std::uint64_t seed) {
  std::vector<std::vector<double>> ps;
  if (init.kind == RandomInitials::Kind::Gaussian && !init.p_sigma.empty()) {
    RngStream rng(seed, 1);
    ps.reserve(count);
    for (int i = 0; i < count; ++i) {
      std::vector<double> p(dims);
      for (int d = 0; d < dims; ++d) {
        p[d] = (init.p0.empty() ? 0.0 : init.p0[d]) +
               init.p_sigma[d] * rng.normal();
      }
      ps.push_back(std::move(p));
    }
  } else if (!init.p0.empty()) {
    ps.assign(count, init.p0);
  }
  return ps;
}

namespace {

EnsembleResult classical_ensemble(const DynamicsSpec& dyn,
                                  std::vector<std::vector<double>> qs,
                                  std::vector<std::vector<double>> ps) {
  const int dims = static_cast<int>(dyn.masses.size());
  FinancialMass fm(dyn.masses);
  EnsembleResult out;
  out.dims = dims;
  out.count = static_cast<int>(qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    MarketState s;
    s.q = qs[i];
    s.p = ps.empty() ? std::vector<double>(dims, 0.0) : ps[i];
    out.trajectories.push_back(integrate(std::move(s), fm, dyn.potential,
                                         dyn.dt, dyn.steps,
                                         dyn.record_stride));
  }
  // assemble per-time moments from the recorded trajectories
  const Trajectory& first = out.trajectories.front();
  out.times = first.times;
  const std::size_t nt = first.samples();
  out.mean.assign(nt * dims, 0.0);
  out.dispersion.assign(nt * dims, 0.0);
  for (std::size_t k = 0; k < nt; ++k) {
    for (int d = 0; d < dims; ++d) {
      double mean = 0.0, m2 = 0.0;
      long n = 0;
      for (const Trajectory& tr : out.trajectories) {
        ++n;
        const double x = tr.q_at(k, d);
        const double delta = x - mean;
        mean += delta / n;
        m2 += delta * (x - mean);
      }
      out.mean[k * dims + d] = mean;
      out.dispersion[k * dims + d] = n > 1 ? m2 / (n - 1) : 0.0;
    }
  }
  for (const Trajectory& tr : out.trajectories) {
    const std::size_t last = tr.samples() - 1;
    for (int d = 0; d < dims; ++d) {
      out.final_positions.push_back(tr.q_at(last, d));
    }
  }
  return out;
}

}  // namespace

EnsembleResult random_initial_ensemble(const RandomInitials& initials,
                                       const DynamicsSpec& dynamics, int count,
                                       std::uint64_t seed) {
  if (count < 1) throw PreconditionError("ensemble needs count >= 1");
  const int dims = dynamics.wave ? dynamics.wave->grid.dims
                                 : static_cast<int>(dynamics.masses.size());
  auto qs = draw_initial_positions(
      initials, dynamics.wave ? &*dynamics.wave : nullptr, count, dims, seed);
  auto ps = draw_initial_momenta(initials, count, dims, seed);

  if (dynamics.kind == DynamicsKind::Classical) {
    return classical_ensemble(dynamics, std::move(qs), std::move(ps));
  }
  if (!dynamics.wave) {
    throw ConfigError("quantum dynamics need a wave field");
  }
  BohmianConfig cfg = dynamics.bohm;
  cfg.dt = dynamics.dt;
  cfg.record_stride = dynamics.record_stride;
  switch (dynamics.kind) {
    case DynamicsKind::BohmNewton:
      cfg.mode = CouplingMode::BohmNewton;
      break;
    case DynamicsKind::Guidance:
      cfg.mode = CouplingMode::Guidance;
      break;
    case DynamicsKind::BohmVigier:
      cfg.mode = CouplingMode::Guidance;
      cfg.guidance_scheme = DriftScheme::Euler;
      break;
    default:
      break;
  }
  BohmianRun run(*dynamics.wave, dynamics.potential, cfg);
  if (dynamics.kind == DynamicsKind::BohmVigier) {
    run.set_noise(dynamics.noise, seed + 1);
  }
  if (dynamics.mass_schedule) {
    run.set_mass_schedule(*dynamics.mass_schedule, seed + 2);
  }
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (ps.empty()) {
      run.add_particle(qs[i]);
    } else {
      run.add_particle(qs[i], ps[i]);
    }
  }
  return run.run(dynamics.steps);
}

EnsembleResult random_mass_ensemble(const MassSchedule& schedule,
                                    const DynamicsSpec& dynamics,
                                    const RandomInitials& initials, int count,
                                    std::uint64_t seed) {
  DynamicsSpec dyn = dynamics;
  dyn.mass_schedule = schedule;
  if (dyn.kind != DynamicsKind::BohmNewton) {
    throw ConfigError("random financial mass runs use second-order dynamics");
  }
  return random_initial_ensemble(initials, dyn, count, seed);
}

}  // namespace pilotwave
