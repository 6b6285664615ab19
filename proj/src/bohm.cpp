#include "pilotwave/bohm.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace pilotwave {

namespace {

void parallel_for(int n, int threads, auto&& fn) {
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

// Inverse-CDF draw from a piecewise-linear density given on uniform nodes.
// cdf[k] is the cumulative trapezoid integral up to node k.
double sample_segment(double x0, double dx, std::span<const double> density,
                      std::span<const double> cdf, double u) {
  const double target = u * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  std::size_t k = it == cdf.begin() ? 0 : (it - cdf.begin() - 1);
  k = std::min(k, cdf.size() - 2);
  const double rest = target - cdf[k];
  const double rho0 = density[k];
  const double rho1 = density[k + 1];
  const double slope = (rho1 - rho0) / dx;
  double s;
  if (std::abs(slope) * dx < 1e-14 * (rho0 + rho1 + 1e-300)) {
    s = rho0 > 0.0 ? rest / rho0 : 0.5 * dx;
  } else {
    // solve rho0 s + slope s^2 / 2 = rest on [0, dx]
    const double disc = rho0 * rho0 + 2.0 * slope * rest;
    s = (-rho0 + std::sqrt(std::max(0.0, disc))) / slope;
  }
  return x0 + k * dx + std::clamp(s, 0.0, dx);
}

std::vector<double> cumulative_trapezoid(std::span<const double> f, double dx) {
  std::vector<double> cdf(f.size());
  cdf[0] = 0.0;
  for (std::size_t k = 1; k < f.size(); ++k) {
    cdf[k] = cdf[k - 1] + 0.5 * dx * (f[k - 1] + f[k]);
  }
  return cdf;
}

}  // namespace

BohmianRun::BohmianRun(WaveField psi0, ClassicalPotential V, BohmianConfig cfg)
    : psi_(std::move(psi0)), V_(std::move(V)), cfg_(cfg) {
  if (!(cfg_.dt > 0.0)) throw ConfigError("run needs dt > 0");
  if (cfg_.record_stride < 1) throw ConfigError("record stride must be >= 1");
  const double n = wave_norm(psi_);
  if (std::abs(n - 1.0) > 1e-6) {
    throw PreconditionError("run expects a normalized wave");
  }
  if (cfg_.wave_dynamics == WaveDynamics::Schrodinger) {
    PotentialGrid vg = sample_potential(V_, psi_.grid);
    stepper_.emplace(psi_.grid, vg.values, psi_.mass_span(), psi_.h, cfg_.dt);
  }
  refresh_fields();
}

void BohmianRun::set_noise(NoiseProcess noise, std::uint64_t seed) {
  if (noise.kind == NoiseProcess::Kind::Wiener) {
    if (cfg_.mode != CouplingMode::Guidance) {
      throw ConfigError("velocity noise applies to guidance dynamics only");
    }
    if (static_cast<int>(noise.sigma.size()) != psi_.grid.dims) {
      throw ConfigError("noise sigma count does not match grid dimension");
    }
  }
  noise_ = std::move(noise);
  noise_seed_ = seed;
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    particles_[i].noise = RngStream(noise_seed_, i);
  }
}

void BohmianRun::set_mass_schedule(MassSchedule schedule, std::uint64_t seed) {
  if (schedule.dims() != psi_.grid.dims) {
    throw ConfigError("mass schedule dimension does not match grid");
  }
  if (cfg_.mode != CouplingMode::BohmNewton) {
    throw ConfigError("mass schedules apply to second-order dynamics only");
  }
  mass_schedule_ = std::move(schedule);
  mass_seed_ = seed;
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    particles_[i].mass = mass_schedule_->sampler(t_);
    particles_[i].mass_rng = RngStream(mass_seed_, i);
  }
}

void BohmianRun::add_particle(std::span<const double> q0,
                              std::span<const double> p0) {
  const int dims = psi_.grid.dims;
  if (static_cast<int>(q0.size()) != dims) {
    throw ConfigError("particle dimension does not match grid");
  }
  if (!psi_.grid.contains(q0)) {
    throw ConfigError("particle starts outside the grid");
  }
  Particle pt;
  pt.q.assign(q0.begin(), q0.end());
  if (!p0.empty()) {
    pt.p.assign(p0.begin(), p0.end());
  } else if (cfg_.momentum_from_phase) {
    pt.p.resize(dims);
    for (int d = 0; d < dims; ++d) {
      pt.p[d] = interpolate(psi_.grid, grad_s_.comp[d], q0, cfg_.interp);
    }
  } else {
    pt.p.assign(dims, 0.0);
  }
  const std::size_t idx = particles_.size();
  pt.noise = RngStream(noise_seed_, idx);
  if (mass_schedule_) {
    pt.mass = mass_schedule_->sampler(t_);
    pt.mass_rng = RngStream(mass_seed_, idx);
  }
  particles_.push_back(std::move(pt));
}

void BohmianRun::refresh_fields() {
  polar_ = polar_decompose(psi_);
  U_ = quantum_potential(polar_, psi_.mass_span(), psi_.h);
  force_ = mental_force(U_);
  grad_s_ = phase_gradient(polar_);
}

void BohmianRun::advance_particle(Particle& pt) {
  const int dims = psi_.grid.dims;
  const double dt = cfg_.dt;
  const SpatialGrid& grid = psi_.grid;

  auto check_cell = [&](std::span<const double> q) {
    if (cell_flagged(grid, force_.mask, q)) ++pt.nodal_hits;
  };

  if (cfg_.mode == CouplingMode::BohmNewton) {
    check_cell(pt.q);
    auto total_force = [&](double t, std::span<const double> q,
                           std::span<double> out) {
      V_.force(t, q, out);
      for (int d = 0; d < dims; ++d) {
        out[d] += interpolate(grid, force_.comp[d], q, cfg_.interp);
      }
    };
    const double t_mid = t_ + 0.5 * dt;
    std::vector<double> scratch(dims);
    if (mass_schedule_) {
      // velocity form: v' = (f + g) / m(t), with the mass sampled at the
      // kick times of the step
      std::vector<double>& v = pt.p;
      total_force(t_mid, pt.q, scratch);
      for (int d = 0; d < dims; ++d) {
        v[d] += 0.5 * dt * scratch[d] / pt.mass.at(d);
      }
      for (int d = 0; d < dims; ++d) pt.q[d] += dt * v[d];
      if (!grid.contains(pt.q)) {
        pt.alive = false;
        pt.exit_time = t_ + dt;
        return;
      }
      pt.mass.advance(dt, pt.mass_rng);
      total_force(t_mid, pt.q, scratch);
      for (int d = 0; d < dims; ++d) {
        v[d] += 0.5 * dt * scratch[d] / pt.mass.at(d);
      }
    } else {
      leapfrog_kdk(pt.q, pt.p, psi_.mass_span(), t_mid, dt, scratch,
                   total_force);
      if (!grid.contains(pt.q)) {
        pt.alive = false;
        pt.exit_time = t_ + dt;
        return;
      }
    }
    check_cell(pt.q);
    return;
  }

  // guidance: dq/dt = dS/dq / m, with optional additive Wiener noise
  check_cell(pt.q);
  auto velocity = [&](std::span<const double> q, std::span<double> v) {
    for (int d = 0; d < dims; ++d) {
      v[d] = interpolate(grid, grad_s_.comp[d], q, cfg_.interp) /
             psi_.masses[d];
    }
  };
  std::vector<double> v(dims);
  if (cfg_.guidance_scheme == DriftScheme::Midpoint &&
      noise_.kind == NoiseProcess::Kind::Zero) {
    std::vector<double> qm(dims);
    velocity(pt.q, v);
    for (int d = 0; d < dims; ++d) qm[d] = pt.q[d] + 0.5 * dt * v[d];
    if (grid.contains(qm)) velocity(qm, v);
  } else {
    velocity(pt.q, v);
  }
  for (int d = 0; d < dims; ++d) pt.q[d] += dt * v[d];
  if (noise_.kind == NoiseProcess::Kind::Wiener) {
    const double sqdt = std::sqrt(dt);
    for (int d = 0; d < dims; ++d) {
      pt.q[d] += noise_.sigma[d] * sqdt * pt.noise.normal();
    }
  }
  if (!grid.contains(pt.q)) {
    pt.alive = false;
    pt.exit_time = t_ + dt;
    return;
  }
  check_cell(pt.q);
  for (int d = 0; d < dims; ++d) {
    pt.p[d] = interpolate(grid, grad_s_.comp[d], pt.q, cfg_.interp);
  }
}

void BohmianRun::step() {
  if (cfg_.wave_dynamics == WaveDynamics::Schrodinger) {
    stepper_->step(psi_.values);
    refresh_fields();
  }
  parallel_for(static_cast<int>(particles_.size()), cfg_.threads, [&](int i) {
    if (particles_[i].alive) advance_particle(particles_[i]);
  });
  t_ += cfg_.dt;
}

EnsembleResult BohmianRun::run(long steps) {
  const int dims = psi_.grid.dims;
  EnsembleResult out;
  out.dims = dims;
  out.count = static_cast<int>(particles_.size());
  if (cfg_.store_trajectories) {
    out.trajectories.resize(particles_.size());
    for (auto& tr : out.trajectories) tr.dims = dims;
  }
  const bool with_mass = mass_schedule_.has_value();

  auto record = [&]() {
    out.times.push_back(t_);
    for (int d = 0; d < dims; ++d) {
      double mean = 0.0, m2 = 0.0;
      long n = 0;
      for (const Particle& pt : particles_) {
        ++n;
        const double delta = pt.q[d] - mean;
        mean += delta / n;
        m2 += delta * (pt.q[d] - mean);
      }
      out.mean.push_back(mean);
      out.dispersion.push_back(n > 1 ? m2 / (n - 1) : 0.0);
    }
    if (cfg_.store_trajectories) {
      for (std::size_t i = 0; i < particles_.size(); ++i) {
        Trajectory& tr = out.trajectories[i];
        const Particle& pt = particles_[i];
        tr.times.push_back(t_);
        tr.q.insert(tr.q.end(), pt.q.begin(), pt.q.end());
        tr.p.insert(tr.p.end(), pt.p.begin(), pt.p.end());
        if (with_mass) {
          if (tr.extra_names.empty()) {
            for (int d = 0; d < dims; ++d) {
              tr.extra_names.push_back("m_" + std::to_string(d + 1));
            }
            for (int d = 0; d < dims; ++d) {
              tr.extra_names.push_back("cap_" + std::to_string(d + 1));
            }
          }
          for (int d = 0; d < dims; ++d) tr.extra.push_back(pt.mass.at(d));
          for (int d = 0; d < dims; ++d) {
            tr.extra.push_back(pt.mass.at(d) * pt.q[d]);
          }
        }
      }
    }
  };

  record();
  for (long k = 0; k < steps; ++k) {
    step();
    if ((k + 1) % cfg_.record_stride == 0 || k + 1 == steps) record();
  }

  out.final_positions.reserve(particles_.size() * dims);
  for (const Particle& pt : particles_) {
    out.final_positions.insert(out.final_positions.end(), pt.q.begin(),
                               pt.q.end());
    if (!pt.alive) ++out.terminated;
    out.nodal_hits += pt.nodal_hits;
  }
  return out;
}

std::vector<std::vector<double>> sample_born(const WaveField& psi, int count,
                                             std::uint64_t seed) {
  if (count < 1) throw PreconditionError("sample_born needs count >= 1");
  if (std::abs(wave_norm(psi) - 1.0) > 1e-6) {
    throw PreconditionError("sample_born expects a normalized wave");
  }
  const SpatialGrid& g = psi.grid;
  std::vector<double> rho(psi.values.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(psi.values[i]);

  RngStream rng(seed, 0);
  std::vector<std::vector<double>> samples;
  samples.reserve(count);

  if (g.dims == 1) {
    std::vector<double> cdf = cumulative_trapezoid(rho, g.dx(0));
    for (int s = 0; s < count; ++s) {
      samples.push_back({sample_segment(g.lo[0], g.dx(0), rho, cdf,
                                        rng.uniform01())});
    }
    return samples;
  }

  // marginal along axis 0, then the conditional line blended between the
  // two bracketing rows
  std::vector<double> marginal(g.n[0]);
  for (int i = 0; i < g.n[0]; ++i) {
    double row = 0.0;
    for (int j = 0; j < g.n[1]; ++j) {
      const double w = (j == 0 || j == g.n[1] - 1) ? 0.5 : 1.0;
      row += w * rho[g.index(i, j)];
    }
    marginal[i] = row * g.dx(1);
  }
  std::vector<double> cdf0 = cumulative_trapezoid(marginal, g.dx(0));
  std::vector<double> line(g.n[1]);
  for (int s = 0; s < count; ++s) {
    const double x0 =
        sample_segment(g.lo[0], g.dx(0), marginal, cdf0, rng.uniform01());
    const double u = (x0 - g.lo[0]) / g.dx(0);
    const int i = std::clamp(static_cast<int>(std::floor(u)), 0, g.n[0] - 2);
    const double w = u - i;
    for (int j = 0; j < g.n[1]; ++j) {
      line[j] = (1.0 - w) * rho[g.index(i, j)] + w * rho[g.index(i + 1, j)];
    }
    std::vector<double> cdf1 = cumulative_trapezoid(line, g.dx(1));
    const double x1 =
        sample_segment(g.lo[1], g.dx(1), line, cdf1, rng.uniform01());
    samples.push_back({x0, x1});
  }
  return samples;
}

EnsembleResult run_ensemble(const WaveField& psi0, const ClassicalPotential& V,
                            const BohmianConfig& cfg, int count,
                            std::uint64_t seed, long steps) {
  BohmianRun run(psi0, V, cfg);
  for (const auto& q0 : sample_born(psi0, count, seed)) {
    run.add_particle(q0);
  }
  return run.run(steps);
}

}  // namespace pilotwave
