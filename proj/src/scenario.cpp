#include "pilotwave/scenario.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pilotwave/bohm.hpp"
#include "pilotwave/classical.hpp"
#include "pilotwave/diagnostics.hpp"
#include "pilotwave/io.hpp"
#include "pilotwave/picard.hpp"
#include "pilotwave/stochastic.hpp"
#include "pilotwave/wave.hpp"

namespace pilotwave {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const std::set<std::string> kKinds = {
    "classical",      "bohm-newton", "guidance", "bohm-vigier",
    "gbm",            "stochastic-vol", "picard", "diagnostics-only"};

const std::set<std::string> kWaveFamilies = {
    "gaussian",       "plane-modulated-gaussian", "polynomial-amplitude",
    "entangled-2d",   "constant",                 "harmonic-ground-state",
    "two-bump"};

bool is_quantum(const std::string& kind) {
  return kind == "bohm-newton" || kind == "guidance" || kind == "bohm-vigier";
}

// Collects validation errors; getters fall back to defaults so validation
// can keep going and report everything at once.
struct Reader {
  const json& j;
  std::vector<std::string>& errors;
  std::string prefix;

  Reader field(const char* key) const {
    return Reader{j.at(key), errors, prefix + key + "."};
  }
  bool has(const char* key) const { return j.contains(key); }

  void fail(const std::string& msg) const { errors.push_back(prefix + msg); }

  double number(const char* key, double fallback) const {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) {
      fail(std::string(key) + ": expected a number");
      return fallback;
    }
    return j.at(key).get<double>();
  }
  double require_number(const char* key) const {
    if (!j.contains(key)) {
      fail(std::string(key) + ": missing required field");
      return 0.0;
    }
    return number(key, 0.0);
  }
  long integer(const char* key, long fallback) const {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) {
      fail(std::string(key) + ": expected an integer");
      return fallback;
    }
    return j.at(key).get<long>();
  }
  bool boolean(const char* key, bool fallback) const {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) {
      fail(std::string(key) + ": expected a boolean");
      return fallback;
    }
    return j.at(key).get<bool>();
  }
  std::string text(const char* key, const std::string& fallback) const {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) {
      fail(std::string(key) + ": expected a string");
      return fallback;
    }
    return j.at(key).get<std::string>();
  }
  std::vector<double> numbers(const char* key,
                              std::vector<double> fallback = {}) const {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_array()) {
      fail(std::string(key) + ": expected an array of numbers");
      return fallback;
    }
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
      if (!v.is_number()) {
        fail(std::string(key) + ": expected an array of numbers");
        return fallback;
      }
      out.push_back(v.get<double>());
    }
    return out;
  }
};

struct Parsed {
  json raw;
  std::string kind, name;
  std::uint64_t seed = 0;
  int threads = 1;
  double dt = 0.0;
  long steps = 0;
  int record_stride = 1;
  std::vector<std::string> errors;
};

ClassicalPotential parse_potential(const Reader& r,
                                   std::vector<std::string>& errors) {
  const std::string kind = r.text("kind", "zero");
  if (kind == "zero") return ClassicalPotential::zero();
  if (kind == "quadratic") return ClassicalPotential::quadratic();
  if (kind == "pairwise-spread") return ClassicalPotential::pairwise_spread();
  if (kind == "time-scaled") {
    if (!r.has("base") || !r.has("schedule")) {
      errors.push_back("potential: time-scaled needs base and schedule");
      return ClassicalPotential::zero();
    }
    ClassicalPotential base = parse_potential(r.field("base"), errors);
    const Reader sched = r.field("schedule");
    const std::string type = sched.text("type", "sinusoidal");
    if (type != "sinusoidal") {
      errors.push_back("potential.schedule: unknown type '" + type + "'");
      return ClassicalPotential::zero();
    }
    const double offset = sched.number("offset", 1.0);
    const double amplitude = sched.number("amplitude", 0.0);
    const double omega = sched.number("omega", 1.0);
    return ClassicalPotential::time_dependent(
        std::move(base),
        [offset, amplitude, omega](double t) {
          return offset + amplitude * std::sin(omega * t);
        });
  }
  errors.push_back("potential: unknown kind '" + kind + "'");
  return ClassicalPotential::zero();
}

std::optional<SpatialGrid> parse_grid(const Reader& r,
                                      std::vector<std::string>& errors) {
  const auto lo = r.numbers("lo");
  const auto hi = r.numbers("hi");
  const auto n = r.numbers("n");
  if (lo.empty() || lo.size() != hi.size() || lo.size() != n.size() ||
      lo.size() > 2) {
    errors.push_back("grid: lo, hi, n must be arrays of equal length 1 or 2");
    return std::nullopt;
  }
  try {
    if (lo.size() == 1) {
      return SpatialGrid::line(lo[0], hi[0], static_cast<int>(n[0]));
    }
    return SpatialGrid::plane(lo[0], hi[0], static_cast<int>(n[0]), lo[1],
                              hi[1], static_cast<int>(n[1]));
  } catch (const std::exception& e) {
    errors.push_back(std::string("grid: ") + e.what());
    return std::nullopt;
  }
}

std::optional<WaveField> parse_wave(const Reader& r, const SpatialGrid& grid,
                                    std::span<const double> masses, double h,
                                    std::vector<std::string>& errors) {
  const std::string family = r.text("family", "");
  if (!kWaveFamilies.count(family)) {
    errors.push_back("wave: unknown family '" + family + "'");
    return std::nullopt;
  }
  try {
    if (family == "gaussian" || family == "plane-modulated-gaussian") {
      auto center = r.numbers("center", std::vector<double>(grid.dims, 0.0));
      auto sigma = r.numbers("sigma", std::vector<double>(grid.dims, 1.0));
      auto momentum = r.numbers("momentum", {});
      if (static_cast<int>(center.size()) != grid.dims ||
          static_cast<int>(sigma.size()) != grid.dims) {
        errors.push_back("wave: center/sigma must match the grid dimension");
        return std::nullopt;
      }
      return make_gaussian_wave(grid, masses, h, center, sigma, momentum);
    }
    if (family == "polynomial-amplitude") {
      const std::string form = r.text("form", "q2+d");
      const double param = r.number("param", 1.0);
      PolynomialAmplitude fam = PolynomialAmplitude::QuadraticPlusD;
      if (form == "q2+d") {
        fam = PolynomialAmplitude::QuadraticPlusD;
      } else if (form == "q4+b") {
        fam = PolynomialAmplitude::QuarticPlusB;
      } else if (form == "shifted-square-gaussian") {
        fam = PolynomialAmplitude::ShiftedSquareGaussian;
      } else {
        errors.push_back("wave: unknown polynomial form '" + form + "'");
        return std::nullopt;
      }
      return make_polynomial_wave(grid, masses, h, fam, param);
    }
    if (family == "entangled-2d") {
      return make_entangled_wave(grid, masses, h, r.number("coupling", 1.0));
    }
    if (family == "constant") {
      return make_constant_wave(grid, masses, h);
    }
    if (family == "harmonic-ground-state") {
      return make_harmonic_ground_state(grid, masses[0], h,
                                        r.number("spring", 1.0));
    }
    // two-bump
    return make_two_bump_wave(grid, masses, h, r.number("separation", 6.0),
                              r.number("sigma", 0.5), r.number("a1", 1.0),
                              r.number("a2", 1.0));
  } catch (const std::exception& e) {
    errors.push_back(std::string("wave: ") + e.what());
    return std::nullopt;
  }
}

RandomInitials parse_initials(const Reader& r, int dims,
                              std::vector<std::string>& errors) {
  RandomInitials init;
  const std::string kind = r.text("initials", "born");
  if (kind == "born") {
    init.kind = RandomInitials::Kind::Born;
  } else if (kind == "point") {
    init.kind = RandomInitials::Kind::PointMass;
  } else if (kind == "gaussian") {
    init.kind = RandomInitials::Kind::Gaussian;
  } else {
    errors.push_back("ensemble.initials: unknown kind '" + kind + "'");
  }
  init.q0 = r.numbers("q0");
  init.p0 = r.numbers("p0");
  init.q_sigma = r.numbers("q_sigma");
  init.p_sigma = r.numbers("p_sigma");
  if (init.kind == RandomInitials::Kind::PointMass &&
      static_cast<int>(init.q0.size()) != dims) {
    errors.push_back("ensemble.q0: point initials need q0 of full dimension");
  }
  if (init.kind == RandomInitials::Kind::Gaussian &&
      (static_cast<int>(init.q0.size()) != dims ||
       static_cast<int>(init.q_sigma.size()) != dims)) {
    errors.push_back("ensemble: gaussian initials need q0 and q_sigma");
  }
  return init;
}

std::optional<MassSchedule> parse_mass_schedule(
    const Reader& r, int dims, std::vector<std::string>& errors) {
  const std::string kind = r.text("kind", "constant");
  try {
    if (kind == "constant") {
      auto m0 = r.numbers("m0", std::vector<double>(dims, 1.0));
      return MassSchedule::constant(m0);
    }
    if (kind == "sinusoidal") {
      auto m0 = r.numbers("m0", std::vector<double>(dims, 1.0));
      const double amplitude = r.number("amplitude", 0.5);
      const double omega = r.number("omega", 1.0);
      auto floor = r.numbers("floor", std::vector<double>(dims, 1e-3));
      std::vector<std::function<double(double)>> fns;
      for (int d = 0; d < dims; ++d) {
        const double base = m0[d];
        fns.push_back([base, amplitude, omega](double t) {
          return base * (1.0 + amplitude * std::sin(omega * t));
        });
      }
      return MassSchedule::deterministic(std::move(fns), floor);
    }
    if (kind == "log-gaussian") {
      auto m0 = r.numbers("m0", std::vector<double>(dims, 1.0));
      auto vol = r.numbers("volatility", std::vector<double>(dims, 0.2));
      auto floor = r.numbers("floor", std::vector<double>(dims, 1e-3));
      return MassSchedule::log_gaussian(m0, vol, floor);
    }
    errors.push_back("mass_schedule: unknown kind '" + kind + "'");
  } catch (const std::exception& e) {
    errors.push_back(std::string("mass_schedule: ") + e.what());
  }
  return std::nullopt;
}

// Full static validation; fills the Parsed header fields as a side effect.
Parsed parse_and_validate(const std::string& text) {
  Parsed p;
  try {
    p.raw = json::parse(text);
  } catch (const json::parse_error& e) {
    p.errors.push_back(std::string("not valid JSON: ") + e.what());
    return p;
  }
  if (!p.raw.is_object()) {
    p.errors.push_back("scenario must be a JSON object");
    return p;
  }
  Reader r{p.raw, p.errors, ""};
  const std::string schema = r.text("schema", "");
  if (schema != kScenarioSchema) {
    p.errors.push_back("schema: expected '" + std::string(kScenarioSchema) +
                       "', got '" + schema + "'");
  }
  p.name = r.text("name", "unnamed");
  p.kind = r.text("kind", "");
  if (!kKinds.count(p.kind)) {
    p.errors.push_back("kind: unknown scenario kind '" + p.kind + "'");
    return p;
  }
  p.seed = static_cast<std::uint64_t>(r.integer("seed", 0));
  p.threads = static_cast<int>(r.integer("threads", 1));
  p.dt = r.number("dt", 0.0);
  p.steps = r.integer("steps", 0);
  p.record_stride = static_cast<int>(r.integer("record_stride", 1));

  const bool needs_time_axis =
      p.kind != "picard" && p.kind != "diagnostics-only";
  if (needs_time_axis) {
    if (!(p.dt > 0.0)) p.errors.push_back("dt: must be > 0");
    if (p.steps < 1) p.errors.push_back("steps: must be >= 1");
    if (p.record_stride < 1) p.errors.push_back("record_stride: must be >= 1");
  }

  if (is_quantum(p.kind)) {
    if (!r.has("grid")) {
      p.errors.push_back("grid: missing (required for wave dynamics)");
    } else {
      auto grid = parse_grid(r.field("grid"), p.errors);
      auto masses = r.numbers("masses");
      if (masses.empty()) {
        p.errors.push_back("masses: missing required field");
      } else {
        for (double m : masses) {
          if (!(m > 0.0)) p.errors.push_back("masses: must be positive");
        }
      }
      const double h = r.number("h", 1.0);
      if (!(h > 0.0)) p.errors.push_back("h: must be positive");
      if (grid && !masses.empty()) {
        if (static_cast<int>(masses.size()) != grid->dims) {
          p.errors.push_back("masses: count must match grid dimension");
        } else if (!r.has("wave")) {
          p.errors.push_back("wave: missing required field");
        } else {
          auto wave = parse_wave(r.field("wave"), *grid, masses, h, p.errors);
          if (wave && r.has("ensemble")) {
            parse_initials(r.field("ensemble"), grid->dims, p.errors);
          }
        }
      }
      const std::string dyn =
          r.has("wave") ? r.field("wave").text("dynamics", "schrodinger")
                        : "schrodinger";
      if (dyn != "schrodinger" && dyn != "static") {
        p.errors.push_back("wave.dynamics: must be schrodinger or static");
      }
    }
    if (r.has("potential")) parse_potential(r.field("potential"), p.errors);
    if (!r.has("ensemble")) {
      p.errors.push_back("ensemble: missing required field");
    } else {
      const long count = r.field("ensemble").integer("count", 0);
      if (count < 1) p.errors.push_back("ensemble.count: must be >= 1");
    }
    if (p.kind == "bohm-vigier") {
      if (!r.has("noise")) {
        p.errors.push_back("noise: missing (required for bohm-vigier)");
      } else {
        const Reader nr = r.field("noise");
        const std::string nk = nr.text("kind", "wiener");
        if (nk != "wiener" && nk != "zero") {
          p.errors.push_back("noise.kind: must be wiener or zero");
        }
        if (nk == "wiener" && nr.numbers("sigma").empty()) {
          p.errors.push_back("noise.sigma: missing");
        }
      }
    }
    if (r.has("mass_schedule")) {
      if (p.kind != "bohm-newton") {
        p.errors.push_back("mass_schedule: only valid for bohm-newton runs");
      }
    }
  } else if (p.kind == "classical") {
    auto masses = r.numbers("masses");
    if (masses.empty()) {
      p.errors.push_back("masses: missing required field");
    } else {
      for (double m : masses) {
        if (!(m > 0.0)) p.errors.push_back("masses: must be positive");
      }
    }
    if (r.has("potential")) parse_potential(r.field("potential"), p.errors);
    if (!r.has("ensemble")) {
      p.errors.push_back("ensemble: missing required field");
    } else {
      parse_initials(r.field("ensemble"),
                     static_cast<int>(std::max<std::size_t>(masses.size(), 1)),
                     p.errors);
      const std::string ik = r.field("ensemble").text("initials", "born");
      if (ik == "born") {
        p.errors.push_back(
            "ensemble.initials: classical runs need point or gaussian");
      }
    }
  } else if (p.kind == "gbm") {
    if (!r.has("gbm")) {
      p.errors.push_back("gbm: missing required section");
    } else {
      const Reader gr = r.field("gbm");
      if (!(gr.require_number("S0") > 0.0)) {
        p.errors.push_back("gbm.S0: must be > 0");
      }
      gr.require_number("u");
      gr.require_number("v");
      if (gr.integer("paths", 1) < 1) {
        p.errors.push_back("gbm.paths: must be >= 1");
      }
    }
  } else if (p.kind == "stochastic-vol") {
    if (!r.has("stochastic_vol")) {
      p.errors.push_back("stochastic_vol: missing required section");
    } else {
      const Reader sr = r.field("stochastic_vol");
      if (!(sr.require_number("q0") > 0.0)) {
        p.errors.push_back("stochastic_vol.q0: must be > 0");
      }
      if (!(sr.number("sigma0", 0.2) > 0.0)) {
        p.errors.push_back("stochastic_vol.sigma0: must be > 0");
      }
      if (!(sr.number("theta_sigma", 0.2) > 0.0)) {
        p.errors.push_back("stochastic_vol.theta_sigma: must be > 0");
      }
      if (sr.integer("paths", 1) < 1) {
        p.errors.push_back("stochastic_vol.paths: must be >= 1");
      }
    }
  } else if (p.kind == "picard") {
    if (!r.has("picard")) {
      p.errors.push_back("picard: missing required section");
    } else {
      const Reader pr = r.field("picard");
      const std::string force = pr.text("force", "");
      if (force != "linear" && force != "heaviside" && force != "sin-cos") {
        p.errors.push_back("picard.force: must be linear, heaviside or sin-cos");
      }
      if (pr.numbers("x0").empty()) {
        p.errors.push_back("picard.x0: missing initial point");
      }
      if (!pr.has("lipschitz")) {
        p.errors.push_back("picard.lipschitz: declaration is required");
      }
      if (!pr.has("bound")) {
        p.errors.push_back("picard.bound: declaration is required");
      }
      const double t0 = pr.number("t0", 0.0);
      const double T = pr.number("T", 1.0);
      if (!(T > t0)) p.errors.push_back("picard: needs T > t0");
      const std::string norm = pr.text("norm", "sup");
      if (norm != "sup" && norm != "l2") {
        p.errors.push_back("picard.norm: must be sup or l2");
      }
    }
  } else if (p.kind == "diagnostics-only") {
    if (!r.has("diagnostics")) {
      p.errors.push_back("diagnostics: missing required section");
    } else {
      const Reader dr = r.field("diagnostics");
      if (dr.text("input", "").empty()) {
        p.errors.push_back("diagnostics.input: missing trajectory file");
      }
    }
  }
  return p;
}

std::string masses_string(std::span<const double> m) {
  std::string out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ";";
    out += io::format_double(m[i]);
  }
  return out;
}

// Reads back the trajectory CSV layout written by the io module.
std::vector<std::vector<double>> read_price_columns(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read trajectory file " + file.string());
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
    break;
  }
  if (header.empty()) throw ConfigError("trajectory file has no header");
  const bool with_id = header[0] == "particle";
  int q_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "q_1") q_col = static_cast<int>(c);
  }
  if (q_col < 0) throw ConfigError("trajectory file has no q_1 column");
  std::vector<std::vector<double>> paths;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    const std::size_t id = with_id ? static_cast<std::size_t>(row[0]) : 0;
    if (paths.size() <= id) paths.resize(id + 1);
    paths[id].push_back(row[q_col]);
  }
  if (paths.empty()) throw ConfigError("trajectory file has no data rows");
  return paths;
}

struct Emitter {
  fs::path dir;
  std::vector<std::string> files;

  fs::path path(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }
};

void run_quantum(const Parsed& p, const json& raw, Emitter& em) {
  std::vector<std::string> errs;
  Reader r{raw, errs, ""};
  auto grid = parse_grid(r.field("grid"), errs);
  auto masses = r.numbers("masses");
  const double h = r.number("h", 1.0);
  auto wave = parse_wave(r.field("wave"), *grid, masses, h, errs);
  ClassicalPotential V = r.has("potential")
                             ? parse_potential(r.field("potential"), errs)
                             : ClassicalPotential::zero();
  if (!errs.empty()) throw ConfigError(errs.front());

  BohmianConfig cfg;
  cfg.dt = p.dt;
  cfg.record_stride = p.record_stride;
  cfg.threads = p.threads;
  cfg.interp = r.text("interpolation", "linear") == "cubic"
                   ? InterpOrder::Cubic
                   : InterpOrder::Linear;
  cfg.momentum_from_phase = r.boolean("momentum_from_phase", true);
  cfg.wave_dynamics =
      r.field("wave").text("dynamics", "schrodinger") == "static"
          ? WaveDynamics::Static
          : WaveDynamics::Schrodinger;
  if (p.kind == "bohm-newton") {
    cfg.mode = CouplingMode::BohmNewton;
  } else {
    cfg.mode = CouplingMode::Guidance;
    cfg.guidance_scheme =
        (p.kind == "bohm-vigier" ||
         r.text("guidance_scheme", "midpoint") == "euler")
            ? DriftScheme::Euler
            : DriftScheme::Midpoint;
  }

  const Reader er = r.field("ensemble");
  const int count = static_cast<int>(er.integer("count", 1));
  cfg.store_trajectories = er.boolean("store_trajectories", true);
  RandomInitials initials = parse_initials(er, grid->dims, errs);
  if (!errs.empty()) throw ConfigError(errs.front());

  BohmianRun run(*wave, V, cfg);
  if (p.kind == "bohm-vigier") {
    const Reader nr = r.field("noise");
    NoiseProcess noise;
    if (nr.text("kind", "wiener") == "wiener") {
      noise = NoiseProcess::wiener(nr.numbers("sigma"));
    }
    run.set_noise(noise, p.seed + 1);
  }
  if (r.has("mass_schedule")) {
    auto schedule = parse_mass_schedule(r.field("mass_schedule"), grid->dims,
                                        errs);
    if (!errs.empty()) throw ConfigError(errs.front());
    run.set_mass_schedule(*schedule, p.seed + 2);
  }
  auto qs = draw_initial_positions(initials, &*wave, count, grid->dims, p.seed);
  auto ps = draw_initial_momenta(initials, count, grid->dims, p.seed);
  for (int i = 0; i < count; ++i) {
    if (ps.empty()) {
      run.add_particle(qs[i]);
    } else {
      run.add_particle(qs[i], ps[i]);
    }
  }
  EnsembleResult ens = run.run(p.steps);

  // final wave snapshot with its derived fields
  const WaveField& w = run.wave();
  const PolarDecomposition& d = run.polar();
  io::write_wave_csv(em.path("wave.csv"), w, d, run.quantum_potential_grid(),
                     run.mental_force_grid());
  io::write_wave_meta_json(em.path("wave_meta.json"), w, d);
  if (cfg.store_trajectories) {
    io::write_trajectories_csv(em.path("trajectories.csv"), ens.trajectories,
                               masses_string(masses), V.tag());
  }
  io::write_ensemble_json(em.path("ensemble.json"), ens);
}

void run_classical(const Parsed& p, const json& raw, Emitter& em) {
  std::vector<std::string> errs;
  Reader r{raw, errs, ""};
  auto masses = r.numbers("masses");
  ClassicalPotential V = r.has("potential")
                             ? parse_potential(r.field("potential"), errs)
                             : ClassicalPotential::zero();
  const Reader er = r.field("ensemble");
  const int count = static_cast<int>(er.integer("count", 1));
  RandomInitials initials =
      parse_initials(er, static_cast<int>(masses.size()), errs);
  if (!errs.empty()) throw ConfigError(errs.front());

  DynamicsSpec dyn;
  dyn.kind = DynamicsKind::Classical;
  dyn.potential = V;
  dyn.masses = masses;
  dyn.dt = p.dt;
  dyn.steps = p.steps;
  dyn.record_stride = p.record_stride;
  EnsembleResult ens = random_initial_ensemble(initials, dyn, count, p.seed);

  if (ens.trajectories.size() == 1) {
    io::write_trajectory_csv(em.path("trajectories.csv"), ens.trajectories[0],
                             masses_string(masses), V.tag());
  } else {
    io::write_trajectories_csv(em.path("trajectories.csv"), ens.trajectories,
                               masses_string(masses), V.tag());
  }
  io::write_ensemble_json(em.path("ensemble.json"), ens);
}

void run_gbm(const Parsed& p, const json& raw, Emitter& em) {
  std::vector<std::string> errs;
  Reader r{raw, errs, ""};
  const Reader gr = r.field("gbm");
  const double s0 = gr.number("S0", 1.0);
  const double u = gr.number("u", 0.0);
  const double v = gr.number("v", 0.0);
  const int paths = static_cast<int>(gr.integer("paths", 1));
  const bool euler = gr.boolean("euler", false);
  if (!errs.empty()) throw ConfigError(errs.front());

  std::vector<Trajectory> trajs(paths);
  for (int i = 0; i < paths; ++i) {
    std::vector<double> path =
        gbm_path(s0, u, v, p.dt, p.steps, p.seed + i, euler);
    Trajectory& tr = trajs[i];
    tr.dims = 1;
    for (long k = 0; k <= p.steps; ++k) {
      if (k % p.record_stride == 0 || k == p.steps) {
        tr.times.push_back(k * p.dt);
        tr.q.push_back(path[k]);
      }
    }
  }
  io::write_trajectories_csv(em.path("trajectories.csv"), trajs, "1",
                             "gbm(u=" + io::format_double(u) +
                                 ",v=" + io::format_double(v) + ")");

  json diag;
  if (paths >= 1000) {
    std::vector<double> terminal(paths);
    for (int i = 0; i < paths; ++i) terminal[i] = trajs[i].q.back();
    diag["lognormality"] = json::parse(io::lognormality_json(
        lognormality_check(terminal, s0, u, v, p.steps * p.dt)));
  }
  if (!diag.is_null()) {
    std::ofstream out(em.path("diagnostics.json"));
    out << diag.dump(2) << "\n";
  }
}

void run_stochastic_vol(const Parsed& p, const json& raw, Emitter& em) {
  std::vector<std::string> errs;
  Reader r{raw, errs, ""};
  const Reader sr = r.field("stochastic_vol");
  const double q0 = sr.number("q0", 1.0);
  const double mu = sr.number("mu", 0.0);
  const double kappa = sr.number("kappa", 1.0);
  const double theta_sigma = sr.number("theta_sigma", 0.2);
  const double b = sr.number("b", 0.2);
  const double sigma0 = sr.number("sigma0", 0.2);
  const int paths = static_cast<int>(sr.integer("paths", 1));
  if (!errs.empty()) throw ConfigError(errs.front());

  SvModel model = mean_reverting_sv(mu, kappa, theta_sigma, b, sigma0);
  std::vector<Trajectory> trajs(paths);
  for (int i = 0; i < paths; ++i) {
    SvPath path = stochastic_volatility_path(q0, model, p.dt, p.steps,
                                             p.seed + i);
    Trajectory& tr = trajs[i];
    tr.dims = 1;
    tr.extra_names = {"sigma", "log_var"};
    for (long k = 0; k <= p.steps; ++k) {
      if (k % p.record_stride == 0 || k == p.steps) {
        tr.times.push_back(path.times[k]);
        tr.q.push_back(path.price[k]);
        tr.extra.push_back(path.sigma[k]);
        tr.extra.push_back(path.log_var[k]);
      }
    }
  }
  io::write_trajectories_csv(em.path("trajectories.csv"), trajs, "1",
                             "stochastic-vol");
}

void run_picard(const Parsed& p, const json& raw, Emitter& em) {
  (void)p;
  std::vector<std::string> errs;
  Reader r{raw, errs, ""};
  const Reader pr = r.field("picard");
  const std::string force = pr.text("force", "linear");
  const double rate = pr.number("rate", 1.0);
  const double jump_time = pr.number("jump_time", 0.5);
  const auto x0 = pr.numbers("x0");
  const double t0 = pr.number("t0", 0.0);
  const double T = pr.number("T", 1.0);
  if (!errs.empty()) throw ConfigError(errs.front());

  ForceField field;
  field.dim = static_cast<int>(x0.size());
  field.lipschitz = pr.number("lipschitz", 0.0);
  field.bound = pr.number("bound", 0.0);
  if (force == "linear") {
    field.eval = [rate](double, std::span<const double> x,
                        std::span<double> out) {
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = rate * x[i];
    };
  } else if (force == "heaviside") {
    field.eval = [jump_time](double t, std::span<const double>,
                             std::span<double> out) {
      for (auto& v : out) v = t >= jump_time ? 1.0 : 0.0;
    };
    field.discontinuous_in_t = true;
    field.jump_times = {jump_time};
  } else {  // sin-cos
    field.eval = [](double t, std::span<const double> x,
                    std::span<double> out) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = std::sin(x[i]) + std::cos(t);
      }
    };
  }

  PicardConfig cfg;
  cfg.gamma = pr.number("gamma", 0.5);
  cfg.tolerance = pr.number("tolerance", 1e-10);
  cfg.mesh_dt = pr.number("mesh_dt", 1e-3);
  cfg.norm = pr.text("norm", "sup") == "l2" ? PicardNorm::L2 : PicardNorm::Sup;

  PicardSolution sol = picard_solve(field, x0, t0, T, cfg);
  ContractionReport rep = contraction_diagnostics(sol);
  io::write_picard_csv(em.path("trajectories.csv"), sol);
  std::ofstream out(em.path("diagnostics.json"));
  json diag;
  diag["picard"] = json::parse(io::picard_json(sol, rep));
  out << diag.dump(2) << "\n";
}

void run_diagnostics_only(const Parsed& p, const json& raw, Emitter& em,
                          const fs::path& config_dir) {
  std::vector<std::string> errs;
  Reader r{raw, errs, ""};
  const Reader dr = r.field("diagnostics");
  fs::path input = dr.text("input", "");
  if (input.is_relative()) input = config_dir / input;
  auto paths = read_price_columns(input);

  json diag;
  if (dr.boolean("qv", true)) {
    PartitionSpec spec;
    spec.levels = static_cast<int>(dr.integer("qv_levels", 5));
    spec.base_intervals = static_cast<int>(dr.integer("qv_base", 32));
    QvReport qv = quadratic_variation(paths.front(), spec);
    diag["qv"] = json::parse(io::qv_json(qv));
    io::write_qv_csv(em.path("qv.csv"), qv);
  }
  if (dr.boolean("drift", true)) {
    diag["drift"] = json::parse(io::drift_json(martingale_drift_test(
        paths, {}, dr.number("significance", 0.01))));
  }
  std::ofstream out(em.path("diagnostics.json"));
  out << diag.dump(2) << "\n";
  (void)p;
}

}  // namespace

ValidationReport validate_scenario_text(const std::string& text) {
  ValidationReport report;
  report.errors = parse_and_validate(text).errors;
  return report;
}

ValidationReport validate_scenario_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    return ValidationReport{{"cannot read scenario file " + path.string()}};
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return validate_scenario_text(ss.str());
}

RunResult run_scenario_text(const std::string& text,
                            const fs::path& out_dir,
                            const RunOverrides& overrides) {
  Parsed p = parse_and_validate(text);
  if (!p.errors.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& e : p.errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  if (overrides.seed) {
    p.seed = *overrides.seed;
    p.raw["seed"] = *overrides.seed;
  }
  if (overrides.threads) {
    p.threads = *overrides.threads;
    p.raw["threads"] = *overrides.threads;
  }

  fs::create_directories(out_dir);
  Emitter em{out_dir, {}};
  const auto t_begin = std::chrono::steady_clock::now();

  if (is_quantum(p.kind)) {
    run_quantum(p, p.raw, em);
  } else if (p.kind == "classical") {
    run_classical(p, p.raw, em);
  } else if (p.kind == "gbm") {
    run_gbm(p, p.raw, em);
  } else if (p.kind == "stochastic-vol") {
    run_stochastic_vol(p, p.raw, em);
  } else if (p.kind == "picard") {
    run_picard(p, p.raw, em);
  } else {  // diagnostics-only
    run_diagnostics_only(p, p.raw, em, fs::current_path());
  }

  const auto t_end = std::chrono::steady_clock::now();
  json manifest;
  manifest["schema"] = "pilotwave/manifest-v1";
  manifest["version"] = kVersion;
  manifest["scenario"] = p.name;
  manifest["config"] = p.raw;
  manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(t_end - t_begin).count();
  for (const auto& name : em.files) {
    const fs::path fp = out_dir / name;
    manifest["files"].push_back(
        {{"name", name},
         {"bytes", static_cast<long>(fs::file_size(fp))},
         {"fnv1a64", io::file_checksum_hex(fp)}});
  }
  RunResult result;
  result.manifest_path = out_dir / "manifest.json";
  {
    std::ofstream out(result.manifest_path);
    out << manifest.dump(2) << "\n";
  }
  result.files = em.files;
  return result;
}

RunResult run_scenario_file(const fs::path& config_path,
                            const fs::path& out_dir,
                            const RunOverrides& overrides) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot read scenario file " + config_path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return run_scenario_text(ss.str(), out_dir, overrides);
}

}  // namespace pilotwave
