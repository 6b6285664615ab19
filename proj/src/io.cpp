#include "pilotwave/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pilotwave::io {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  return out;
}

void dump_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

json grid_json(const SpatialGrid& g) {
  json j;
  j["dims"] = g.dims;
  j["lo"] = std::vector<double>(g.lo.begin(), g.lo.begin() + g.dims);
  j["hi"] = std::vector<double>(g.hi.begin(), g.hi.begin() + g.dims);
  j["n"] = std::vector<int>(g.n.begin(), g.n.begin() + g.dims);
  std::vector<double> dx;
  for (int d = 0; d < g.dims; ++d) dx.push_back(g.dx(d));
  j["dx"] = dx;
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_wave_csv(const std::filesystem::path& path, const WaveField& w,
                    const PolarDecomposition& d, const PotentialGrid& U,
                    const VectorFieldGrid& g) {
  std::ofstream out = open_out(path);
  const SpatialGrid& grid = w.grid;
  out << "q_1";
  if (grid.dims == 2) out << ",q_2";
  out << ",re_psi,im_psi,R,S,U";
  for (int a = 0; a < grid.dims; ++a) out << ",g_" << (a + 1);
  out << "\n";
  for (int i = 0; i < grid.n[0]; ++i) {
    for (int j = 0; j < (grid.dims == 2 ? grid.n[1] : 1); ++j) {
      const std::size_t k = grid.index(i, j);
      out << format_double(grid.coord(0, i));
      if (grid.dims == 2) out << "," << format_double(grid.coord(1, j));
      out << "," << format_double(w.values[k].real())
          << "," << format_double(w.values[k].imag())
          << "," << format_double(d.amplitude[k])
          << "," << format_double(d.action[k])
          << "," << format_double(U.values[k]);
      for (int a = 0; a < grid.dims; ++a) {
        out << "," << format_double(g.comp[a][k]);
      }
      out << "\n";
    }
  }
}

void write_wave_meta_json(const std::filesystem::path& path, const WaveField& w,
                          const PolarDecomposition& d) {
  json j;
  j["schema"] = "pilotwave/wave-meta-v1";
  j["grid"] = grid_json(w.grid);
  j["h"] = w.h;
  j["masses"] = std::vector<double>(w.masses.begin(),
                                    w.masses.begin() + w.grid.dims);
  j["norm"] = wave_norm(w);
  long masked = 0;
  for (auto f : d.nodal) masked += f;
  j["masked_nodes"] = masked;
  j["amplitude_floor"] = d.floor;
  dump_json(path, j);
}

namespace {

void write_traj_rows(std::ofstream& out, const Trajectory& tr, int id,
                     bool with_id) {
  for (std::size_t k = 0; k < tr.samples(); ++k) {
    if (with_id) out << id << ",";
    out << format_double(tr.times[k]);
    for (int d = 0; d < tr.dims; ++d) {
      out << "," << format_double(tr.q_at(k, d));
    }
    if (!tr.p.empty()) {
      for (int d = 0; d < tr.dims; ++d) {
        out << "," << format_double(tr.p_at(k, d));
      }
    }
    if (!tr.extra.empty()) {
      const std::size_t width = tr.extra_names.size();
      for (std::size_t e = 0; e < width; ++e) {
        out << "," << format_double(tr.extra[k * width + e]);
      }
    }
    out << "\n";
  }
}

void write_traj_header(std::ofstream& out, const Trajectory& tr,
                       const std::string& masses,
                       const std::string& potential_tag, bool with_id) {
  out << "# masses=" << masses << " potential=" << potential_tag << "\n";
  if (with_id) out << "particle,";
  out << "t";
  for (int d = 0; d < tr.dims; ++d) out << ",q_" << (d + 1);
  if (!tr.p.empty()) {
    for (int d = 0; d < tr.dims; ++d) out << ",p_" << (d + 1);
  }
  for (const auto& name : tr.extra_names) out << "," << name;
  out << "\n";
}

}  // namespace

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj, const std::string& masses,
                          const std::string& potential_tag) {
  std::ofstream out = open_out(path);
  write_traj_header(out, traj, masses, potential_tag, false);
  write_traj_rows(out, traj, 0, false);
}

void write_trajectories_csv(const std::filesystem::path& path,
                            std::span<const Trajectory> trajs,
                            const std::string& masses,
                            const std::string& potential_tag) {
  if (trajs.empty()) throw ConfigError("no trajectories to write");
  std::ofstream out = open_out(path);
  write_traj_header(out, trajs[0], masses, potential_tag, true);
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    write_traj_rows(out, trajs[i], static_cast<int>(i), true);
  }
}

void write_ensemble_json(const std::filesystem::path& path,
                         const EnsembleResult& ensemble) {
  json j;
  j["schema"] = "pilotwave/ensemble-v1";
  j["count"] = ensemble.count;
  j["dims"] = ensemble.dims;
  j["times"] = ensemble.times;
  for (int d = 0; d < ensemble.dims; ++d) {
    std::vector<double> mean, disp;
    for (std::size_t k = 0; k < ensemble.times.size(); ++k) {
      mean.push_back(ensemble.mean_at(k, d));
      disp.push_back(ensemble.dispersion_at(k, d));
    }
    j["mean"].push_back(mean);
    j["dispersion"].push_back(disp);
  }
  j["terminated"] = ensemble.terminated;
  j["nodal_hits"] = ensemble.nodal_hits;
  // QV estimate on the recorded mesh, averaged over stored members
  if (!ensemble.trajectories.empty() &&
      ensemble.trajectories[0].samples() >= 2) {
    for (int d = 0; d < ensemble.dims; ++d) {
      double mean_qv = 0.0;
      for (const Trajectory& tr : ensemble.trajectories) {
        double qv = 0.0;
        for (std::size_t k = 0; k + 1 < tr.samples(); ++k) {
          const double diff = tr.q_at(k + 1, d) - tr.q_at(k, d);
          qv += diff * diff;
        }
        mean_qv += qv;
      }
      j["qv_mean"].push_back(mean_qv / ensemble.trajectories.size());
    }
  }
  dump_json(path, j);
}

void write_picard_csv(const std::filesystem::path& path,
                      const PicardSolution& sol) {
  std::ofstream out = open_out(path);
  out << "t";
  for (int d = 0; d < sol.dim; ++d) out << ",x_" << (d + 1);
  out << ",segment\n";
  for (std::size_t k = 0; k < sol.t.size(); ++k) {
    out << format_double(sol.t[k]);
    for (int d = 0; d < sol.dim; ++d) {
      out << "," << format_double(sol.at(k, d));
    }
    out << "," << sol.segment_of[k] << "\n";
  }
}

void write_qv_csv(const std::filesystem::path& path, const QvReport& report) {
  std::ofstream out = open_out(path);
  out << "intervals,qv,ratio_to_next\n";
  for (std::size_t l = 0; l < report.qv.size(); ++l) {
    out << report.intervals[l] << "," << format_double(report.qv[l]) << ",";
    if (l < report.ratios.size()) out << format_double(report.ratios[l]);
    out << "\n";
  }
}

std::string qv_json(const QvReport& report) {
  json j;
  j["intervals"] = report.intervals;
  j["qv"] = report.qv;
  j["ratios"] = report.ratios;
  return j.dump();
}

std::string drift_json(const DriftTestReport& report) {
  json j;
  j["significance"] = report.significance;
  j["rejected"] = report.rejected;
  for (const auto& lr : report.lags) {
    json lj;
    lj["lag"] = lr.lag;
    lj["z"] = lr.z;
    lj["p_value"] = lr.p_value;
    lj["degenerate"] = lr.degenerate;
    lj["rejected"] = lr.rejected;
    for (const auto& b : lr.bins) {
      lj["bins"].push_back({{"lo", b.lo},
                            {"hi", b.hi},
                            {"count", b.count},
                            {"mean", b.mean},
                            {"se", b.se},
                            {"z", b.z}});
    }
    j["lags"].push_back(lj);
  }
  return j.dump();
}

std::string lognormality_json(const LognormalityReport& report) {
  json j;
  j["n"] = report.n;
  j["mean_log"] = report.mean_log;
  j["expected_mean"] = report.expected_mean;
  j["var_log"] = report.var_log;
  j["expected_var"] = report.expected_var;
  j["ks"] = report.ks;
  j["ks_threshold"] = report.ks_threshold;
  j["normality_rejected"] = report.normality_rejected;
  j["degenerate"] = report.degenerate;
  return j.dump();
}

std::string picard_json(const PicardSolution& sol,
                        const ContractionReport& contraction) {
  json j;
  j["alpha"] = sol.alpha;
  j["within_bound"] = contraction.within_bound;
  for (std::size_t s = 0; s < sol.segments.size(); ++s) {
    const auto& seg = sol.segments[s];
    json sj;
    sj["t0"] = seg.t0;
    sj["t1"] = seg.t1;
    sj["iterations"] = seg.iterations;
    sj["final_residual"] = seg.final_residual;
    sj["max_ratio"] = contraction.segments[s].max_ratio;
    j["segments"].push_back(sj);
  }
  return j.dump();
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char b : bytes) {
    hash ^= b;
    hash *= 0x100000001B3ull;
  }
  return hash;
}

std::string file_checksum_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

}  // namespace pilotwave::io
