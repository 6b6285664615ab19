#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pilotwave/bohm.hpp"
#include "pilotwave/classical.hpp"
#include "pilotwave/diagnostics.hpp"
#include "pilotwave/picard.hpp"
#include "pilotwave/wave.hpp"

namespace pilotwave::io {

/// Lossless, locale-independent decimal rendering ('.' separator).
std::string format_double(double v);

/// Wave snapshot: grid coordinates, Re psi, Im psi, R, S, U, g per axis.
void write_wave_csv(const std::filesystem::path& path, const WaveField& w,
                    const PolarDecomposition& d, const PotentialGrid& U,
                    const VectorFieldGrid& g);

/// Grid metadata companion of the wave snapshot.
void write_wave_meta_json(const std::filesystem::path& path, const WaveField& w,
                          const PolarDecomposition& d);

/// Single trajectory: t, q_1..q_n, p_1..p_n (+ extra channels), with a
/// leading comment line carrying masses and the potential tag.
void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj, const std::string& masses,
                          const std::string& potential_tag);

/// Ensemble of trajectories, same layout plus a particle id column.
void write_trajectories_csv(const std::filesystem::path& path,
                            std::span<const Trajectory> trajs,
                            const std::string& masses,
                            const std::string& potential_tag);

void write_ensemble_json(const std::filesystem::path& path,
                         const EnsembleResult& ensemble);

/// Picard mesh solution: t, x components, segment id.
void write_picard_csv(const std::filesystem::path& path,
                      const PicardSolution& sol);

/// Quadratic-variation level table: intervals, qv, ratio to the next level.
void write_qv_csv(const std::filesystem::path& path, const QvReport& report);

std::string qv_json(const QvReport& report);
std::string drift_json(const DriftTestReport& report);
std::string lognormality_json(const LognormalityReport& report);
std::string picard_json(const PicardSolution& sol,
                        const ContractionReport& contraction);

/// FNV-1a 64-bit content hash, hex-encoded; used for manifest checksums.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::string file_checksum_hex(const std::filesystem::path& path);

}  // namespace pilotwave::io
