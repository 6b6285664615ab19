#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace pilotwave {

/// Splittable counter-based generator. Every (seed, stream) pair yields an
/// independent reproducible sequence, so per-path and per-particle streams
/// can be derived from one master seed without coordination.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}

  RngStream(std::uint64_t seed, std::uint64_t stream) {
    state_ = mix(seed + kGamma) ^ mix((stream + 1) * kGamma);
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform draw strictly inside (0,1).
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; one spare is cached per stream.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Additive velocity noise: zero (deterministic dynamics) or Wiener
/// increments with a per-dimension scale.
struct NoiseProcess {
  enum class Kind { Zero, Wiener };
  Kind kind = Kind::Zero;
  std::vector<double> sigma;

  static NoiseProcess zero() { return {}; }
  static NoiseProcess wiener(std::vector<double> sigma) {
    return {Kind::Wiener, std::move(sigma)};
  }
};

}  // namespace pilotwave
