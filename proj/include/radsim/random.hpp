#pragma once

#include <cstdint>
#include <random>

namespace radsim {

// splitmix64 finalizer. Used both as a seed mixer and to derive per-frame /
// per-stream seeds from a master seed with a plain counter scheme.
std::uint64_t mix64(std::uint64_t x);

// Seed for frame `index` of a run keyed by `master_seed`:
//   mix64(master_seed + (index + 1) * 0x9E3779B97F4A7C15)
std::uint64_t frame_seed(std::uint64_t master_seed, std::uint64_t index);

// Named substream of a frame seed (scene sampling, input noise, super noise, ...).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag);

inline constexpr std::uint64_t kStreamScene = 1;
inline constexpr std::uint64_t kStreamNoiseInput = 2;
inline constexpr std::uint64_t kStreamNoiseSuper = 3;
inline constexpr std::uint64_t kStreamCalibration = 4;

// Deterministic random source. mt19937_64 is bit-exact across platforms; the
// normal variates use an explicit Box-Muller transform because the standard
// library's normal_distribution algorithm is implementation-defined.
class RandomSource {
  public:
    explicit RandomSource(std::uint64_t seed) : engine_(mix64(seed)) {}

    // Uniform in (0, 1], 53-bit resolution. Never returns 0 (safe under log()).
    double uniform();
    // Uniform in [lo, hi).
    double uniform(double lo, double hi);
    double gaussian();
    // Independent Gaussian pair (one Box-Muller evaluation).
    void gaussian_pair(double& a, double& b);
    std::uint64_t bits() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace radsim
