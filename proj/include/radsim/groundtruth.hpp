#pragma once

#include <cstdint>
#include <vector>

#include "radsim/dsp.hpp"
#include "radsim/scene.hpp"

namespace radsim {

// Range-dependent variance model behind the intensity-to-probability mapping:
// sigma_s^2(r) = 100 * R_max^2 * sigma_n^2 / r^2, clamped below r = 1 m.
struct SigmaModel {
    double sigma_n_sq = 8.0e-5;  // per-quadrature noise variance
    double r_max_m = 50.0;
    double clamp_range_m = 1.0;

    double sigma_s_sq(double range_m) const;
};

// Posterior probability that a pixel with intensity |z|^2 contains a
// reflection, under equal-prior complex-Gaussian hypotheses:
//   p = e^{-|z|^2/(2 sigma_s^2)} /
//       (e^{-|z|^2/(2 sigma_s^2)} + (sigma_s^2/sigma_n^2) e^{-|z|^2/(2 sigma_n^2)})
// Evaluated through the numerically stable rewrite
//   p = 1 / (1 + R * exp(-|z|^2 * (1/(2 sigma_n^2) - 1/(2 sigma_s^2)))),
// R = sigma_s^2/sigma_n^2 (exact at |z|^2 = 0, underflow-free at large |z|^2).
double intensity_to_probability(double intensity, double sigma_s_sq, double sigma_n_sq);

struct ProbabilityMap {
    std::uint32_t num_range_bins = 0;
    std::uint32_t num_angle_bins = 0;
    double range_bin_spacing_m = 0.0;
    std::vector<float> values;

    std::size_t index(std::uint32_t n, std::uint32_t l) const {
        return static_cast<std::size_t>(n) * num_angle_bins + l;
    }
};

// Soft ground truth from a reflection image (normally the super-radar image).
ProbabilityMap probability_map(const RadarImage& image, const SigmaModel& model);

// Hard variant: 1 where intensity >= threshold (boundary inclusive), else 0.
ProbabilityMap binary_map(const RadarImage& image, double intensity_threshold);

enum class PixelSet : std::uint8_t { kNoise = 0, kSpread = 1, kReflection = 2 };

struct PixelPartition {
    std::uint32_t num_range_bins = 0;
    std::uint32_t num_angle_bins = 0;
    double amplitude_threshold = 0.0;
    std::vector<std::uint8_t> labels;  // PixelSet values

    std::size_t index(std::uint32_t n, std::uint32_t l) const {
        return static_cast<std::size_t>(n) * num_angle_bins + l;
    }
    std::size_t count(PixelSet set) const;
};

// Partition of the ground-truth grid (the super image's grid):
//   reflection - cells containing at least one scene point,
//   spread     - remaining cells whose input-image amplitude (sampled at the
//                input cell containing the pixel center) is >= noise_std * 10^(8/20),
//   noise      - everything else.
// `grid` must be an exact refinement of the input image's grid.
PixelPartition partition_pixels(const RadarImage& input_image, const Scene& scene,
                                double noise_std, const ImageGrid& grid);

// Empirical noise floor: RMS amplitude over the beamformed range-Doppler-angle
// cube of a scene-free frame (before the per-pixel Doppler argmax, which would
// bias the floor upward).
double calibration_noise_std(const RadarConfig& config, double image_variance,
                             std::uint64_t seed);

struct LossWeights {
    double rho_r = 0.1;
    double rho_n = 5.0;
    double rho_s = 1.0;
};

enum class LossVariant { kCrossEntropy, kL1 };

struct LossOptions {
    LossWeights weights;
    LossVariant variant = LossVariant::kCrossEntropy;
    // The per-set sums are unnormalized by default; this averages each set
    // over its pixel count instead.
    bool per_set_mean = false;
};

// Set-weighted loss between ground truth p and prediction p_hat:
//   L = rho_n * sum_{noise} d(p, p_hat) + rho_r * sum_{reflection} d(...)
//     + rho_s * sum_{spread} d(...)
// d = binary cross entropy (p_hat clamped to [1e-7, 1 - 1e-7] inside the logs)
// or |p - p_hat| for the L1 variant. Reductions use pairwise summation.
double boost_loss(const ProbabilityMap& truth, const ProbabilityMap& prediction,
                  const PixelPartition& partition, const LossOptions& options = {});

}  // namespace radsim
