#pragma once

#include <cstdint>

#include "radsim/dsp.hpp"
#include "radsim/radar_config.hpp"
#include "radsim/scene.hpp"

namespace radsim {

struct SuperRadarSpec {
    std::uint32_t kappa = 12;
    RadarConfig config;  // derived via upscale_config
};

// Resolution-boosted variant of `config`: kappa * |rx| receivers at the
// original virtual spacing (Tx count unchanged, Tx spacing widened to match),
// kappa-fold aperture, angle_bins * kappa. kappa = 1 returns the config
// verbatim. Requires a uniform virtual array.
RadarConfig upscale_config(const RadarConfig& config, std::uint32_t kappa);

struct FramePair {
    Scene scene;
    RadarImage input_image;
    RadarImage super_image;
    std::uint64_t seed = 0;
    std::uint32_t kappa = 1;
    std::uint64_t skipped_points_input = 0;
    std::uint64_t skipped_points_super = 0;
};

// Same scene through both radars. Noise draws are independent across the pair
// (substreams of `seed`); both images target the configured sigma_n^2. The
// super branch scales reflectivities by 1/sqrt(kappa) so a point's peak
// amplitude and integrated pixel energy match the input image (array-gain
// normalization); positions and intensities stay consistent, only the
// spreading functions differ.
FramePair generate_pair(const Scene& scene, const RadarConfig& config, std::uint32_t kappa,
                        std::uint64_t seed, bool with_noise = true,
                        const ProcessingOptions& options = {});

}  // namespace radsim
