#include "radsim/pair.hpp"

#include <cmath>
#include <stdexcept>

#include "radsim/random.hpp"
#include "radsim/synthesis.hpp"

namespace radsim {

RadarConfig upscale_config(const RadarConfig& config, std::uint32_t kappa) {
    if (kappa == 0) throw std::invalid_argument("upscale_config: kappa must be >= 1");
    if (kappa == 1) return config;
    const VirtualArray array = derive_virtual_array(config);
    if (!array.uniform || array.count() < 2) {
        throw std::invalid_argument("upscale_config: requires a uniform virtual array");
    }
    const double spacing = array.spacing_m;
    const std::uint32_t rx_count = config.rx_count() * kappa;

    RadarConfig up = config;
    up.rx_positions_m.clear();
    up.tx_positions_m.clear();
    for (std::uint32_t k = 0; k < rx_count; ++k) {
        up.rx_positions_m.push_back(k * spacing);
    }
    for (std::uint32_t i = 0; i < config.tx_count(); ++i) {
        up.tx_positions_m.push_back(static_cast<double>(i) * rx_count * spacing);
    }
    up.angle_bins = config.effective_angle_bins() * kappa;
    return up;
}

FramePair generate_pair(const Scene& scene, const RadarConfig& config, std::uint32_t kappa,
                        std::uint64_t seed, bool with_noise, const ProcessingOptions& options) {
    FramePair pair;
    pair.scene = scene;
    pair.seed = seed;
    pair.kappa = kappa;

    const RadarConfig super_config = upscale_config(config, kappa);

    NoiseSpec input_noise;
    NoiseSpec super_noise;
    if (with_noise) {
        input_noise.image_variance = config.noise_image_variance;
        input_noise.seed = substream_seed(seed, kStreamNoiseInput);
        super_noise.image_variance = super_config.noise_image_variance;
        super_noise.seed = substream_seed(seed, kStreamNoiseSuper);
    }

    const RawDataCube input_cube = synthesize_frame(scene, config, input_noise);
    pair.skipped_points_input = input_cube.skipped_points;
    pair.input_image = process_frame(input_cube, config, options);

    // Array-gain normalization: kappa-fold more virtual elements would collect
    // kappa-fold more energy per point through the unitary chain.
    Scene super_scene = scene;
    const double scale = 1.0 / std::sqrt(static_cast<double>(kappa));
    for (ReflectionPoint& p : super_scene.points) p.reflectivity *= scale;

    const RawDataCube super_cube = synthesize_frame(super_scene, super_config, super_noise);
    pair.skipped_points_super = super_cube.skipped_points;
    pair.super_image = process_frame(super_cube, super_config, options);
    return pair;
}

}  // namespace radsim
