#include "radsim/groundtruth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "radsim/numeric.hpp"
#include "radsim/random.hpp"
#include "radsim/synthesis.hpp"

namespace radsim {

double SigmaModel::sigma_s_sq(double range_m) const {
    const double r = std::max(range_m, clamp_range_m);
    return 100.0 * r_max_m * r_max_m * sigma_n_sq / (r * r);
}

double intensity_to_probability(double intensity, double sigma_s_sq, double sigma_n_sq) {
    if (sigma_s_sq <= 0.0 || sigma_n_sq <= 0.0) {
        throw std::invalid_argument("intensity_to_probability: variances must be positive");
    }
    const double ratio = sigma_s_sq / sigma_n_sq;
    const double exponent = intensity * (0.5 / sigma_n_sq - 0.5 / sigma_s_sq);
    return 1.0 / (1.0 + ratio * std::exp(-exponent));
}

ProbabilityMap probability_map(const RadarImage& image, const SigmaModel& model) {
    ProbabilityMap map;
    map.num_range_bins = image.num_range_bins;
    map.num_angle_bins = image.num_angle_bins;
    map.range_bin_spacing_m = image.range_bin_spacing_m;
    map.values.resize(static_cast<std::size_t>(image.num_range_bins) * image.num_angle_bins);
    for (std::uint32_t n = 0; n < image.num_range_bins; ++n) {
        const double sigma_s = model.sigma_s_sq(image.range_of(n));
        for (std::uint32_t l = 0; l < image.num_angle_bins; ++l) {
            map.values[map.index(n, l)] = static_cast<float>(
                intensity_to_probability(image.intensity(n, l), sigma_s, model.sigma_n_sq));
        }
    }
    return map;
}

ProbabilityMap binary_map(const RadarImage& image, double intensity_threshold) {
    if (intensity_threshold <= 0.0) {
        throw std::invalid_argument("binary_map: threshold must be positive");
    }
    ProbabilityMap map;
    map.num_range_bins = image.num_range_bins;
    map.num_angle_bins = image.num_angle_bins;
    map.range_bin_spacing_m = image.range_bin_spacing_m;
    map.values.resize(static_cast<std::size_t>(image.num_range_bins) * image.num_angle_bins);
    for (std::uint32_t n = 0; n < image.num_range_bins; ++n) {
        for (std::uint32_t l = 0; l < image.num_angle_bins; ++l) {
            map.values[map.index(n, l)] =
                image.intensity(n, l) >= intensity_threshold ? 1.0f : 0.0f;
        }
    }
    return map;
}

std::size_t PixelPartition::count(PixelSet set) const {
    return static_cast<std::size_t>(
        std::count(labels.begin(), labels.end(), static_cast<std::uint8_t>(set)));
}

PixelPartition partition_pixels(const RadarImage& input_image, const Scene& scene,
                                double noise_std, const ImageGrid& grid) {
    if (noise_std <= 0.0) {
        throw std::invalid_argument("partition_pixels: noise_std must be positive");
    }
    if (grid.num_range_bins != input_image.num_range_bins ||
        grid.num_angle_bins % input_image.num_angle_bins != 0 ||
        std::abs(grid.range_bin_spacing_m - input_image.range_bin_spacing_m) >
            1e-9 * grid.range_bin_spacing_m) {
        throw std::invalid_argument(
            "partition_pixels: grid is not a refinement of the input image grid");
    }
    const std::uint32_t refine = grid.num_angle_bins / input_image.num_angle_bins;

    PixelPartition part;
    part.num_range_bins = grid.num_range_bins;
    part.num_angle_bins = grid.num_angle_bins;
    part.amplitude_threshold = noise_std * std::pow(10.0, 8.0 / 20.0);
    part.labels.assign(static_cast<std::size_t>(grid.num_range_bins) * grid.num_angle_bins,
                       static_cast<std::uint8_t>(PixelSet::kNoise));

    // Spread set: input-image amplitude at the input cell containing each
    // ground-truth pixel center (nearest input center; exact because the
    // grids align).
    for (std::uint32_t n = 0; n < grid.num_range_bins; ++n) {
        for (std::uint32_t l = 0; l < grid.num_angle_bins; ++l) {
            const std::uint32_t input_l =
                std::min((l + refine / 2) / refine,
                         input_image.num_angle_bins - 1);
            if (input_image.amplitude(n, input_l) >= part.amplitude_threshold) {
                part.labels[part.index(n, l)] = static_cast<std::uint8_t>(PixelSet::kSpread);
            }
        }
    }
    // Reflection set overrides: cells of the ground-truth grid holding points.
    for (const ReflectionPoint& p : scene.points) {
        const double r = p.range();
        if (r <= 0.0 || r >= grid.num_range_bins * grid.range_bin_spacing_m) continue;
        const std::uint32_t n = grid.range_bin_of(r);
        const std::uint32_t l = grid.angle_bin_of(p.sin_azimuth());
        part.labels[part.index(n, l)] = static_cast<std::uint8_t>(PixelSet::kReflection);
    }
    return part;
}

double calibration_noise_std(const RadarConfig& config, double image_variance,
                             std::uint64_t seed) {
    Scene empty;
    NoiseSpec noise;
    noise.image_variance = image_variance;
    noise.seed = substream_seed(seed, kStreamCalibration);
    const RawDataCube raw = synthesize_frame(empty, config, noise);
    const RangeDopplerAngleCube cube = beamform(doppler_fft(range_fft(raw), config), config);
    std::vector<double> power(cube.data.size());
    for (std::size_t i = 0; i < power.size(); ++i) {
        power[i] = std::norm(cube.data[i]);
    }
    return std::sqrt(pairwise_sum(power) / static_cast<double>(power.size()));
}

namespace {

inline double bce(double p, double p_hat) {
    constexpr double kClamp = 1.0e-7;
    double loss = 0.0;
    if (p > 0.0) loss -= p * std::log(std::max(p_hat, kClamp));
    if (p < 1.0) loss -= (1.0 - p) * std::log(std::max(1.0 - p_hat, kClamp));
    return loss;
}

}  // namespace

double boost_loss(const ProbabilityMap& truth, const ProbabilityMap& prediction,
                  const PixelPartition& partition, const LossOptions& options) {
    const std::size_t pixels = truth.values.size();
    if (prediction.values.size() != pixels || partition.labels.size() != pixels ||
        truth.num_angle_bins != prediction.num_angle_bins ||
        truth.num_angle_bins != partition.num_angle_bins) {
        throw std::invalid_argument("boost_loss: shape mismatch");
    }

    std::vector<double> terms[3];
    for (auto& t : terms) t.reserve(pixels);
    for (std::size_t i = 0; i < pixels; ++i) {
        const double p = truth.values[i];
        const double p_hat = prediction.values[i];
        const double d = options.variant == LossVariant::kCrossEntropy
                             ? bce(p, p_hat)
                             : std::abs(p - p_hat);
        terms[partition.labels[i]].push_back(d);
    }

    auto reduce = [&](PixelSet set) {
        const auto& t = terms[static_cast<std::uint8_t>(set)];
        double sum = pairwise_sum(t);
        if (options.per_set_mean && !t.empty()) sum /= static_cast<double>(t.size());
        return sum;
    };
    return options.weights.rho_n * reduce(PixelSet::kNoise) +
           options.weights.rho_r * reduce(PixelSet::kReflection) +
           options.weights.rho_s * reduce(PixelSet::kSpread);
}

}  // namespace radsim
