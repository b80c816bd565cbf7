#include "radsim/synthesis.hpp"

#include <cmath>
#include <stdexcept>

#include "radsim/constants.hpp"
#include "radsim/random.hpp"

namespace radsim {

namespace {

double beat_frequency(const ReflectionPoint& point, const RadarConfig& config) {
    return 2.0 * config.chirp_slope_hz_per_s * point.range() / kSpeedOfLight;
}

double doppler_frequency(const ReflectionPoint& point, const RadarConfig& config) {
    return 2.0 * point.radial_velocity_mps * config.carrier_frequency_hz / kSpeedOfLight;
}

// Two-way delay for the exact (near-field) antenna geometry, frame-start range.
double path_delay(const ReflectionPoint& point, double tx_pos, double rx_pos) {
    const double d_tx = std::hypot(point.x_m - tx_pos, point.y_m);
    const double d_rx = std::hypot(point.x_m - rx_pos, point.y_m);
    return (d_tx + d_rx) / kSpeedOfLight;
}

}  // namespace

std::vector<std::complex<double>> synthesize_chirp_samples(const ReflectionPoint& point,
                                                           const RadarConfig& config,
                                                           std::uint32_t tx_index,
                                                           std::uint32_t rx_index,
                                                           std::uint32_t chirp_index) {
    if (tx_index >= config.tx_count() || rx_index >= config.rx_count()) {
        throw std::invalid_argument("synthesize_chirp_samples: antenna index out of range");
    }
    if (chirp_index >= config.chirps_per_frame) {
        throw std::invalid_argument("synthesize_chirp_samples: chirp index out of range");
    }
    const double tau =
        path_delay(point, config.tx_positions_m[tx_index], config.rx_positions_m[rx_index]);
    const double f_b = beat_frequency(point, config);
    const double f_d = doppler_frequency(point, config);
    const double carrier_phase = -kTwoPi * config.carrier_frequency_hz * tau;
    const double doppler_phase = -kTwoPi * f_d * chirp_index * config.chirp_duration_s;
    const std::complex<double> coeff =
        point.reflectivity * std::polar(1.0, carrier_phase + doppler_phase);

    std::vector<std::complex<double>> out(config.samples_per_chirp);
    for (std::uint32_t n = 0; n < config.samples_per_chirp; ++n) {
        out[n] = coeff * std::polar(1.0, kTwoPi * f_b * n / config.sampling_rate_hz);
    }
    return out;
}

RawDataCube synthesize_frame(const Scene& scene, const RadarConfig& config,
                             const NoiseSpec& noise) {
    config.validate();
    const ImageGrid grid = derive_image_grid(config);
    const VirtualArray array = derive_virtual_array(config);

    RawDataCube cube;
    cube.num_rx = config.rx_count();
    cube.num_chirps = config.chirps_per_frame;
    cube.num_samples = config.samples_per_chirp;
    cube.tx_schedule.resize(cube.num_chirps);
    for (std::uint32_t m = 0; m < cube.num_chirps; ++m) {
        cube.tx_schedule[m] = m % config.tx_count();
    }
    cube.samples.assign(static_cast<std::size_t>(cube.num_rx) * cube.num_chirps *
                            cube.num_samples,
                        std::complex<double>(0.0, 0.0));

    const std::uint32_t n_samples = cube.num_samples;
    const double grid_reach = grid.num_range_bins * grid.range_bin_spacing_m;
    std::vector<double> tone_re(n_samples), tone_im(n_samples);
    std::vector<std::complex<double>> antenna_coeff(config.tx_count() * config.rx_count());

    for (const ReflectionPoint& point : scene.points) {
        const double r = point.range();
        if (!(r > 0.0) || r >= grid_reach) {
            ++cube.skipped_points;
            continue;
        }
        // Beat tone, shared by every antenna and chirp (stop-and-hop).
        const double f_b = beat_frequency(point, config);
        const double step = kTwoPi * f_b / config.sampling_rate_hz;
        const std::complex<double> rot = std::polar(1.0, step);
        std::complex<double> tone(1.0, 0.0);
        for (std::uint32_t n = 0; n < n_samples; ++n) {
            tone_re[n] = tone.real();
            tone_im[n] = tone.imag();
            tone *= rot;
        }
        for (std::uint32_t i = 0; i < config.tx_count(); ++i) {
            for (std::uint32_t k = 0; k < config.rx_count(); ++k) {
                const double tau =
                    path_delay(point, config.tx_positions_m[i], config.rx_positions_m[k]);
                antenna_coeff[i * config.rx_count() + k] =
                    point.reflectivity *
                    std::polar(1.0, -kTwoPi * config.carrier_frequency_hz * tau);
            }
        }
        const double f_d = doppler_frequency(point, config);
        const std::complex<double> doppler_rot =
            std::polar(1.0, -kTwoPi * f_d * config.chirp_duration_s);
        std::complex<double> doppler(1.0, 0.0);
        for (std::uint32_t m = 0; m < cube.num_chirps; ++m) {
            const std::uint32_t tx = cube.tx_schedule[m];
            for (std::uint32_t k = 0; k < cube.num_rx; ++k) {
                const std::complex<double> w =
                    antenna_coeff[tx * config.rx_count() + k] * doppler;
                const double wr = w.real();
                const double wi = w.imag();
                // complex<double> rows are layout-compatible with double pairs
                double* row = reinterpret_cast<double*>(
                    &cube.at(k, m, 0));
                for (std::uint32_t n = 0; n < n_samples; ++n) {
                    row[2 * n] += wr * tone_re[n] - wi * tone_im[n];
                    row[2 * n + 1] += wr * tone_im[n] + wi * tone_re[n];
                }
            }
            doppler *= doppler_rot;
        }
    }

    if (noise.image_variance > 0.0) {
        const double raw_variance =
            noise.image_variance * grid.num_angle_bins / static_cast<double>(array.count());
        const double sigma = std::sqrt(raw_variance);
        RandomSource rng(noise.seed);
        for (std::complex<double>& s : cube.samples) {
            double a, b;
            rng.gaussian_pair(a, b);
            s += std::complex<double>(sigma * a, sigma * b);
        }
    }
    return cube;
}

}  // namespace radsim
