#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "radsim/radar_config.hpp"
#include "radsim/scene.hpp"

namespace radsim {

// Additive complex white noise, calibrated so the processed range-Doppler-
// angle cube has per-quadrature pixel variance `image_variance` (the raw
// per-sample variance is image_variance * angle_bins / n_virtual; the unitary
// chain with unit-RMS windows preserves it apart from the zero-padded
// beamforming, which scales by n_virtual / angle_bins).
struct NoiseSpec {
    double image_variance = 0.0;  // 0 disables noise
    std::uint64_t seed = 0;
};

// Dechirped (beat-domain) samples, row-major [rx][chirp][sample].
struct RawDataCube {
    std::uint32_t num_rx = 0;
    std::uint32_t num_chirps = 0;
    std::uint32_t num_samples = 0;
    std::vector<std::uint32_t> tx_schedule;  // transmitting Tx per chirp
    std::vector<std::complex<double>> samples;
    std::uint64_t skipped_points = 0;  // scene points outside the image grid

    std::complex<double>& at(std::uint32_t rx, std::uint32_t chirp, std::uint32_t n) {
        return samples[(static_cast<std::size_t>(rx) * num_chirps + chirp) * num_samples + n];
    }
    const std::complex<double>& at(std::uint32_t rx, std::uint32_t chirp,
                                   std::uint32_t n) const {
        return samples[(static_cast<std::size_t>(rx) * num_chirps + chirp) * num_samples + n];
    }
};

// Beat samples of a single point for one (tx, rx, chirp): amplitude c_q, beat
// tone exp(+j*2*pi*f_b*n/f_s) with f_b = 2*alpha*r/c, carrier phase
// exp(-j*2*pi*f_c*tau) with tau = (d_tx + d_rx)/c from the exact antenna
// geometry, Doppler progression exp(-j*2*pi*(2*v*f_c/c)*chirp_index*T_c).
// Stop-and-hop: range is frozen at its frame-start value.
std::vector<std::complex<double>> synthesize_chirp_samples(const ReflectionPoint& point,
                                                           const RadarConfig& config,
                                                           std::uint32_t tx_index,
                                                           std::uint32_t rx_index,
                                                           std::uint32_t chirp_index);

// Full TDM frame: superposition of all scene points plus calibrated noise.
// Points outside the image grid's range extent are skipped and counted.
RawDataCube synthesize_frame(const Scene& scene, const RadarConfig& config,
                             const NoiseSpec& noise);

}  // namespace radsim
