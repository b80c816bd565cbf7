#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "radsim/fft.hpp"
#include "radsim/radar_config.hpp"
#include "radsim/synthesis.hpp"

namespace radsim {

struct ProcessingOptions {
    Window range_window = Window::kRectangular;
    Window doppler_window = Window::kRectangular;
    Window angle_window = Window::kRectangular;
};

// Stage 1 output: forward unitary FFT along fast time, [rx][chirp][range_bin].
struct RangeSpectra {
    std::uint32_t num_rx = 0;
    std::uint32_t num_chirps = 0;
    std::uint32_t num_range_bins = 0;
    std::vector<std::uint32_t> tx_schedule;
    std::vector<std::complex<double>> data;

    std::complex<double>& at(std::uint32_t rx, std::uint32_t chirp, std::uint32_t bin) {
        return data[(static_cast<std::size_t>(rx) * num_chirps + chirp) * num_range_bins + bin];
    }
    const std::complex<double>& at(std::uint32_t rx, std::uint32_t chirp,
                                   std::uint32_t bin) const {
        return data[(static_cast<std::size_t>(rx) * num_chirps + chirp) * num_range_bins + bin];
    }
};

// Stage 2 output: per-Tx Doppler maps, [tx][rx][doppler][range_bin]. The
// Doppler axis is stored centered (fftshifted): index j holds signed bin
// b = j - num_doppler/2. Conjugate-kernel unitary DFT over the M/I chirps of
// each Tx, so positive radial velocity (receding) lands at positive b.
struct TxDopplerMaps {
    std::uint32_t num_tx = 0;
    std::uint32_t num_rx = 0;
    std::uint32_t num_doppler = 0;
    std::uint32_t num_range_bins = 0;
    std::vector<std::complex<double>> data;

    std::complex<double>& at(std::uint32_t tx, std::uint32_t rx, std::uint32_t j,
                             std::uint32_t bin) {
        return data[((static_cast<std::size_t>(tx) * num_rx + rx) * num_doppler + j) *
                        num_range_bins +
                    bin];
    }
    const std::complex<double>& at(std::uint32_t tx, std::uint32_t rx, std::uint32_t j,
                                   std::uint32_t bin) const {
        return data[((static_cast<std::size_t>(tx) * num_rx + rx) * num_doppler + j) *
                        num_range_bins +
                    bin];
    }
};

// Stage 3 output: [range][doppler][angle], angle axis centered on the uniform
// sin-azimuth grid s_l = -1 + 2l/L.
struct RangeDopplerAngleCube {
    std::uint32_t num_range_bins = 0;
    std::uint32_t num_doppler = 0;
    std::uint32_t num_angle_bins = 0;
    double range_bin_spacing_m = 0.0;
    double velocity_bin_mps = 0.0;

    std::vector<std::complex<double>> data;

    std::complex<double>& at(std::uint32_t n, std::uint32_t j, std::uint32_t l) {
        return data[(static_cast<std::size_t>(n) * num_doppler + j) * num_angle_bins + l];
    }
    const std::complex<double>& at(std::uint32_t n, std::uint32_t j, std::uint32_t l) const {
        return data[(static_cast<std::size_t>(n) * num_doppler + j) * num_angle_bins + l];
    }
    double velocity_of(std::uint32_t j) const {
        return (static_cast<double>(j) - static_cast<double>(num_doppler / 2)) *
               velocity_bin_mps;
    }
    double sin_azimuth_of(std::uint32_t l) const {
        return -1.0 + (2.0 * l) / num_angle_bins;
    }
};

// Three-channel reflection image: real/imag of the strongest Doppler bin per
// (range, angle) pixel plus that bin's radial velocity.
struct RadarImage {
    std::uint32_t num_range_bins = 0;
    std::uint32_t num_angle_bins = 0;
    double range_bin_spacing_m = 0.0;
    std::vector<float> real;
    std::vector<float> imag;
    std::vector<float> doppler_mps;

    std::size_t index(std::uint32_t n, std::uint32_t l) const {
        return static_cast<std::size_t>(n) * num_angle_bins + l;
    }
    double intensity(std::uint32_t n, std::uint32_t l) const {
        const std::size_t i = index(n, l);
        return static_cast<double>(real[i]) * real[i] + static_cast<double>(imag[i]) * imag[i];
    }
    double amplitude(std::uint32_t n, std::uint32_t l) const;
    double range_of(std::uint32_t n) const { return n * range_bin_spacing_m; }
    double sin_azimuth_of(std::uint32_t l) const { return -1.0 + (2.0 * l) / num_angle_bins; }
};

RangeSpectra range_fft(const RawDataCube& cube, Window window = Window::kRectangular);

// Regroups chirps by Tx (M/I per Tx at spacing I*T_c) and transforms slow time.
TxDopplerMaps doppler_fft(const RangeSpectra& spectra, const RadarConfig& config,
                          Window window = Window::kRectangular);

// Zero-padded conjugate-kernel unitary DFT across the virtual elements onto
// the sin-azimuth grid. Applies the analytic TDM Doppler phase compensation
// exp(+j*2*pi*f_D(b)*tx*T_c) per Doppler bin before combining Tx groups.
// Requires a uniform half-wavelength virtual array.
RangeDopplerAngleCube beamform(const TxDopplerMaps& maps, const RadarConfig& config,
                               Window window = Window::kRectangular);

// Argmax-|.|^2 over Doppler per pixel, ties toward the lowest bin index.
RadarImage extract_channels(const RangeDopplerAngleCube& cube);

// Full chain for one frame.
RadarImage process_frame(const RawDataCube& cube, const RadarConfig& config,
                         const ProcessingOptions& options = {});

struct CartesianSpec {
    double pixel_size_m = 0.25;
    double x_half_extent_m = 0.0;  // 0 = grid reach
    double y_extent_m = 0.0;       // 0 = grid reach
};

struct CartesianImage {
    std::uint32_t ny = 0;
    std::uint32_t nx = 0;
    double pixel_size_m = 0.0;
    double x0_m = 0.0;  // x of column 0
    double y0_m = 0.0;  // y of row 0
    std::vector<float> values;
    std::vector<std::uint8_t> valid;  // 0 where outside the polar grid

    std::size_t index(std::uint32_t iy, std::uint32_t ix) const {
        return static_cast<std::size_t>(iy) * nx + ix;
    }
};

enum class ImageChannel { kReal, kImag, kDoppler, kIntensity };

// Bilinear resampling from the (range, sin-azimuth) grid onto a Cartesian
// bird's-eye grid; pixels outside the polar grid are zero and flagged invalid.
CartesianImage to_cartesian(const RadarImage& image, ImageChannel channel,
                            const CartesianSpec& spec = {});

struct PsfMetrics {
    std::uint32_t peak_range_bin = 0;
    double peak_sin_azimuth = 0.0;
    double mainlobe_width_sin = 0.0;  // -3 dB full width, sin units
    double first_sidelobe_db = 0.0;   // relative to the peak (negative)
    std::vector<double> cut_sin;      // oversampled angle axis
    std::vector<double> cut_amplitude;
};

// Point-spread measurement: synthesizes a unit point at (sin az = 0, range),
// locates the peak (range, Doppler) cell, then renders the angle cut with one
// zero-padded transform at `oversampled_bins` (exact interpolation of the
// array factor) and measures the -3 dB width and first side-lobe level.
PsfMetrics measure_psf(const RadarConfig& config, double point_range_m,
                       std::uint32_t oversampled_bins = 16384,
                       Window angle_window = Window::kRectangular);

}  // namespace radsim
