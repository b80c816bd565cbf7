#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace radsim {

// FMCW MIMO radar description. Geometry: antennas sit on a linear axis through
// the origin, boresight points along +y, azimuth is measured counterclockwise
// from boresight (so sin(azimuth) = -x/r for a target at (x, y)). Transmitters
// are time-multiplexed: chirp m uses Tx (m mod tx_count).
struct RadarConfig {
    double carrier_frequency_hz = 0.0;
    double chirp_slope_hz_per_s = 0.0;
    double chirp_duration_s = 0.0;
    std::uint32_t chirps_per_frame = 0;
    double sampling_rate_hz = 0.0;
    std::uint32_t samples_per_chirp = 0;
    std::vector<double> tx_positions_m;
    std::vector<double> rx_positions_m;
    double noise_image_variance = 0.0;  // per-quadrature pixel variance sigma_n^2
    double max_range_m = 0.0;
    std::uint32_t angle_bins = 0;  // 0 = derive as 2 * virtual element count

    double wavelength_m() const;
    std::uint32_t tx_count() const { return static_cast<std::uint32_t>(tx_positions_m.size()); }
    std::uint32_t rx_count() const { return static_cast<std::uint32_t>(rx_positions_m.size()); }
    // Chirps per Tx in the TDM schedule (chirps_per_frame / tx_count).
    std::uint32_t chirps_per_tx() const;
    std::uint32_t effective_angle_bins() const;

    // Throws std::invalid_argument on the first violated invariant.
    void validate() const;
};

// Reference configuration: 77 GHz, 25 MHz sampling, 256 samples/chirp with the
// slope chosen for 0.28 m range spacing, 64 chirps of 12 us, 4 Tx / 8 Rx
// forming a 32-element half-wavelength uniform virtual array, sigma_n^2 = 8e-5,
// 50 m max range.
RadarConfig default_config();

struct VirtualElement {
    double position_m = 0.0;
    std::uint32_t tx = 0;
    std::uint32_t rx = 0;
};

struct VirtualArray {
    std::vector<VirtualElement> elements;  // sorted by position
    bool uniform = false;
    double spacing_m = 0.0;  // common spacing when uniform, else 0

    std::size_t count() const { return elements.size(); }
};

// One virtual element per (tx, rx) pair at position tx + rx, sorted ascending.
// Throws std::invalid_argument if two pairs land on the same position.
VirtualArray derive_virtual_array(const RadarConfig& config);

struct ImageGrid {
    double range_bin_spacing_m = 0.0;
    std::uint32_t num_range_bins = 0;
    std::uint32_t num_angle_bins = 0;

    double range_of(std::uint32_t bin) const { return bin * range_bin_spacing_m; }
    // Uniform sin-azimuth grid on [-1, 1): s_l = -1 + 2l/L. Computed with a
    // single exact-integer division so a kappa-fold refinement reproduces the
    // coarse values bit for bit.
    double sin_azimuth_of(std::uint32_t bin) const {
        return -1.0 + (2.0 * bin) / num_angle_bins;
    }
    std::vector<double> sin_azimuth_values() const;
    double max_range() const { return (num_range_bins - 1) * range_bin_spacing_m; }
    bool covers(double range_m) const { return num_range_bins * range_bin_spacing_m >= range_m; }

    // Nearest-center bin lookups, clamped to the grid.
    std::uint32_t range_bin_of(double range_m) const;
    std::uint32_t angle_bin_of(double sin_azimuth) const;
};

// Range spacing c*f_s/(2*alpha*N), N range bins, angle_bins sin-azimuth bins.
ImageGrid derive_image_grid(const RadarConfig& config);

// Structured text (JSON) config file, field names exactly as in RadarConfig.
RadarConfig load_config(const std::string& path);
void save_config(const RadarConfig& config, const std::string& path);
std::string config_to_json(const RadarConfig& config);
RadarConfig config_from_json(const std::string& text);

// FNV-1a 64 digest of the canonical JSON form; used in manifests.
std::uint64_t config_digest(const RadarConfig& config);

}  // namespace radsim
