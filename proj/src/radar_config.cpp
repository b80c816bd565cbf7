#include "radsim/radar_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "radsim/constants.hpp"

namespace radsim {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("radar config: " + what);
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) return false;
    }
    return true;
}

}  // namespace

double RadarConfig::wavelength_m() const {
    return kSpeedOfLight / carrier_frequency_hz;
}

std::uint32_t RadarConfig::chirps_per_tx() const {
    return chirps_per_frame / tx_count();
}

std::uint32_t RadarConfig::effective_angle_bins() const {
    if (angle_bins != 0) return angle_bins;
    return 2 * tx_count() * rx_count();
}

void RadarConfig::validate() const {
    require(carrier_frequency_hz > 0.0, "carrier_frequency_hz must be positive");
    require(chirp_slope_hz_per_s > 0.0, "chirp_slope_hz_per_s must be positive");
    require(sampling_rate_hz > 0.0, "sampling_rate_hz must be positive");
    require(samples_per_chirp > 0, "samples_per_chirp must be positive");
    require(chirps_per_frame > 0, "chirps_per_frame must be positive");
    require(chirp_duration_s * sampling_rate_hz >= static_cast<double>(samples_per_chirp),
            "chirp shorter than the sampled window (T_c * f_s < N)");
    require(!tx_positions_m.empty(), "tx_positions_m must not be empty");
    require(!rx_positions_m.empty(), "rx_positions_m must not be empty");
    require(strictly_increasing(tx_positions_m), "tx_positions_m must be strictly increasing");
    require(strictly_increasing(rx_positions_m), "rx_positions_m must be strictly increasing");
    require(chirps_per_frame % tx_count() == 0,
            "chirps_per_frame must be divisible by the Tx count (TDM schedule)");
    require(noise_image_variance >= 0.0, "noise_image_variance must be non-negative");
    require(max_range_m > 0.0, "max_range_m must be positive");
    const std::uint32_t virtual_count = tx_count() * rx_count();
    require(effective_angle_bins() >= virtual_count,
            "angle_bins must be at least the virtual element count");
}

RadarConfig default_config() {
    RadarConfig cfg;
    cfg.carrier_frequency_hz = 77.0e9;
    cfg.sampling_rate_hz = 25.0e6;
    cfg.samples_per_chirp = 256;
    // Slope set so the range-bin spacing c*f_s/(2*alpha*N) is 0.28 m.
    cfg.chirp_slope_hz_per_s =
        kSpeedOfLight * cfg.sampling_rate_hz / (2.0 * 0.28 * cfg.samples_per_chirp);
    cfg.chirp_duration_s = 12.0e-6;
    cfg.chirps_per_frame = 64;
    const double half_wl = 0.5 * cfg.wavelength_m();
    for (int i = 0; i < 4; ++i) cfg.tx_positions_m.push_back(i * 8.0 * half_wl);
    for (int k = 0; k < 8; ++k) cfg.rx_positions_m.push_back(k * half_wl);
    cfg.noise_image_variance = 8.0e-5;
    cfg.max_range_m = 50.0;
    cfg.angle_bins = 64;
    return cfg;
}

VirtualArray derive_virtual_array(const RadarConfig& config) {
    VirtualArray array;
    array.elements.reserve(config.tx_positions_m.size() * config.rx_positions_m.size());
    for (std::uint32_t i = 0; i < config.tx_count(); ++i) {
        for (std::uint32_t k = 0; k < config.rx_count(); ++k) {
            array.elements.push_back(
                {config.tx_positions_m[i] + config.rx_positions_m[k], i, k});
        }
    }
    std::sort(array.elements.begin(), array.elements.end(),
              [](const VirtualElement& a, const VirtualElement& b) {
                  return a.position_m < b.position_m;
              });
    const double tol = 1e-12;
    for (std::size_t v = 1; v < array.elements.size(); ++v) {
        if (array.elements[v].position_m - array.elements[v - 1].position_m < tol) {
            std::ostringstream msg;
            msg << "virtual array: duplicate element position " << array.elements[v].position_m
                << " (tx " << array.elements[v].tx << ", rx " << array.elements[v].rx << ")";
            throw std::invalid_argument(msg.str());
        }
    }
    if (array.elements.size() >= 2) {
        const double first = array.elements[1].position_m - array.elements[0].position_m;
        array.uniform = true;
        for (std::size_t v = 1; v < array.elements.size(); ++v) {
            const double d = array.elements[v].position_m - array.elements[v - 1].position_m;
            if (std::abs(d - first) > 1e-9) {
                array.uniform = false;
                break;
            }
        }
        array.spacing_m = array.uniform ? first : 0.0;
    } else {
        array.uniform = true;
        array.spacing_m = 0.0;
    }
    return array;
}

std::vector<double> ImageGrid::sin_azimuth_values() const {
    std::vector<double> values(num_angle_bins);
    for (std::uint32_t l = 0; l < num_angle_bins; ++l) values[l] = sin_azimuth_of(l);
    return values;
}

std::uint32_t ImageGrid::range_bin_of(double range_m) const {
    const long bin = std::lround(range_m / range_bin_spacing_m);
    if (bin < 0) return 0;
    if (bin >= static_cast<long>(num_range_bins)) return num_range_bins - 1;
    return static_cast<std::uint32_t>(bin);
}

std::uint32_t ImageGrid::angle_bin_of(double sin_azimuth) const {
    const long bin = std::lround((sin_azimuth + 1.0) * 0.5 * num_angle_bins);
    if (bin < 0) return 0;
    if (bin >= static_cast<long>(num_angle_bins)) return num_angle_bins - 1;
    return static_cast<std::uint32_t>(bin);
}

ImageGrid derive_image_grid(const RadarConfig& config) {
    ImageGrid grid;
    grid.range_bin_spacing_m = kSpeedOfLight * config.sampling_rate_hz /
                               (2.0 * config.chirp_slope_hz_per_s * config.samples_per_chirp);
    grid.num_range_bins = config.samples_per_chirp;
    grid.num_angle_bins = config.effective_angle_bins();
    return grid;
}

namespace {

nlohmann::json config_json(const RadarConfig& c) {
    nlohmann::json j;
    j["carrier_frequency_hz"] = c.carrier_frequency_hz;
    j["chirp_slope_hz_per_s"] = c.chirp_slope_hz_per_s;
    j["chirp_duration_s"] = c.chirp_duration_s;
    j["chirps_per_frame"] = c.chirps_per_frame;
    j["sampling_rate_hz"] = c.sampling_rate_hz;
    j["samples_per_chirp"] = c.samples_per_chirp;
    j["tx_positions_m"] = c.tx_positions_m;
    j["rx_positions_m"] = c.rx_positions_m;
    j["noise_image_variance"] = c.noise_image_variance;
    j["max_range_m"] = c.max_range_m;
    j["angle_bins"] = c.angle_bins;
    return j;
}

}  // namespace

std::string config_to_json(const RadarConfig& config) {
    return config_json(config).dump(2);
}

RadarConfig config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("config must be a JSON object");
    // Fields present in the file override the built-in defaults.
    RadarConfig c = default_config();
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "carrier_frequency_hz") value.get_to(c.carrier_frequency_hz);
            else if (key == "chirp_slope_hz_per_s") value.get_to(c.chirp_slope_hz_per_s);
            else if (key == "chirp_duration_s") value.get_to(c.chirp_duration_s);
            else if (key == "chirps_per_frame") value.get_to(c.chirps_per_frame);
            else if (key == "sampling_rate_hz") value.get_to(c.sampling_rate_hz);
            else if (key == "samples_per_chirp") value.get_to(c.samples_per_chirp);
            else if (key == "tx_positions_m") value.get_to(c.tx_positions_m);
            else if (key == "rx_positions_m") value.get_to(c.rx_positions_m);
            else if (key == "noise_image_variance") value.get_to(c.noise_image_variance);
            else if (key == "max_range_m") value.get_to(c.max_range_m);
            else if (key == "angle_bins") value.get_to(c.angle_bins);
            else throw std::runtime_error("unknown config field: " + key);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("config field error: ") + e.what());
    }
    return c;
}

RadarConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return config_from_json(buf.str());
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_config(const RadarConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << config_to_json(config) << "\n";
}

std::uint64_t config_digest(const RadarConfig& config) {
    const std::string text = config_json(config).dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char byte : text) {
        hash ^= byte;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace radsim
