#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "radsim/constants.hpp"
#include "radsim/radar_config.hpp"

using namespace radsim;

TEST_CASE("default config is valid and hits the documented grid") {
    RadarConfig cfg = default_config();
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.tx_count() == 4);
    CHECK(cfg.rx_count() == 8);
    CHECK(cfg.chirps_per_tx() == 16);
    CHECK(cfg.effective_angle_bins() == 64);

    ImageGrid grid = derive_image_grid(cfg);
    CHECK(grid.num_range_bins == 256);
    CHECK(grid.num_angle_bins == 64);
    CHECK(grid.range_bin_spacing_m == doctest::Approx(0.28).epsilon(1e-12));
    // 30 m sits in range bin 107 on the 0.28 m grid.
    CHECK(grid.range_bin_of(30.0) == 107);
    // sin(az) = 0.25 is angle bin 40 of 64.
    CHECK(grid.angle_bin_of(0.25) == 40);
    CHECK(grid.sin_azimuth_of(40) == 0.25);
    CHECK(grid.sin_azimuth_of(0) == -1.0);
}

TEST_CASE("virtual array enumerates all tx+rx sums in order") {
    RadarConfig cfg = default_config();
    VirtualArray array = derive_virtual_array(cfg);
    REQUIRE(array.count() == 32);
    CHECK(array.uniform);
    const double half_wl = 0.5 * cfg.wavelength_m();
    CHECK(array.spacing_m == doctest::Approx(half_wl).epsilon(1e-12));

    // Oracle: brute-force the 32 pairwise sums and sort.
    std::vector<double> expected;
    for (double t : cfg.tx_positions_m) {
        for (double r : cfg.rx_positions_m) {
            expected.push_back(t + r);
        }
    }
    std::sort(expected.begin(), expected.end());
    for (std::size_t v = 0; v < expected.size(); ++v) {
        CHECK(array.elements[v].position_m == doctest::Approx(expected[v]).epsilon(1e-12));
    }
    // The reference layout is a gap-free half-wavelength ULA.
    for (std::size_t v = 0; v < expected.size(); ++v) {
        CHECK(array.elements[v].position_m ==
              doctest::Approx(v * half_wl).epsilon(1e-9));
    }
}

TEST_CASE("duplicate virtual positions are rejected with context") {
    RadarConfig cfg = default_config();
    const double half_wl = 0.5 * cfg.wavelength_m();
    cfg.tx_positions_m = {0.0, half_wl};
    cfg.rx_positions_m = {0.0, half_wl};  // (tx1, rx0) collides with (tx0, rx1)
    CHECK_THROWS_AS(derive_virtual_array(cfg), std::invalid_argument);
}

TEST_CASE("validate rejects broken configs") {
    RadarConfig good = default_config();

    RadarConfig c = good;
    c.carrier_frequency_hz = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = good;
    c.chirp_duration_s = 5.0e-6;  // shorter than the 256-sample window at 25 MHz
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = good;
    c.chirps_per_frame = 63;  // not divisible by 4 Tx
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = good;
    c.angle_bins = 16;  // below the 32-element virtual array
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = good;
    std::swap(c.rx_positions_m[2], c.rx_positions_m[3]);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = good;
    c.noise_image_variance = -1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("angle grid refinement is exact") {
    ImageGrid coarse{0.28, 256, 64};
    ImageGrid fine{0.28, 256, 64 * 12};
    for (std::uint32_t l = 0; l < coarse.num_angle_bins; ++l) {
        // Bitwise equality: the shared bins of a 12-fold refinement coincide.
        CHECK(fine.sin_azimuth_of(12 * l) == coarse.sin_azimuth_of(l));
    }
}

TEST_CASE("grid lookups clamp to the edges") {
    ImageGrid grid{0.28, 256, 64};
    CHECK(grid.range_bin_of(-5.0) == 0);
    CHECK(grid.range_bin_of(1e6) == 255);
    CHECK(grid.angle_bin_of(-1.5) == 0);
    CHECK(grid.angle_bin_of(1.5) == 63);
    CHECK(grid.max_range() == doctest::Approx(255 * 0.28));
}

TEST_CASE("config JSON round-trips and accepts partial files") {
    RadarConfig cfg = default_config();
    cfg.angle_bins = 128;
    RadarConfig back = config_from_json(config_to_json(cfg));
    CHECK(config_digest(back) == config_digest(cfg));

    // Partial objects override the defaults field by field.
    RadarConfig partial = config_from_json(R"({"angle_bins": 256})");
    CHECK(partial.angle_bins == 256);
    CHECK(partial.carrier_frequency_hz == default_config().carrier_frequency_hz);

    CHECK_THROWS_AS(config_from_json(R"({"angel_bins": 256})"), std::runtime_error);
    CHECK_THROWS_AS(config_from_json("not json"), std::runtime_error);
    CHECK_THROWS_AS(config_from_json("[1,2]"), std::runtime_error);
}

TEST_CASE("config files save and load with path context on errors") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "radsim_config_test";
    fs::create_directories(dir);
    const std::string path = (dir / "cfg.json").string();

    RadarConfig cfg = default_config();
    cfg.max_range_m = 42.0;
    save_config(cfg, path);
    RadarConfig back = load_config(path);
    CHECK(back.max_range_m == 42.0);
    CHECK(config_digest(back) == config_digest(cfg));

    CHECK_THROWS_WITH_AS(load_config((dir / "missing.json").string()),
                         doctest::Contains("missing.json"), std::runtime_error);
    fs::remove_all(dir);
}
