#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "radsim/constants.hpp"
#include "radsim/dsp.hpp"
#include "radsim/fft.hpp"
#include "radsim/radar_config.hpp"
#include "radsim/random.hpp"
#include "radsim/scene.hpp"
#include "radsim/synthesis.hpp"

using namespace radsim;

namespace {

// O(n^2) reference DFT with the same unitary convention.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& in,
                                            bool inverse) {
    const std::size_t n = in.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            acc += in[t] * std::polar(1.0, sign * kTwoPi * static_cast<double>(k * t) / n);
        }
        out[k] = acc / std::sqrt(static_cast<double>(n));
    }
    return out;
}

std::vector<std::complex<double>> random_signal(std::size_t n, std::uint64_t seed) {
    RandomSource rng(seed);
    std::vector<std::complex<double>> v(n);
    for (auto& x : v) {
        x = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    }
    return v;
}

double total_energy(const std::vector<std::complex<double>>& v) {
    double e = 0.0;
    for (const auto& x : v) e += std::norm(x);
    return e;
}

ReflectionPoint grid_point(const ImageGrid& grid, std::uint32_t n, std::uint32_t l, double v,
                           std::complex<double> c) {
    ReflectionPoint p;
    const double r = grid.range_of(n);
    const double s = grid.sin_azimuth_of(l);
    p.x_m = -s * r;
    p.y_m = r * std::sqrt(1.0 - s * s);
    p.radial_velocity_mps = v;
    p.reflectivity = c;
    return p;
}

// Normalized power pattern of a V-element half-wavelength uniform array
// (Dirichlet kernel), evaluated at sin-azimuth s.
double dirichlet_power(std::size_t v_count, double s) {
    const double x = 0.5 * kPi * s;
    const double denom = std::sin(x);
    if (std::abs(denom) < 1e-300) return 1.0;
    const double num = std::sin(static_cast<double>(v_count) * x);
    const double a = num / (static_cast<double>(v_count) * denom);
    return a * a;
}

// -3 dB full width of the Dirichlet main lobe via bisection.
double dirichlet_halfpower_width(std::size_t v_count) {
    double lo = 0.0, hi = 2.0 / static_cast<double>(v_count);
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (dirichlet_power(v_count, mid) > 0.5) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo + hi;  // 2 * half-width
}

// Level of the first side lobe (dB below peak) via a fine scan past the null.
double dirichlet_first_sidelobe_db(std::size_t v_count) {
    const double null1 = 2.0 / static_cast<double>(v_count);
    const double null2 = 4.0 / static_cast<double>(v_count);
    double best = 0.0;
    const int steps = 200000;
    for (int i = 0; i <= steps; ++i) {
        const double s = null1 + (null2 - null1) * i / steps;
        best = std::max(best, dirichlet_power(v_count, s));
    }
    return 10.0 * std::log10(best);
}

}  // namespace

TEST_CASE("unitary FFT matches the reference DFT both ways") {
    for (std::size_t n : {8, 27, 64, 100}) {
        auto signal = random_signal(n, 1000 + n);
        for (bool inverse : {false, true}) {
            auto expected = naive_dft(signal, inverse);
            auto actual = signal;
            unitary_fft(actual, inverse);
            double max_diff = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                max_diff = std::max(max_diff, std::abs(expected[i] - actual[i]));
            }
            CHECK(max_diff < 1e-10);
            // Parseval: unitary transforms preserve energy.
            CHECK(total_energy(actual) ==
                  doctest::Approx(total_energy(signal)).epsilon(1e-12));
        }
        // Forward then inverse is the identity.
        auto round = signal;
        unitary_fft(round, false);
        unitary_fft(round, true);
        double max_diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            max_diff = std::max(max_diff, std::abs(round[i] - signal[i]));
        }
        CHECK(max_diff < 1e-12);
    }
}

TEST_CASE("fft shift index helpers invert each other") {
    for (std::size_t n : {4, 16, 64}) {
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(fft_natural_index(fft_shifted_index(k, n), n) == k);
        }
        CHECK(fft_shifted_index(0, n) == n / 2);  // DC lands in the middle
    }
}

TEST_CASE("windows are unit RMS") {
    for (auto kind : {Window::kRectangular, Window::kHann}) {
        auto w = make_window(kind, 64);
        double sum_sq = 0.0;
        for (double x : w) sum_sq += x * x;
        CHECK(sum_sq / 64.0 == doctest::Approx(1.0).epsilon(1e-12));
    }
    auto hann = make_window(Window::kHann, 64);
    CHECK(hann[0] == 0.0);  // periodic form
    for (std::size_t k = 1; k < 64; ++k) {
        CHECK(hann[k] == doctest::Approx(hann[64 - k]).epsilon(1e-12));
    }
    CHECK(window_from_name("rect") == Window::kRectangular);
    CHECK(window_from_name("hann") == Window::kHann);
    CHECK_THROWS_AS(window_from_name("blackman"), std::invalid_argument);
}

TEST_CASE("single on-grid point lands in the exact cube cell") {
    RadarConfig cfg = default_config();
    ImageGrid grid = derive_image_grid(cfg);
    const std::uint32_t n_target = 50, l_target = 40;
    const std::uint32_t m_half = cfg.chirps_per_tx() / 2;

    RangeDopplerAngleCube cube;
    const double dv_expected =
        kSpeedOfLight / (2.0 * cfg.carrier_frequency_hz * cfg.tx_count() *
                         cfg.chirp_duration_s * cfg.chirps_per_tx());

    SUBCASE("static and moving targets") {
        for (int b : {0, 2, -3}) {
            Scene scene;
            scene.points.push_back(
                grid_point(grid, n_target, l_target, b * dv_expected, {1.0, 0.0}));
            RawDataCube raw = synthesize_frame(scene, cfg, {});
            RangeSpectra spectra = range_fft(raw);
            TxDopplerMaps maps = doppler_fft(spectra, cfg);
            cube = beamform(maps, cfg);

            CHECK(cube.velocity_bin_mps == doctest::Approx(dv_expected).epsilon(1e-12));
            // Locate the strongest cell.
            std::uint32_t best_n = 0, best_j = 0, best_l = 0;
            double best = -1.0;
            for (std::uint32_t n = 0; n < cube.num_range_bins; ++n) {
                for (std::uint32_t j = 0; j < cube.num_doppler; ++j) {
                    for (std::uint32_t l = 0; l < cube.num_angle_bins; ++l) {
                        const double p = std::norm(cube.at(n, j, l));
                        if (p > best) {
                            best = p;
                            best_n = n;
                            best_j = j;
                            best_l = l;
                        }
                    }
                }
            }
            CHECK(best_n == n_target);
            CHECK(best_l == l_target);
            CHECK(best_j == m_half + b);
            CHECK(cube.velocity_of(best_j) == doctest::Approx(b * dv_expected).epsilon(1e-12));

            // Coherent gain: |c| * sqrt(N * M_d) * V / sqrt(L), near-field loss
            // aside.
            const double expected_peak = std::sqrt(256.0 * 16.0) * 32.0 / 8.0;
            CHECK(std::abs(cube.at(best_n, best_j, best_l)) ==
                  doctest::Approx(expected_peak).epsilon(0.02));
        }
    }
}

TEST_CASE("processing conserves energy stage by stage") {
    RadarConfig cfg = default_config();
    ImageGrid grid = derive_image_grid(cfg);
    Scene scene;
    scene.points.push_back(grid_point(grid, 61, 22, 3.7, {0.8, 0.3}));
    scene.points.push_back(grid_point(grid, 130, 47, -9.1, {-0.2, 0.6}));
    NoiseSpec noise{cfg.noise_image_variance, 5};
    RawDataCube raw = synthesize_frame(scene, cfg, noise);

    double raw_energy = 0.0;
    for (const auto& s : raw.samples) raw_energy += std::norm(s);

    RangeSpectra spectra = range_fft(raw);
    double spec_energy = 0.0;
    for (const auto& s : spectra.data) spec_energy += std::norm(s);
    CHECK(spec_energy == doctest::Approx(raw_energy).epsilon(1e-9));

    TxDopplerMaps maps = doppler_fft(spectra, cfg);
    double map_energy = 0.0;
    for (const auto& s : maps.data) map_energy += std::norm(s);
    CHECK(map_energy == doctest::Approx(raw_energy).epsilon(1e-9));

    RangeDopplerAngleCube cube = beamform(maps, cfg);
    double cube_energy = 0.0;
    for (const auto& s : cube.data) cube_energy += std::norm(s);
    CHECK(cube_energy == doctest::Approx(raw_energy).epsilon(1e-9));
}

TEST_CASE("TDM compensation keeps moving off-axis targets focused") {
    RadarConfig cfg = default_config();
    ImageGrid grid = derive_image_grid(cfg);
    const double dv = kSpeedOfLight / (2.0 * cfg.carrier_frequency_hz * cfg.tx_count() *
                                       cfg.chirp_duration_s * cfg.chirps_per_tx());

    Scene still, moving;
    still.points.push_back(grid_point(grid, 72, 12, 0.0, {1.0, 0.0}));
    moving.points.push_back(grid_point(grid, 72, 12, 5.0 * dv, {1.0, 0.0}));

    RadarImage image_still = process_frame(synthesize_frame(still, cfg, {}), cfg);
    RadarImage image_moving = process_frame(synthesize_frame(moving, cfg, {}), cfg);

    auto argmax = [](const RadarImage& img) {
        std::uint32_t best_n = 0, best_l = 0;
        double best = -1.0;
        for (std::uint32_t n = 0; n < img.num_range_bins; ++n) {
            for (std::uint32_t l = 0; l < img.num_angle_bins; ++l) {
                if (img.intensity(n, l) > best) {
                    best = img.intensity(n, l);
                    best_n = n;
                    best_l = l;
                }
            }
        }
        return std::pair<std::uint32_t, std::uint32_t>(best_n, best_l);
    };

    auto [n_still, l_still] = argmax(image_still);
    auto [n_moving, l_moving] = argmax(image_moving);
    CHECK(n_still == 72);
    CHECK(l_still == 12);
    CHECK(n_moving == 72);
    CHECK(l_moving == 12);  // uncompensated TDM would smear this off the bin
    CHECK(image_moving.amplitude(72, 12) ==
          doctest::Approx(image_still.amplitude(72, 12)).epsilon(1e-6));
    // The channel is stored as float, so compare at single precision.
    CHECK(image_moving.doppler_mps[image_moving.index(72, 12)] ==
          doctest::Approx(5.0 * dv).epsilon(1e-6));
}

TEST_CASE("extract_channels keeps the strongest Doppler bin, ties to the lowest") {
    RangeDopplerAngleCube cube;
    cube.num_range_bins = 1;
    cube.num_doppler = 4;
    cube.num_angle_bins = 1;
    cube.range_bin_spacing_m = 0.28;
    cube.velocity_bin_mps = 2.0;
    cube.data = {{1.0, 0.0}, {3.0, 4.0}, {5.0, 0.0}, {0.0, 2.0}};  // |.|^2: 1, 25, 25, 4

    RadarImage image = extract_channels(cube);
    CHECK(image.real[0] == 3.0f);
    CHECK(image.imag[0] == 4.0f);
    CHECK(image.doppler_mps[0] == doctest::Approx((1.0 - 2.0) * 2.0));
}

TEST_CASE("to_cartesian resamples constants exactly and localizes peaks") {
    RadarImage image;
    image.num_range_bins = 64;
    image.num_angle_bins = 64;
    image.range_bin_spacing_m = 0.5;
    const std::size_t pixels = 64 * 64;
    image.real.assign(pixels, 1.0f);
    image.imag.assign(pixels, 0.0f);
    image.doppler_mps.assign(pixels, 0.0f);

    CartesianSpec spec;
    spec.pixel_size_m = 0.5;
    CartesianImage cart = to_cartesian(image, ImageChannel::kReal, spec);
    REQUIRE(cart.ny > 0);
    REQUIRE(cart.nx > 0);
    std::size_t valid_count = 0;
    for (std::uint32_t iy = 0; iy < cart.ny; ++iy) {
        for (std::uint32_t ix = 0; ix < cart.nx; ++ix) {
            const std::size_t i = cart.index(iy, ix);
            if (cart.valid[i]) {
                ++valid_count;
                CHECK(cart.values[i] == doctest::Approx(1.0).epsilon(1e-6));
            } else {
                CHECK(cart.values[i] == 0.0f);
            }
        }
    }
    CHECK(valid_count > pixels / 2);

    // A single hot pixel maps to its polar cell's (x, y).
    const std::uint32_t n = 40, l = 48;
    image.real.assign(pixels, 0.0f);
    image.real[image.index(n, l)] = 10.0f;
    const double r = n * image.range_bin_spacing_m;
    const double s = -1.0 + 2.0 * l / 64.0;
    const double x_expected = -s * r;
    const double y_expected = r * std::sqrt(1.0 - s * s);

    cart = to_cartesian(image, ImageChannel::kIntensity, spec);
    double best = -1.0;
    double x_best = 0.0, y_best = 0.0;
    for (std::uint32_t iy = 0; iy < cart.ny; ++iy) {
        for (std::uint32_t ix = 0; ix < cart.nx; ++ix) {
            const std::size_t i = cart.index(iy, ix);
            if (cart.values[i] > best) {
                best = cart.values[i];
                x_best = cart.x0_m + ix * cart.pixel_size_m;
                y_best = cart.y0_m + iy * cart.pixel_size_m;
            }
        }
    }
    CHECK(std::abs(x_best - x_expected) <= spec.pixel_size_m);
    CHECK(std::abs(y_best - y_expected) <= spec.pixel_size_m);
}

TEST_CASE("measured PSF matches the Dirichlet kernel") {
    RadarConfig cfg = default_config();
    PsfMetrics psf = measure_psf(cfg, 45.0);

    const double width_oracle = dirichlet_halfpower_width(32);
    const double sidelobe_oracle = dirichlet_first_sidelobe_db(32);
    CHECK(psf.mainlobe_width_sin == doctest::Approx(width_oracle).epsilon(0.01));
    CHECK(std::abs(psf.first_sidelobe_db - sidelobe_oracle) < 0.1);
    CHECK(psf.peak_sin_azimuth == doctest::Approx(0.0).scale(1.0).epsilon(1e-3));
    CHECK(psf.peak_range_bin == derive_image_grid(cfg).range_bin_of(45.0));

    // The 32-element rectangular-window side lobe sits near -13.3 dB.
    CHECK(sidelobe_oracle < -13.0);
    CHECK(sidelobe_oracle > -13.6);

    // Hann weighting trades main-lobe width for side-lobe suppression.
    PsfMetrics hann = measure_psf(cfg, 45.0, 16384, Window::kHann);
    CHECK(hann.mainlobe_width_sin > psf.mainlobe_width_sin);
    CHECK(hann.first_sidelobe_db < -25.0);
}
