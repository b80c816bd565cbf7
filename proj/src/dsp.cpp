#include "radsim/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "radsim/constants.hpp"

namespace radsim {

double RadarImage::amplitude(std::uint32_t n, std::uint32_t l) const {
    return std::sqrt(intensity(n, l));
}

RangeSpectra range_fft(const RawDataCube& cube, Window window) {
    RangeSpectra out;
    out.num_rx = cube.num_rx;
    out.num_chirps = cube.num_chirps;
    out.num_range_bins = cube.num_samples;
    out.tx_schedule = cube.tx_schedule;
    out.data.resize(cube.samples.size());

    const std::vector<double> w = make_window(window, cube.num_samples);
    std::vector<std::complex<double>> line(cube.num_samples);
    for (std::uint32_t k = 0; k < cube.num_rx; ++k) {
        for (std::uint32_t m = 0; m < cube.num_chirps; ++m) {
            for (std::uint32_t n = 0; n < cube.num_samples; ++n) {
                line[n] = cube.at(k, m, n) * w[n];
            }
            unitary_fft(line, false);
            for (std::uint32_t n = 0; n < cube.num_samples; ++n) {
                out.at(k, m, n) = line[n];
            }
        }
    }
    return out;
}

TxDopplerMaps doppler_fft(const RangeSpectra& spectra, const RadarConfig& config,
                          Window window) {
    const std::uint32_t num_tx = config.tx_count();
    if (spectra.num_chirps % num_tx != 0) {
        throw std::invalid_argument(
            "doppler_fft: chirp count not divisible by the Tx count");
    }
    if (spectra.tx_schedule.size() != spectra.num_chirps) {
        throw std::invalid_argument("doppler_fft: malformed Tx schedule");
    }
    const std::uint32_t per_tx = spectra.num_chirps / num_tx;

    TxDopplerMaps maps;
    maps.num_tx = num_tx;
    maps.num_rx = spectra.num_rx;
    maps.num_doppler = per_tx;
    maps.num_range_bins = spectra.num_range_bins;
    maps.data.resize(static_cast<std::size_t>(num_tx) * maps.num_rx * per_tx *
                     maps.num_range_bins);

    // Chirp indices per Tx, in transmission order.
    std::vector<std::vector<std::uint32_t>> chirps_of(num_tx);
    for (std::uint32_t m = 0; m < spectra.num_chirps; ++m) {
        const std::uint32_t tx = spectra.tx_schedule[m];
        if (tx >= num_tx) throw std::invalid_argument("doppler_fft: Tx index out of range");
        chirps_of[tx].push_back(m);
    }
    for (std::uint32_t i = 0; i < num_tx; ++i) {
        if (chirps_of[i].size() != per_tx) {
            throw std::invalid_argument("doppler_fft: uneven TDM schedule");
        }
    }

    const std::vector<double> w = make_window(window, per_tx);
    std::vector<std::complex<double>> line(per_tx);
    for (std::uint32_t i = 0; i < num_tx; ++i) {
        for (std::uint32_t k = 0; k < spectra.num_rx; ++k) {
            for (std::uint32_t n = 0; n < spectra.num_range_bins; ++n) {
                for (std::uint32_t l = 0; l < per_tx; ++l) {
                    line[l] = spectra.at(k, chirps_of[i][l], n) * w[l];
                }
                // Conjugate kernel: positive (receding) velocity lands on the
                // positive side of the centered axis.
                unitary_fft(line, true);
                for (std::uint32_t j = 0; j < per_tx; ++j) {
                    maps.at(i, k, j, n) = line[fft_natural_index(j, per_tx)];
                }
            }
        }
    }
    return maps;
}

RangeDopplerAngleCube beamform(const TxDopplerMaps& maps, const RadarConfig& config,
                               Window window) {
    const VirtualArray array = derive_virtual_array(config);
    if (!array.uniform) {
        throw std::invalid_argument("beamform: virtual array must be uniform");
    }
    const double half_wl = 0.5 * config.wavelength_m();
    if (array.count() > 1 && std::abs(array.spacing_m - half_wl) > 1e-6 * half_wl) {
        throw std::invalid_argument(
            "beamform: virtual element spacing must be half a wavelength");
    }
    const std::uint32_t bins = config.effective_angle_bins();
    if (bins < array.count()) {
        throw std::invalid_argument("beamform: angle_bins below virtual element count");
    }

    RangeDopplerAngleCube out;
    out.num_range_bins = maps.num_range_bins;
    out.num_doppler = maps.num_doppler;
    out.num_angle_bins = bins;
    out.range_bin_spacing_m = derive_image_grid(config).range_bin_spacing_m;
    out.velocity_bin_mps =
        kSpeedOfLight / (2.0 * config.carrier_frequency_hz * config.tx_count() *
                         config.chirp_duration_s * maps.num_doppler);
    out.data.resize(static_cast<std::size_t>(out.num_range_bins) * out.num_doppler * bins);

    // TDM compensation per (Doppler bin, Tx): the Tx i chirps start i*T_c after
    // the cycle start, so bin b carries a phase exp(-j*2*pi*f_D(b)*i*T_c) with
    // f_D(b) = b / (I*T_c*M_d). Cancel it before combining the Tx groups.
    std::vector<std::complex<double>> comp(maps.num_doppler * maps.num_tx);
    for (std::uint32_t j = 0; j < maps.num_doppler; ++j) {
        const double b =
            static_cast<double>(j) - static_cast<double>(maps.num_doppler / 2);
        for (std::uint32_t i = 0; i < maps.num_tx; ++i) {
            const double phase =
                kTwoPi * b * i / (static_cast<double>(config.tx_count()) * maps.num_doppler);
            comp[j * maps.num_tx + i] = std::polar(1.0, phase);
        }
    }

    const std::vector<double> w = make_window(window, array.count());
    std::vector<std::complex<double>> line(bins);
    for (std::uint32_t n = 0; n < out.num_range_bins; ++n) {
        for (std::uint32_t j = 0; j < out.num_doppler; ++j) {
            std::fill(line.begin(), line.end(), std::complex<double>(0.0, 0.0));
            for (std::size_t v = 0; v < array.count(); ++v) {
                const VirtualElement& el = array.elements[v];
                line[v] = maps.at(el.tx, el.rx, j, n) * w[v] * comp[j * maps.num_tx + el.tx];
            }
            unitary_fft(line, true);
            for (std::uint32_t l = 0; l < bins; ++l) {
                out.at(n, j, l) = line[fft_natural_index(l, bins)];
            }
        }
    }
    return out;
}

RadarImage extract_channels(const RangeDopplerAngleCube& cube) {
    RadarImage image;
    image.num_range_bins = cube.num_range_bins;
    image.num_angle_bins = cube.num_angle_bins;
    image.range_bin_spacing_m = cube.range_bin_spacing_m;
    const std::size_t pixels =
        static_cast<std::size_t>(cube.num_range_bins) * cube.num_angle_bins;
    image.real.resize(pixels);
    image.imag.resize(pixels);
    image.doppler_mps.resize(pixels);

    for (std::uint32_t n = 0; n < cube.num_range_bins; ++n) {
        for (std::uint32_t l = 0; l < cube.num_angle_bins; ++l) {
            std::uint32_t best = 0;
            double best_power = -1.0;
            for (std::uint32_t j = 0; j < cube.num_doppler; ++j) {
                const std::complex<double>& z = cube.at(n, j, l);
                const double power = std::norm(z);
                if (power > best_power) {  // ties keep the lowest bin index
                    best_power = power;
                    best = j;
                }
            }
            const std::complex<double>& z = cube.at(n, best, l);
            const std::size_t i = image.index(n, l);
            image.real[i] = static_cast<float>(z.real());
            image.imag[i] = static_cast<float>(z.imag());
            image.doppler_mps[i] = static_cast<float>(cube.velocity_of(best));
        }
    }
    return image;
}

RadarImage process_frame(const RawDataCube& cube, const RadarConfig& config,
                         const ProcessingOptions& options) {
    const RangeSpectra spectra = range_fft(cube, options.range_window);
    const TxDopplerMaps maps = doppler_fft(spectra, config, options.doppler_window);
    const RangeDopplerAngleCube rda = beamform(maps, config, options.angle_window);
    return extract_channels(rda);
}

CartesianImage to_cartesian(const RadarImage& image, ImageChannel channel,
                            const CartesianSpec& spec) {
    if (spec.pixel_size_m <= 0.0) {
        throw std::invalid_argument("to_cartesian: pixel size must be positive");
    }
    const double reach = image.num_range_bins * image.range_bin_spacing_m;
    const double x_half = spec.x_half_extent_m > 0.0 ? spec.x_half_extent_m : reach;
    const double y_max = spec.y_extent_m > 0.0 ? spec.y_extent_m : reach;

    CartesianImage out;
    out.pixel_size_m = spec.pixel_size_m;
    out.nx = static_cast<std::uint32_t>(std::floor(2.0 * x_half / spec.pixel_size_m)) + 1;
    out.ny = static_cast<std::uint32_t>(std::floor(y_max / spec.pixel_size_m)) + 1;
    out.x0_m = -x_half;
    out.y0_m = 0.0;
    out.values.assign(static_cast<std::size_t>(out.ny) * out.nx, 0.0f);
    out.valid.assign(static_cast<std::size_t>(out.ny) * out.nx, 0);

    auto sample = [&](std::uint32_t n, std::uint32_t l) -> double {
        const std::size_t i = image.index(n, l);
        switch (channel) {
            case ImageChannel::kReal: return image.real[i];
            case ImageChannel::kImag: return image.imag[i];
            case ImageChannel::kDoppler: return image.doppler_mps[i];
            case ImageChannel::kIntensity: return image.intensity(n, l);
        }
        return 0.0;
    };

    const std::uint32_t n_bins = image.num_range_bins;
    const std::uint32_t l_bins = image.num_angle_bins;
    for (std::uint32_t iy = 0; iy < out.ny; ++iy) {
        const double y = out.y0_m + iy * spec.pixel_size_m;
        for (std::uint32_t ix = 0; ix < out.nx; ++ix) {
            const double x = out.x0_m + ix * spec.pixel_size_m;
            const double r = std::hypot(x, y);
            const double s = r > 1e-12 ? -x / r : 0.0;
            const double u = r / image.range_bin_spacing_m;
            const double t = (s + 1.0) * 0.5 * l_bins;
            if (u < 0.0 || u > n_bins - 1.0 || t < 0.0 || t > l_bins - 1.0) {
                continue;  // outside the polar grid: stays zero, flagged invalid
            }
            const auto k0 = static_cast<std::uint32_t>(u);
            const auto l0 = static_cast<std::uint32_t>(t);
            const double fu = u - k0;
            const double ft = t - l0;
            const std::uint32_t k1 = std::min(k0 + 1, n_bins - 1);
            const std::uint32_t l1 = std::min(l0 + 1, l_bins - 1);
            const double value = (1.0 - fu) * (1.0 - ft) * sample(k0, l0) +
                                 fu * (1.0 - ft) * sample(k1, l0) +
                                 (1.0 - fu) * ft * sample(k0, l1) + fu * ft * sample(k1, l1);
            const std::size_t i = out.index(iy, ix);
            out.values[i] = static_cast<float>(value);
            out.valid[i] = 1;
        }
    }
    return out;
}

PsfMetrics measure_psf(const RadarConfig& config, double point_range_m,
                       std::uint32_t oversampled_bins, Window angle_window) {
    config.validate();
    const VirtualArray array = derive_virtual_array(config);
    if (oversampled_bins < 2 * array.count()) {
        throw std::invalid_argument("measure_psf: oversampled grid too coarse");
    }

    Scene scene;
    ReflectionPoint point;
    point.x_m = 0.0;
    point.y_m = point_range_m;
    point.radial_velocity_mps = 0.0;
    point.reflectivity = {1.0, 0.0};
    scene.points.push_back(point);

    const RawDataCube cube = synthesize_frame(scene, config, NoiseSpec{});
    const RangeSpectra spectra = range_fft(cube);
    const TxDopplerMaps maps = doppler_fft(spectra, config);
    const RangeDopplerAngleCube rda = beamform(maps, config, angle_window);

    std::uint32_t peak_n = 0, peak_j = 0;
    double best = -1.0;
    for (std::uint32_t n = 0; n < rda.num_range_bins; ++n) {
        for (std::uint32_t j = 0; j < rda.num_doppler; ++j) {
            for (std::uint32_t l = 0; l < rda.num_angle_bins; ++l) {
                const double power = std::norm(rda.at(n, j, l));
                if (power > best) {
                    best = power;
                    peak_n = n;
                    peak_j = j;
                }
            }
        }
    }

    // Oversampled angle cut at the peak cell: zero-padding the virtual-element
    // vector is an exact interpolation of the array factor.
    const std::vector<double> w = make_window(angle_window, array.count());
    const double b_signed =
        static_cast<double>(peak_j) - static_cast<double>(maps.num_doppler / 2);
    std::vector<std::complex<double>> line(oversampled_bins, {0.0, 0.0});
    for (std::size_t v = 0; v < array.count(); ++v) {
        const VirtualElement& el = array.elements[v];
        const double phase = kTwoPi * b_signed * el.tx /
                             (static_cast<double>(config.tx_count()) * maps.num_doppler);
        line[v] = maps.at(el.tx, el.rx, peak_j, peak_n) * w[v] * std::polar(1.0, phase);
    }
    unitary_fft(line, true);

    PsfMetrics metrics;
    metrics.peak_range_bin = peak_n;
    metrics.cut_sin.resize(oversampled_bins);
    metrics.cut_amplitude.resize(oversampled_bins);
    for (std::uint32_t l = 0; l < oversampled_bins; ++l) {
        metrics.cut_sin[l] = -1.0 + (2.0 * l) / oversampled_bins;
        metrics.cut_amplitude[l] = std::abs(line[fft_natural_index(l, oversampled_bins)]);
    }

    const auto peak_it =
        std::max_element(metrics.cut_amplitude.begin(), metrics.cut_amplitude.end());
    const std::size_t p = static_cast<std::size_t>(peak_it - metrics.cut_amplitude.begin());
    const double peak_amp = *peak_it;
    metrics.peak_sin_azimuth = metrics.cut_sin[p];

    const std::vector<double>& a = metrics.cut_amplitude;
    const double half_power = 0.5 * peak_amp * peak_amp;
    auto power_at = [&](std::size_t i) { return a[i] * a[i]; };

    // -3 dB crossings by linear interpolation in power.
    double s_left = metrics.cut_sin.front();
    for (std::size_t i = p; i-- > 0;) {
        if (power_at(i) < half_power) {
            const double frac =
                (half_power - power_at(i)) / (power_at(i + 1) - power_at(i));
            s_left = metrics.cut_sin[i] + frac * (metrics.cut_sin[i + 1] - metrics.cut_sin[i]);
            break;
        }
    }
    double s_right = metrics.cut_sin.back();
    for (std::size_t i = p + 1; i < a.size(); ++i) {
        if (power_at(i) < half_power) {
            const double frac =
                (power_at(i - 1) - half_power) / (power_at(i - 1) - power_at(i));
            s_right =
                metrics.cut_sin[i - 1] + frac * (metrics.cut_sin[i] - metrics.cut_sin[i - 1]);
            break;
        }
    }
    metrics.mainlobe_width_sin = s_right - s_left;

    // First side-lobe: walk past the first null on each side, then to the next
    // local maximum.
    auto sidelobe = [&](bool rightward) -> double {
        std::size_t i = p;
        const std::size_t last = a.size() - 1;
        auto step = [&](std::size_t idx) { return rightward ? idx + 1 : idx - 1; };
        auto can_step = [&](std::size_t idx) { return rightward ? idx < last : idx > 0; };
        while (can_step(i) && a[step(i)] <= a[i]) i = step(i);  // descend to the null
        if (!can_step(i)) return 0.0;
        while (can_step(i) && a[step(i)] >= a[i]) i = step(i);  // climb the side-lobe
        return a[i];
    };
    const double level = std::max(sidelobe(true), sidelobe(false));
    metrics.first_sidelobe_db = 20.0 * std::log10(level / peak_amp);
    return metrics;
}

}  // namespace radsim
