#include "radsim/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "radsim/constants.hpp"

namespace radsim {

namespace {

// FFTW plan creation is not thread-safe; execution via fftw_execute_dft is.
// Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED so they can run on any
// caller buffer and stay deterministic for a given size.
class PlanCache {
  public:
    fftw_plan get(std::size_t n, bool inverse) {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto key = std::make_pair(n, inverse);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<std::complex<double>> scratch(n);
        fftw_plan plan = fftw_plan_dft_1d(
            static_cast<int>(n), reinterpret_cast<fftw_complex*>(scratch.data()),
            reinterpret_cast<fftw_complex*>(scratch.data()),
            inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

  private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, bool>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace

void unitary_fft(std::complex<double>* data, std::size_t n, bool inverse) {
    if (n == 0) throw std::invalid_argument("unitary_fft: empty input");
    if (n == 1) return;
    fftw_plan plan = plan_cache().get(n, inverse);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) data[i] *= scale;
}

void unitary_fft(std::vector<std::complex<double>>& data, bool inverse) {
    unitary_fft(data.data(), data.size(), inverse);
}

std::size_t fft_shifted_index(std::size_t natural_index, std::size_t n) {
    return (natural_index + n / 2) % n;
}

std::size_t fft_natural_index(std::size_t shifted_index, std::size_t n) {
    return (shifted_index + n - n / 2) % n;
}

Window window_from_name(const std::string& name) {
    if (name == "rect" || name == "rectangular") return Window::kRectangular;
    if (name == "hann") return Window::kHann;
    throw std::invalid_argument("unknown window: " + name);
}

std::vector<double> make_window(Window kind, std::size_t length) {
    std::vector<double> w(length, 1.0);
    if (kind == Window::kHann) {
        for (std::size_t i = 0; i < length; ++i) {
            w[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) /
                                         static_cast<double>(length)));
        }
    }
    double sq = 0.0;
    for (double v : w) sq += v * v;
    const double rms = std::sqrt(sq / static_cast<double>(length));
    if (rms > 0.0) {
        for (double& v : w) v /= rms;
    }
    return w;
}

}  // namespace radsim
