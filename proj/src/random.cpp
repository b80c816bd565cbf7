#include "radsim/random.hpp"

#include <cmath>

#include "radsim/constants.hpp"

namespace radsim {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t frame_seed(std::uint64_t master_seed, std::uint64_t index) {
    return mix64(master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ mix64(tag));
}

double RandomSource::uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double RandomSource::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

void RandomSource::gaussian_pair(double& a, double& b) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    a = radius * std::cos(kTwoPi * u2);
    b = radius * std::sin(kTwoPi * u2);
}

double RandomSource::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double a, b;
    gaussian_pair(a, b);
    spare_ = b;
    have_spare_ = true;
    return a;
}

}  // namespace radsim
