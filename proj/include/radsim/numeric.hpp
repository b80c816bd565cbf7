#pragma once

#include <cstddef>

namespace radsim {

// Pairwise (cascade) summation. Order-stable: the reduction tree depends only
// on the element count, so parallel producers can fill the buffer in any order
// and the sum is still bit-identical run to run.
inline double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 16) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += data[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

template <typename Container>
double pairwise_sum(const Container& c) {
    return pairwise_sum(c.data(), c.size());
}

}  // namespace radsim
