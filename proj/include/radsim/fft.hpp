#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace radsim {

// In-place unitary DFT (1/sqrt(n) scaling in both directions). `inverse`
// selects the conjugate kernel exp(+j*2*pi*k*n/N). Backed by FFTW with a
// process-wide plan cache; safe to call from multiple threads.
void unitary_fft(std::complex<double>* data, std::size_t n, bool inverse);
void unitary_fft(std::vector<std::complex<double>>& data, bool inverse);

// Index of frequency bin `k` (natural DFT order) in a centered spectrum where
// index n/2 holds the zero bin: shifted[(k + n/2) % n] ... inverse mapping
// supplied too so callers never hand-roll the modulo arithmetic.
std::size_t fft_shifted_index(std::size_t natural_index, std::size_t n);
std::size_t fft_natural_index(std::size_t shifted_index, std::size_t n);

enum class Window { kRectangular, kHann };

Window window_from_name(const std::string& name);  // "rect" | "hann"

// Window coefficients normalized to unit RMS so white noise keeps its variance
// through the windowed unitary transforms.
std::vector<double> make_window(Window kind, std::size_t length);

}  // namespace radsim
