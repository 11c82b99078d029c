#pragma once

#include <complex>
#include <vector>

namespace ttrace {

using cd = std::complex<double>;

// In-place radix-2 FFT; data.size() must be a power of two.
void fft_inplace(std::vector<cd>& data, bool inverse);

// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace ttrace
