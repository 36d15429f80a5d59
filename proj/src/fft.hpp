#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace illpose {

using cplx = std::complex<double>;

// Unnormalized in-place DFT. sign -1 is forward (e^{-2pi i jk/n}), +1 backward.
void dft_inplace(std::vector<cplx>& data, int sign);

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n);

} // namespace illpose
