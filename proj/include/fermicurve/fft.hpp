#pragma once
// Minimal iterative radix-2 FFT for the small periodic grids used here.

#include "fermicurve/common.hpp"

namespace fermicurve {

// In-place FFT of length 2^k. Forward uses exp(-2 pi i jk/n); inverse divides by n.
void fft_inplace(std::vector<cplx>& a, bool inverse);

// Row-major n1 x n2 grid; transforms along both axes.
void fft2_inplace(std::vector<cplx>& a, int n1, int n2, bool inverse);

}  // namespace fermicurve
