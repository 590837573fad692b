#include "fermicurve/fft.hpp"

namespace fermicurve {

void fft_inplace(std::vector<cplx>& a, bool inverse) {
  const size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft length must be a power of two");
  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * PI / static_cast<double>(len);
    const cplx wl = std::polar(1.0, ang);
    for (size_t i = 0; i < n; i += len) {
      cplx w = 1.0;
      for (size_t j = 0; j < len / 2; ++j) {
        cplx u = a[i + j], v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

void fft2_inplace(std::vector<cplx>& a, int n1, int n2, bool inverse) {
  if (a.size() != static_cast<size_t>(n1) * n2) throw std::invalid_argument("fft2 size mismatch");
  std::vector<cplx> col(n1);
  // Rows.
  std::vector<cplx> row(n2);
  for (int i = 0; i < n1; ++i) {
    std::copy(a.begin() + static_cast<size_t>(i) * n2, a.begin() + static_cast<size_t>(i + 1) * n2,
              row.begin());
    fft_inplace(row, inverse);
    std::copy(row.begin(), row.end(), a.begin() + static_cast<size_t>(i) * n2);
  }
  // Columns.
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) col[static_cast<size_t>(i)] = a[static_cast<size_t>(i) * n2 + j];
    fft_inplace(col, inverse);
    for (int i = 0; i < n1; ++i) a[static_cast<size_t>(i) * n2 + j] = col[static_cast<size_t>(i)];
  }
}

}  // namespace fermicurve
