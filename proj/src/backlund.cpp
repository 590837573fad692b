#include "fermicurve/backlund.hpp"

#include "fermicurve/fft.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fermicurve {
namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// exp(2 pi i g(k, x_ij)) for the grid point (i, j).
std::vector<cplx> character_grid(const Lattice& lat, const CVec2& k, int n) {
  std::vector<cplx> out(static_cast<size_t>(n) * n);
  const cplx e1 = gform(k, CVec2(lat.gamma1));
  const cplx e2 = gform(k, CVec2(lat.gamma2));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<size_t>(i) * n + j] =
          std::exp(2.0 * PI * I * (e1 * static_cast<double>(i) + e2 * static_cast<double>(j)) /
                   static_cast<double>(n));
  return out;
}

// Periodic function from sparse Fourier data on the grid.
std::vector<cplx> mode_map_grid(const std::map<std::array<int, 2>, cplx>& m, int n) {
  std::vector<cplx> out(static_cast<size_t>(n) * n, cplx(0.0));
  for (const auto& [idx, val] : m) {
    for (int i = 0; i < n; ++i) {
      const cplx row = val * std::exp(2.0 * PI * I * static_cast<double>(idx[0] * i) /
                                      static_cast<double>(n));
      for (int j = 0; j < n; ++j)
        out[static_cast<size_t>(i) * n + j] +=
            row * std::exp(2.0 * PI * I * static_cast<double>(idx[1] * j) /
                           static_cast<double>(n));
    }
  }
  return out;
}

cplx symbol(const Lattice& lat, const CVec2& k, int m1, int m2, bool bar) {
  const CVec2 q = k + CVec2(dual_vec(lat, m1, m2));
  // d/dz has symbol pi (q2 + i q1); d/dzbar has symbol -pi (q2 - i q1).
  return bar ? -PI * (q.y - I * q.x) : PI * (q.y + I * q.x);
}

double grid_norm(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::norm(a[i]) + std::norm(b[i]);
  return std::sqrt(s / a.size());
}

void validate_chi(const GridSpinor& chi) {
  if (chi.margin <= 1e-6 * chi.amp_max)
    throw std::invalid_argument(
        "generating spinor vanishes on the grid (margin below threshold)");
}

struct CoefficientGrids {
  std::vector<cplx> a, b, c, d, den;
};

// a = -((d chi1) conj(chi1) + chi2 d(conj chi2)) / |chi|^2, b per the same
// display, c = -conj(b), d = conj(a); the transformed pair is (conj(b), b).
CoefficientGrids backlund_coefficients(const GridSpinor& chi, const Lattice& lat) {
  const std::vector<cplx> d1 = component_derivative(chi, lat, 1, false);   // d chi1
  const std::vector<cplx> db2 = component_derivative(chi, lat, 2, true);   // dbar chi2
  const size_t m = chi.c1.size();
  CoefficientGrids g;
  g.a.resize(m);
  g.b.resize(m);
  g.c.resize(m);
  g.d.resize(m);
  g.den.resize(m);
  for (size_t i = 0; i < m; ++i) {
    const cplx x1 = chi.c1[i], x2 = chi.c2[i];
    const cplx den = x1 * std::conj(x1) + x2 * std::conj(x2);
    // d(conj chi2) = conj(dbar chi2) and dbar(conj chi1) = conj(d chi1).
    const cplx dc2 = std::conj(db2[i]);
    g.a[i] = -(d1[i] * std::conj(x1) + x2 * dc2) / den;
    g.b[i] = (x1 * dc2 - d1[i] * std::conj(x2)) / den;
    g.c[i] = -std::conj(g.b[i]);
    g.d[i] = std::conj(g.a[i]);
    g.den[i] = den;
  }
  return g;
}

}  // namespace

GridSpinor grid_spinor(const KernelSpinor& s, const Lattice& lat, int n) {
  if (!power_of_two(n)) throw std::invalid_argument("grid size must be a power of two");
  if (n < 4 * s.K + 4) throw std::invalid_argument("grid too small for the modal band");
  GridSpinor out;
  out.n = n;
  out.k = s.k;
  out.modal = s;
  out.c1.assign(static_cast<size_t>(n) * n, cplx(0.0));
  out.c2.assign(static_cast<size_t>(n) * n, cplx(0.0));
  const int K = s.K;
  for (int m1 = -K; m1 <= K; ++m1)
    for (int m2 = -K; m2 <= K; ++m2) {
      const int idx = BlochMatrix::mode_index(m1, m2, K);
      const cplx a1 = s.coeffs[2 * idx], a2 = s.coeffs[2 * idx + 1];
      if (a1 == cplx(0.0) && a2 == cplx(0.0)) continue;
      for (int i = 0; i < n; ++i) {
        const cplx row = std::exp(2.0 * PI * I * static_cast<double>(m1 * i) /
                                  static_cast<double>(n));
        for (int j = 0; j < n; ++j) {
          const cplx ph = row * std::exp(2.0 * PI * I * static_cast<double>(m2 * j) /
                                         static_cast<double>(n));
          out.c1[static_cast<size_t>(i) * n + j] += a1 * ph;
          out.c2[static_cast<size_t>(i) * n + j] += a2 * ph;
        }
      }
    }
  const std::vector<cplx> ch = character_grid(lat, s.k, n);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (size_t i = 0; i < out.c1.size(); ++i) {
    out.c1[i] *= ch[i];
    out.c2[i] *= ch[i];
    const double m = std::sqrt(std::norm(out.c1[i]) + std::norm(out.c2[i]));
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  out.margin = lo;
  out.amp_max = hi;
  return out;
}

std::vector<cplx> component_derivative(const GridSpinor& s, const Lattice& lat, int comp,
                                       bool bar) {
  if (comp != 1 && comp != 2) throw std::invalid_argument("component must be 1 or 2");
  const int n = s.n;
  if (s.modal) {
    const KernelSpinor& m = *s.modal;
    std::vector<cplx> out(static_cast<size_t>(n) * n, cplx(0.0));
    for (int m1 = -m.K; m1 <= m.K; ++m1)
      for (int m2 = -m.K; m2 <= m.K; ++m2) {
        const int idx = BlochMatrix::mode_index(m1, m2, m.K);
        const cplx a = m.coeffs[2 * idx + (comp - 1)];
        if (a == cplx(0.0)) continue;
        const cplx f = a * symbol(lat, s.k, m1, m2, bar);
        for (int i = 0; i < n; ++i) {
          const cplx row = f * std::exp(2.0 * PI * I * static_cast<double>(m1 * i) /
                                        static_cast<double>(n));
          for (int j = 0; j < n; ++j)
            out[static_cast<size_t>(i) * n + j] +=
                row * std::exp(2.0 * PI * I * static_cast<double>(m2 * j) /
                               static_cast<double>(n));
        }
      }
    const std::vector<cplx> ch = character_grid(lat, s.k, n);
    for (size_t i = 0; i < out.size(); ++i) out[i] *= ch[i];
    return out;
  }
  // FFT of the periodic part, symbol multiply, transform back.
  const std::vector<cplx> ch = character_grid(lat, s.k, n);
  std::vector<cplx> p(static_cast<size_t>(n) * n);
  const std::vector<cplx>& src = (comp == 1) ? s.c1 : s.c2;
  for (size_t i = 0; i < p.size(); ++i) p[i] = src[i] / ch[i];
  fft2_inplace(p, n, n, false);
  const double inv = 1.0 / (static_cast<double>(n) * n);
  for (int b1 = 0; b1 < n; ++b1) {
    const int m1 = (b1 < n / 2) ? b1 : b1 - n;
    for (int b2 = 0; b2 < n; ++b2) {
      const int m2 = (b2 < n / 2) ? b2 : b2 - n;
      p[static_cast<size_t>(b1) * n + b2] *= symbol(lat, s.k, m1, m2, bar) * inv;
    }
  }
  fft2_inplace(p, n, n, true);
  for (size_t i = 0; i < p.size(); ++i) p[i] *= static_cast<double>(n) * n * ch[i];
  return p;
}

double dirac_residual(const FourierPotential& pot, const Lattice& lat, const GridSpinor& s) {
  const int n = s.n;
  const std::vector<cplx> vg = mode_map_grid(pot.V, n);
  const std::vector<cplx> wg = mode_map_grid(pot.W, n);
  const std::vector<cplx> d2 = component_derivative(s, lat, 2, false);  // d chi2
  const std::vector<cplx> db1 = component_derivative(s, lat, 1, true);  // dbar chi1
  std::vector<cplx> r1(s.c1.size()), r2(s.c1.size());
  for (size_t i = 0; i < s.c1.size(); ++i) {
    r1[i] = vg[i] * s.c1[i] + d2[i];
    r2[i] = -db1[i] + wg[i] * s.c2[i];
  }
  const int band = s.modal ? s.modal->K : n / 2;
  const double kmax =
      std::hypot(std::abs(s.k.x), std::abs(s.k.y)) +
      band * (std::sqrt(norm2(lat.kappa1)) + std::sqrt(norm2(lat.kappa2)));
  double pmax = 0.0;
  for (const auto& [idx, val] : pot.V) {
    (void)idx;
    pmax = std::max(pmax, std::abs(val));
  }
  const double scale = PI * (1.0 + kmax) + pmax;
  return grid_norm(r1, r2) / (grid_norm(s.c1, s.c2) * scale);
}

BacklundPotential backlund_potential(const FourierPotential& pot, const Lattice& lat,
                                     const GridSpinor& chi, int cutoff) {
  if (cutoff < 0 || 2 * cutoff + 1 > chi.n)
    throw std::invalid_argument("cutoff incompatible with the grid");
  validate_chi(chi);
  BacklundPotential out;
  out.kernel_residual = dirac_residual(pot, lat, chi);
  if (out.kernel_residual >= 1e-7) {
    std::ostringstream os;
    os << "generating spinor is not in the kernel: residual " << out.kernel_residual;
    throw std::runtime_error(os.str());
  }
  CoefficientGrids g = backlund_coefficients(chi, lat);
  // U' = conj(b) on the grid; exactly periodic, so its plain transform gives
  // the Fourier coefficients.
  const int n = chi.n;
  std::vector<cplx> up(g.b.size());
  for (size_t i = 0; i < up.size(); ++i) up[i] = std::conj(g.b[i]);
  fft2_inplace(up, n, n, false);
  const double inv = 1.0 / (static_cast<double>(n) * n);
  double total = 0.0, kept = 0.0;
  FourierPotential p;
  p.sym = FourierPotential::eta_pair;
  double vmax = 0.0;
  for (const cplx& v : up) vmax = std::max(vmax, std::abs(v) * inv);
  for (int b1 = 0; b1 < n; ++b1) {
    const int m1 = (b1 < n / 2) ? b1 : b1 - n;
    for (int b2 = 0; b2 < n; ++b2) {
      const int m2 = (b2 < n / 2) ? b2 : b2 - n;
      const cplx v = up[static_cast<size_t>(b1) * n + b2] * inv;
      total += std::norm(v);
      if (std::abs(m1) <= cutoff && std::abs(m2) <= cutoff) {
        kept += std::norm(v);
        if (std::abs(v) > 1e-14 * vmax) p.V[{m1, m2}] = v;
      }
    }
  }
  for (const auto& [idx, val] : p.V) p.W[{-idx[0], -idx[1]}] = std::conj(val);
  p.validate();
  out.potential = std::move(p);
  out.tail_mass = total > 0.0 ? std::sqrt(std::max(0.0, total - kept) / total) : 0.0;
  out.cutoff = cutoff;
  return out;
}

GridSpinor backlund_spinor(const GridSpinor& psi, const GridSpinor& chi, const Lattice& lat) {
  if (psi.n != chi.n) throw std::invalid_argument("grids of psi and chi differ");
  validate_chi(chi);
  CoefficientGrids g = backlund_coefficients(chi, lat);
  const std::vector<cplx> d1 = component_derivative(psi, lat, 1, false);   // d psi1
  const std::vector<cplx> db2 = component_derivative(psi, lat, 2, true);   // dbar psi2
  GridSpinor out;
  out.n = psi.n;
  out.k = psi.k;
  out.c1.resize(psi.c1.size());
  out.c2.resize(psi.c2.size());
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (size_t i = 0; i < psi.c1.size(); ++i) {
    out.c1[i] = d1[i] + g.a[i] * psi.c1[i] + g.b[i] * psi.c2[i];
    out.c2[i] = g.c[i] * psi.c1[i] + db2[i] + g.d[i] * psi.c2[i];
    const double m = std::sqrt(std::norm(out.c1[i]) + std::norm(out.c2[i]));
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  out.margin = lo;
  out.amp_max = hi;
  return out;
}

InvarianceReport invariance_check(const FourierPotential& a, const FourierPotential& b,
                                  const Lattice& lat, const std::vector<cplx>& slices,
                                  int K) {
  InvarianceReport rep;
  rep.xp = slices;
  rep.dist.reserve(slices.size());
  for (const cplx& xp : slices) {
    const std::vector<cplx> va = fermi_slice_values(a, lat, xp, K);
    const std::vector<cplx> vb = fermi_slice_values(b, lat, xp, K);
    if (va.size() != vb.size()) {
      std::ostringstream os;
      os << "mismatched eigenvalue counts at x-p = (" << xp.real() << ", " << xp.imag()
         << "): " << va.size() << " vs " << vb.size();
      throw std::runtime_error(os.str());
    }
    auto directed = [](const std::vector<cplx>& from, const std::vector<cplx>& to) {
      double h = 0.0;
      for (const cplx& f : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const cplx& t : to) best = std::min(best, std::abs(f - t));
        h = std::max(h, best);
      }
      return h;
    };
    rep.dist.push_back(std::max(directed(va, vb), directed(vb, va)));
    rep.max_dist = std::max(rep.max_dist, rep.dist.back());
  }
  rep.pass = rep.max_dist <= 1e-4;
  return rep;
}

namespace {

// Require a constant (single stored mode at (0,0)) potential and return it.
cplx constant_value(const FourierPotential& pot) {
  for (const auto& [idx, v] : pot.V)
    if ((idx[0] != 0 || idx[1] != 0) && std::abs(v) > 0)
      throw std::invalid_argument("inverse transform restricted to constant potentials");
  for (const auto& [idx, v] : pot.W)
    if ((idx[0] != 0 || idx[1] != 0) && std::abs(v) > 0)
      throw std::invalid_argument("inverse transform restricted to constant potentials");
  return pot.vhat(0, 0);
}

}  // namespace

InverseBacklund inverse_backlund_constant(const FourierPotential& pot, const Lattice& lat,
                                          const Vec2& kprime) {
  (void)lat;
  const cplx u = constant_value(pot);
  const cplx w = pot.what(0, 0);
  const double gkk = gform(kprime, kprime);
  const double scale = std::max({std::abs(u * w), PI * PI * std::abs(gkk), 1.0});
  if (std::abs(u * w - PI * PI * gkk) > 1e-7 * scale)
    throw std::runtime_error("quasi-momentum not on the Fermi curve of the potential");
  const cplx sm = PI * cplx(kprime.y, -kprime.x);  // pi (k2 - i k1)
  const cplx sp = PI * cplx(kprime.y, kprime.x);   // pi (k2 + i k1)
  if (std::abs(sm) < 1e-14 || std::abs(sp) < 1e-14)
    throw std::runtime_error("quasi-momentum not on the Fermi curve of the potential");
  InverseBacklund out;
  out.k = CVec2{cplx(kprime.x), cplx(kprime.y)};
  out.b = -u / sm;  // transposed kernel relation u + b' pi (k2 - i k1) = 0
  const cplx upp = -2.0 * out.b * sp / (1.0 + std::norm(out.b));
  out.potential = FourierPotential::constant(upp);
  return out;
}

KernelSpinor inverse_backlund_spinor(const FourierPotential& pot, const Lattice& lat,
                                     const Vec2& kprime, const KernelSpinor& psi, int c1,
                                     int c2) {
  InverseBacklund gen = inverse_backlund_constant(pot, lat, kprime);
  if (c1 == 0 && c2 == 0) throw std::invalid_argument("closed path must be a nonzero period");
  // locate the single stored mode of psi
  int found = -1;
  cplx alpha = 0, beta = 0;
  const int W = 2 * psi.K + 1;
  for (int m1 = -psi.K; m1 <= psi.K; ++m1)
    for (int m2 = -psi.K; m2 <= psi.K; ++m2) {
      const int im = BlochMatrix::mode_index(m1, m2, psi.K);
      const cplx a = psi.coeffs[2 * im], b = psi.coeffs[2 * im + 1];
      if (std::abs(a) > 1e-13 || std::abs(b) > 1e-13) {
        if (found >= 0)
          throw std::invalid_argument("inverse transform restricted to single-mode spinors");
        found = im;
        alpha = a;
        beta = b;
      }
    }
  if (found < 0) throw std::invalid_argument("inverse transform restricted to single-mode spinors");
  const int m1 = found / W - psi.K, m2 = found % W - psi.K;
  const Vec2 q = dual_vec(lat, m1, m2);
  const CVec2 keff{psi.k.x + q.x, psi.k.y + q.y};

  const Vec2 gamma{c1 * lat.gamma1.x + c2 * lat.gamma2.x, c1 * lat.gamma1.y + c2 * lat.gamma2.y};
  const cplx gz = cplx(gamma.x, gamma.y), gzb = cplx(gamma.x, -gamma.y);
  const CVec2 kp{cplx(kprime.x), cplx(kprime.y)};
  const cplx d1 = gform(CVec2{keff.x - kp.x, keff.y - kp.y}, CVec2{cplx(gamma.x), cplx(gamma.y)});
  const cplx d2 = gform(CVec2{keff.x + kp.x, keff.y + kp.y}, CVec2{cplx(gamma.x), cplx(gamma.y)});
  const double dscale =
      1e-10 * (1.0 + std::hypot(std::abs(keff.x), std::abs(keff.y)) * std::hypot(gamma.x, gamma.y));
  if (std::abs(d1) < dscale || std::abs(d2) < dscale)
    throw std::runtime_error("closed path hits a character singularity");

  const cplx bp = gen.b, bpc = std::conj(bp);
  const double den = 1.0 + std::norm(bp);
  const cplx q1 = (bp * alpha * gz + beta * gzb) / (den * 2.0 * PI * I * d1);
  const cplx q2 = (alpha * gz - bpc * beta * gzb) / (den * 2.0 * PI * I * d2);
  // psi' = (conj(b'), 1)^T q1 + (1, -b')^T q2, a single mode at keff
  KernelSpinor out;
  out.k = keff;
  out.K = psi.K;
  out.coeffs = Eigen::VectorXcd::Zero(2 * W * W);
  const int i0 = BlochMatrix::mode_index(0, 0, psi.K);
  out.coeffs[2 * i0] = bpc * q1 + q2;
  out.coeffs[2 * i0 + 1] = q1 - bp * q2;
  return out;
}

}  // namespace fermicurve
