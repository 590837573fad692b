#include "fermicurve/weierstrass.hpp"

#include "fermicurve/fft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace fermicurve {
namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// 2k as integer coordinates in the dual basis; requires a real momentum with
// 2k in the dual lattice (products of two spinors are then periodic).
std::array<int, 2> half_character(const Lattice& lat, const CVec2& k) {
  if (std::abs(k.x.imag()) > 1e-10 || std::abs(k.y.imag()) > 1e-10)
    throw std::invalid_argument("periodicity data needs a real momentum");
  std::array<int, 2> t;
  const Vec2 g[2] = {lat.gamma1, lat.gamma2};
  for (int i = 0; i < 2; ++i) {
    const double ti = 2.0 * (g[i].x * k.x.real() + g[i].y * k.y.real());
    if (std::abs(ti - std::round(ti)) > 1e-9)
      throw std::invalid_argument("periodicity data needs 2k in the dual lattice");
    t[i] = static_cast<int>(llround(ti));
  }
  return t;
}

cplx coeff_of(const Eigen::VectorXcd& c, int K, int comp, int m1, int m2) {
  if (std::abs(m1) > K || std::abs(m2) > K) return cplx(0.0);
  return c[2 * BlochMatrix::mode_index(m1, m2, K) + comp];
}

// Antilinear orbit pairing tau(psi) = (-conj(psi2), conj(psi1)) re-expressed
// at the same momentum: mode m maps to -t - m.
Eigen::VectorXcd tau_partner(const Eigen::VectorXcd& c, int K, const std::array<int, 2>& t) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(c.size());
  double dropped = 0.0;
  for (int m1 = -K; m1 <= K; ++m1)
    for (int m2 = -K; m2 <= K; ++m2) {
      const int idx = BlochMatrix::mode_index(m1, m2, K);
      const cplx a1 = c[2 * idx], a2 = c[2 * idx + 1];
      const int p1 = -t[0] - m1, p2 = -t[1] - m2;
      if (std::abs(p1) > K || std::abs(p2) > K) {
        dropped += std::norm(a1) + std::norm(a2);
        continue;
      }
      const int pidx = BlochMatrix::mode_index(p1, p2, K);
      out[2 * pidx] = -std::conj(a2);
      out[2 * pidx + 1] = std::conj(a1);
    }
  if (dropped > 1e-16 * c.squaredNorm())
    throw std::runtime_error("orbit partner leaves the cutoff window");
  return out;
}

// mean(a_comp * b_comp): only mode pairs summing to -2k survive.
cplx bimean(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, int K, int comp,
            const std::array<int, 2>& t) {
  cplx s = 0;
  for (int m1 = -K; m1 <= K; ++m1)
    for (int m2 = -K; m2 <= K; ++m2)
      s += coeff_of(a, K, comp, m1, m2) * coeff_of(b, K, comp, -t[0] - m1, -t[1] - m2);
  return s;
}

// mean(a_ca * conj(b_cb)): characters cancel, only equal modes survive.
cplx sesqmean(const Eigen::VectorXcd& a, int ca, const Eigen::VectorXcd& b, int cb, int K) {
  cplx s = 0;
  const int W = 2 * K + 1;
  for (int idx = 0; idx < W * W; ++idx) s += a[2 * idx + ca] * std::conj(b[2 * idx + cb]);
  return s;
}

// Worst-case one-form periods of a spinor over the two lattice generators:
// the complex form chi1^2 dz - chi2^2 dzbar (real and imaginary parts) and
// the real form chi1 conj(chi2) dz + conj.
std::array<double, 3> one_form_periods(const Eigen::VectorXcd& c, int K, const Lattice& lat,
                                       const std::array<int, 2>& t) {
  const cplx m11 = bimean(c, c, K, 0, t);
  const cplx m22 = bimean(c, c, K, 1, t);
  const cplx m12 = sesqmean(c, 0, c, 1, K);
  std::array<double, 3> out{0.0, 0.0, 0.0};
  const Vec2 g[2] = {lat.gamma1, lat.gamma2};
  for (int i = 0; i < 2; ++i) {
    const cplx gz(g[i].x, g[i].y);
    const cplx pc = gz * m11 - std::conj(gz) * m22;
    out[0] = std::max(out[0], std::abs(pc.real()));
    out[1] = std::max(out[1], std::abs(pc.imag()));
    out[2] = std::max(out[2], std::abs(2.0 * (gz * m12).real()));
  }
  return out;
}

}  // namespace

PeriodicityCombination solve_periodicity_combination(const std::vector<KernelSpinor>& kernel,
                                                     const std::vector<cplx>& slopes,
                                                     const Lattice& lat) {
  if (kernel.size() < 2)
    throw std::invalid_argument("periodicity solver needs a kernel of dimension at least two");
  const int K = kernel[0].K;
  const auto t = half_character(lat, kernel[0].k);
  for (const auto& s : kernel) {
    if (s.K != K) throw std::invalid_argument("kernel elements use different cutoffs");
    if (std::abs(s.k.x - kernel[0].k.x) > 1e-12 || std::abs(s.k.y - kernel[0].k.y) > 1e-12)
      throw std::invalid_argument("kernel elements sit at different momenta");
  }
  const cplx gz[2] = {cplx(lat.gamma1.x, lat.gamma1.y), cplx(lat.gamma2.x, lat.gamma2.y)};
  const double lenscale = std::abs(gz[0]) + std::abs(gz[1]);

  // Period pairings over the raw kernel list: the four quadratic equations are
  // z^T A_g z = 0 (bilinear) and z^dag C_g z = 0 (sesquilinear) per generator.
  const size_t d = kernel.size();
  double gmax = 0.0, ref = 0.0;
  for (size_t a = 0; a < d; ++a) {
    ref = std::max(ref, (sesqmean(kernel[a].coeffs, 0, kernel[a].coeffs, 0, K) +
                         sesqmean(kernel[a].coeffs, 1, kernel[a].coeffs, 1, K))
                            .real());
    for (size_t b = 0; b < d; ++b) {
      const cplx m11 = bimean(kernel[a].coeffs, kernel[b].coeffs, K, 0, t);
      const cplx m22 = bimean(kernel[a].coeffs, kernel[b].coeffs, K, 1, t);
      const cplx m12 = sesqmean(kernel[b].coeffs, 0, kernel[a].coeffs, 1, K);
      const cplx m21 = std::conj(sesqmean(kernel[a].coeffs, 0, kernel[b].coeffs, 1, K));
      for (int i = 0; i < 2; ++i) {
        gmax = std::max(gmax, std::abs(gz[i] * m11 - std::conj(gz[i]) * m22));
        gmax = std::max(gmax, std::abs(gz[i] * m12 + std::conj(gz[i]) * m21));
      }
    }
  }
  const double refscale = std::max(1.0, ref * lenscale);

  PeriodicityCombination out;
  const auto finish = [&](Eigen::VectorXcd coeffs, double sig) {
    out.chi.k = kernel[0].k;
    out.chi.K = K;
    out.chi.coeffs = std::move(coeffs);
    out.chi.character = kernel[0].character;
    out.chi.sigma_min = sig;
    out.residuals = one_form_periods(out.chi.coeffs, K, lat, t);
    const double chiscale = (sesqmean(out.chi.coeffs, 0, out.chi.coeffs, 0, K) +
                             sesqmean(out.chi.coeffs, 1, out.chi.coeffs, 1, K))
                                .real() *
                            lenscale;
    const double gate = 1e-10 * std::max(1.0, chiscale);
    if (out.residuals[0] > gate || out.residuals[1] > gate || out.residuals[2] > gate)
      throw std::runtime_error("periodicity residual above tolerance");
    return out;
  };

  if (gmax <= 1e-11 * refscale) {
    // Double point: every pairing vanishes on the whole kernel, so every
    // combination is periodic.  Return the first element unchanged.
    out.family_dim = static_cast<int>(d);
    out.z = {cplx(1.0), cplx(0.0), cplx(0.0), cplx(0.0)};
    out.branch = "degenerate";
    return finish(kernel[0].coeffs, kernel[0].sigma_min);
  }

  if (slopes.empty() || kernel.size() != 2 * slopes.size())
    throw std::invalid_argument("kernel must be arranged as orbit pairs matching the slope list");
  const size_t orbits = slopes.size();
  if (orbits < 2) throw std::runtime_error("a single orbit admits only the trivial combination");

  // Two orbits with equal or conjugate slopes can be combined.
  int oa = -1, ob = -1;
  bool conjbranch = false;
  for (size_t i = 0; i + 1 < orbits && oa < 0; ++i)
    for (size_t j = i + 1; j < orbits && oa < 0; ++j) {
      const double sc = 1e-8 * std::max({1.0, std::abs(slopes[i]), std::abs(slopes[j])});
      if (std::abs(slopes[i] - slopes[j]) <= sc) {
        oa = static_cast<int>(i);
        ob = static_cast<int>(j);
        conjbranch = false;
      } else if (std::abs(slopes[i] - std::conj(slopes[j])) <= sc) {
        oa = static_cast<int>(i);
        ob = static_cast<int>(j);
        conjbranch = true;
      }
    }
  if (oa < 0) {
    if (orbits == 2) throw std::runtime_error("no Weierstrass potential in this gauge");
    throw std::runtime_error(
        "no two orbits share a slope; combinations across three or more orbits are not "
        "implemented");
  }

  // Normalize one orbit basis (u, tau u) so its bilinear period pairing takes
  // the canonical form diag(1, -1) on the first generator and diag(s, -conj(s))
  // on the second, s the curve slope at the orbit.
  struct OrbitBasis {
    Eigen::VectorXcd u, v;
    cplx slope;
  };
  const auto normalize_orbit = [&](const Eigen::VectorXcd& raw, cplx slope_in) -> OrbitBasis {
    Eigen::VectorXcd u = raw;
    Eigen::VectorXcd v = tau_partner(u, K, t);
    const auto pairing = [&](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
      const cplx m11 = bimean(a, b, K, 0, t);
      const cplx m22 = bimean(a, b, K, 1, t);
      return std::array<cplx, 2>{gz[0] * m11 - std::conj(gz[0]) * m22,
                                 gz[1] * m11 - std::conj(gz[1]) * m22};
    };
    auto al = pairing(u, u);
    const auto be = pairing(u, v);
    const double amag = std::max(std::abs(al[0]), std::abs(al[1]));
    const double bmag = std::max(std::abs(be[0]), std::abs(be[1]));
    if (amag <= 1e-6 * bmag) {
      // Symmetric pairing type: the rotated pair ((u+v)/sqrt2, (v-u)/sqrt2)
      // diagonalizes the bilinear pairing.
      u = (u + v) / std::sqrt(2.0);
      v = tau_partner(u, K, t);
      al = pairing(u, u);
    } else if (bmag > 1e-6 * amag) {
      throw std::runtime_error("orbit pairing type is mixed");
    }
    if (std::abs(al[0]) <= 1e-14 * refscale)
      throw std::runtime_error("orbit pairing degenerate along the first period");
    const cplx lam = 1.0 / std::sqrt(al[0]);
    u *= lam;
    v = tau_partner(u, K, t);
    al = pairing(u, u);
    OrbitBasis nb{std::move(u), std::move(v), al[1]};
    if (std::abs(nb.slope - slope_in) > 1e-4 * (1.0 + std::abs(slope_in)))
      throw std::invalid_argument("supplied slope disagrees with the kernel pairing");
    return nb;
  };

  const OrbitBasis A = normalize_orbit(kernel[2 * oa].coeffs, slopes[oa]);
  const OrbitBasis B = normalize_orbit(kernel[2 * ob].coeffs, slopes[ob]);
  out.alpha = A.slope;
  out.beta = B.slope;
  if (!conjbranch) {
    out.z = {cplx(1.0), cplx(0.0), cplx(0.0, 1.0), cplx(0.0)};
    out.branch = "equal-slope";
  } else {
    out.z = {cplx(1.0), cplx(0.0), cplx(0.0), cplx(-1.0)};
    out.branch = "conjugate-slope";
  }
  out.family_dim = 2;
  Eigen::VectorXcd combo =
      out.z[0] * A.u + out.z[1] * A.v + out.z[2] * B.u + out.z[3] * B.v;
  return finish(std::move(combo),
                std::max(kernel[2 * oa].sigma_min, kernel[2 * ob].sigma_min));
}

namespace {

// Mean-normalized forward modes / plain mode-sum evaluation on the grid.
void to_modes(std::vector<cplx>& v, int n) {
  fft2_inplace(v, n, n, false);
  const double s = 1.0 / (static_cast<double>(n) * n);
  for (auto& x : v) x *= s;
}
void to_grid(std::vector<cplx>& v, int n) {
  fft2_inplace(v, n, n, true);
  const double s = static_cast<double>(n) * n;
  for (auto& x : v) x *= s;
}

struct SpinorGrids {
  std::vector<cplx> c1, c2;
};

// Evaluates both spinor components on the n x n grid (character included)
// through one inverse FFT per component.
SpinorGrids eval_spinor(const KernelSpinor& s, int n, const std::array<int, 2>& t) {
  const int K = s.K;
  const size_t N = static_cast<size_t>(n) * n;
  SpinorGrids g;
  g.c1.assign(N, cplx(0.0));
  g.c2.assign(N, cplx(0.0));
  for (int m1 = -K; m1 <= K; ++m1)
    for (int m2 = -K; m2 <= K; ++m2) {
      const int idx = BlochMatrix::mode_index(m1, m2, K);
      const int b1 = ((m1 % n) + n) % n, b2 = ((m2 % n) + n) % n;
      g.c1[static_cast<size_t>(b1) * n + b2] += s.coeffs[2 * idx];
      g.c2[static_cast<size_t>(b1) * n + b2] += s.coeffs[2 * idx + 1];
    }
  to_grid(g.c1, n);
  to_grid(g.c2, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const cplx ph = std::exp(PI * I * static_cast<double>(t[0] * i + t[1] * j) /
                               static_cast<double>(n));
      g.c1[static_cast<size_t>(i) * n + j] *= ph;
      g.c2[static_cast<size_t>(i) * n + j] *= ph;
    }
  }
  return g;
}

int bin_mode(int b, int n) { return b <= n / 2 ? b : b - n; }

}  // namespace

ImmersionGrid immersion_from_spinor(const KernelSpinor& chi, const Lattice& lat, int n) {
  if (!power_of_two(n) || n < 8)
    throw std::invalid_argument("grid size must be a power of two, at least 8");
  if (n < 2 * chi.K + 2) throw std::invalid_argument("grid too small for the modal band");
  const auto t = half_character(lat, chi.k);

  ImmersionGrid out;
  out.n = n;
  out.lat = lat;
  out.k = chi.k;
  out.closure = one_form_periods(chi.coeffs, chi.K, lat, t);
  if (std::max({out.closure[0], out.closure[1], out.closure[2]}) > 1e-8)
    throw std::runtime_error(
        "periodicity integrals nonzero: the immersion closes only on the universal cover");

  const auto sg = eval_spinor(chi, n, t);
  const size_t N = static_cast<size_t>(n) * n;
  std::vector<cplx> f(N), g2(N), h(N);
  out.density.resize(N);
  for (size_t p = 0; p < N; ++p) {
    f[p] = sg.c1[p] * sg.c1[p];
    g2[p] = -sg.c2[p] * sg.c2[p];
    h[p] = sg.c1[p] * std::conj(sg.c2[p]);
    out.density[p] = std::norm(sg.c1[p]) + std::norm(sg.c2[p]);
  }
  to_modes(f, n);
  to_modes(g2, n);
  to_modes(h, n);

  // Divide every nonzero mode by its derivative symbol; the mean modes are the
  // (vanishing) periods.  Each coefficient is the average of the dz and dzbar
  // routes, which coincide when the one-form is closed.
  std::vector<cplx> Xc(N, cplx(0.0)), X3(N, cplx(0.0));
  for (int b1 = 0; b1 < n; ++b1)
    for (int b2 = 0; b2 < n; ++b2) {
      if (b1 == 0 && b2 == 0) continue;
      const Vec2 q = dual_vec(lat, bin_mode(b1, n), bin_mode(b2, n));
      const cplx sp = PI * (q.y + I * q.x);
      const cplx sn = -PI * (q.y - I * q.x);
      const size_t p = static_cast<size_t>(b1) * n + b2;
      const size_t pneg = static_cast<size_t>((n - b1) % n) * n + (n - b2) % n;
      Xc[p] = 0.5 * (f[p] / sp + g2[p] / sn);
      X3[p] = 0.5 * (h[p] / sp + std::conj(h[pneg]) / sn);
    }
  to_grid(Xc, n);
  to_grid(X3, n);

  out.x.resize(N);
  out.y.resize(N);
  out.z.resize(N);
  const cplx x0 = Xc[0];
  const double z0 = X3[0].real();
  for (size_t p = 0; p < N; ++p) {
    out.x[p] = (Xc[p] - x0).real();
    out.y[p] = (Xc[p] - x0).imag();
    out.z[p] = X3[p].real() - z0;
  }
  return out;
}

namespace {

struct ComponentDerivs {
  std::vector<double> du, dv, duu, duv, dvv;
};

// Spectral lattice-coordinate derivatives of one immersion component; the
// affine part contributes constants to the first derivatives.
ComponentDerivs spectral_derivs(const std::vector<double>& comp, int n, double au, double av,
                                bool second) {
  const size_t N = comp.size();
  std::vector<cplx> modes(N);
  for (size_t p = 0; p < N; ++p) modes[p] = comp[p];
  to_modes(modes, n);
  ComponentDerivs d;
  const auto run = [&](auto factor, std::vector<double>& dst) {
    std::vector<cplx> w(N);
    for (int b1 = 0; b1 < n; ++b1)
      for (int b2 = 0; b2 < n; ++b2) {
        const size_t p = static_cast<size_t>(b1) * n + b2;
        w[p] = modes[p] * factor(bin_mode(b1, n), bin_mode(b2, n));
      }
    to_grid(w, n);
    dst.resize(N);
    for (size_t p = 0; p < N; ++p) dst[p] = w[p].real();
  };
  const cplx tp = 2.0 * PI * I;
  run([&](int m1, int m2) { (void)m2; return tp * static_cast<double>(m1); }, d.du);
  run([&](int m1, int m2) { (void)m1; return tp * static_cast<double>(m2); }, d.dv);
  for (size_t p = 0; p < N; ++p) {
    d.du[p] += au;
    d.dv[p] += av;
  }
  if (second) {
    run([&](int m1, int m2) { (void)m2; return (static_cast<double>(m1) * m1) * tp * tp; },
        d.duu);
    run([&](int m1, int m2) { return (static_cast<double>(m1) * m2) * tp * tp; }, d.duv);
    run([&](int m1, int m2) { (void)m1; return (static_cast<double>(m2) * m2) * tp * tp; },
        d.dvv);
  }
  return d;
}

void check_grid(const ImmersionGrid& g) {
  if (!power_of_two(g.n) || g.n < 8)
    throw std::invalid_argument("grid size must be a power of two, at least 8");
  const size_t N = static_cast<size_t>(g.n) * g.n;
  if (g.x.size() != N || g.y.size() != N || g.z.size() != N)
    throw std::invalid_argument("immersion grid arrays do not match the grid size");
}

struct V3 {
  double a, b, c;
};
V3 lincomb(double s, const V3& x, double t, const V3& y) {
  return {s * x.a + t * y.a, s * x.b + t * y.b, s * x.c + t * y.c};
}
double dot(const V3& x, const V3& y) { return x.a * y.a + x.b * y.b + x.c * y.c; }
V3 cross(const V3& x, const V3& y) {
  return {x.b * y.c - x.c * y.b, x.c * y.a - x.a * y.c, x.a * y.b - x.b * y.a};
}

}  // namespace

double willmore_quadrature(const ImmersionGrid& g) {
  check_grid(g);
  const int n = g.n;
  const size_t N = static_cast<size_t>(n) * n;
  const ComponentDerivs dx = spectral_derivs(g.x, n, g.secular_u[0], g.secular_v[0], true);
  const ComponentDerivs dy = spectral_derivs(g.y, n, g.secular_u[1], g.secular_v[1], true);
  const ComponentDerivs dz = spectral_derivs(g.z, n, g.secular_u[2], g.secular_v[2], true);
  // Euclidean derivatives via the constant chain rule x = u gamma1 + v gamma2.
  const double A = g.lat.kappa1.x, B = g.lat.kappa2.x;
  const double C = g.lat.kappa1.y, D = g.lat.kappa2.y;

  double detmin = std::numeric_limits<double>::infinity(), detmax = 0.0;
  double acc = 0.0;
  for (size_t p = 0; p < N; ++p) {
    const V3 Xu{dx.du[p], dy.du[p], dz.du[p]}, Xv{dx.dv[p], dy.dv[p], dz.dv[p]};
    const V3 Xuu{dx.duu[p], dy.duu[p], dz.duu[p]}, Xuv{dx.duv[p], dy.duv[p], dz.duv[p]},
        Xvv{dx.dvv[p], dy.dvv[p], dz.dvv[p]};
    const V3 X1 = lincomb(A, Xu, B, Xv);
    const V3 X2 = lincomb(C, Xu, D, Xv);
    const V3 X11 = lincomb(A * A, Xuu, 2.0 * A * B, Xuv);
    const V3 X11f = lincomb(1.0, X11, B * B, Xvv);
    const V3 X12 = lincomb(A * C, Xuu, A * D + B * C, Xuv);
    const V3 X12f = lincomb(1.0, X12, B * D, Xvv);
    const V3 X22 = lincomb(C * C, Xuu, 2.0 * C * D, Xuv);
    const V3 X22f = lincomb(1.0, X22, D * D, Xvv);
    const double E = dot(X1, X1), F = dot(X1, X2), G = dot(X2, X2);
    const double det = E * G - F * F;
    detmin = std::min(detmin, det);
    detmax = std::max(detmax, det);
    if (det > 0.0) {
      const double rt = std::sqrt(det);
      const V3 cr = cross(X1, X2);
      const V3 nv{cr.a / rt, cr.b / rt, cr.c / rt};
      const double L = dot(X11f, nv), M = dot(X12f, nv), Nn = dot(X22f, nv);
      const double H = (E * Nn - 2.0 * F * M + G * L) / (2.0 * det);
      acc += H * H * rt;
    }
  }
  if (!(detmin > 1e-10 * detmax))
    throw std::runtime_error("degenerate metric cell in the quadrature grid");
  return g.lat.vol * acc / static_cast<double>(N);
}

double conformality_residual(const ImmersionGrid& g) {
  check_grid(g);
  const int n = g.n;
  const size_t N = static_cast<size_t>(n) * n;
  const ComponentDerivs dx = spectral_derivs(g.x, n, g.secular_u[0], g.secular_v[0], false);
  const ComponentDerivs dy = spectral_derivs(g.y, n, g.secular_u[1], g.secular_v[1], false);
  const ComponentDerivs dz = spectral_derivs(g.z, n, g.secular_u[2], g.secular_v[2], false);
  const double A = g.lat.kappa1.x, B = g.lat.kappa2.x;
  const double C = g.lat.kappa1.y, D = g.lat.kappa2.y;
  double dmax = 0.0;
  if (!g.density.empty()) {
    if (g.density.size() != N)
      throw std::invalid_argument("density grid does not match the grid size");
    dmax = *std::max_element(g.density.begin(), g.density.end());
  }
  double worst = 0.0;
  for (size_t p = 0; p < N; ++p) {
    if (!g.density.empty() && g.density[p] < 1e-10 * dmax) continue;
    const V3 Xu{dx.du[p], dy.du[p], dz.du[p]}, Xv{dx.dv[p], dy.dv[p], dz.dv[p]};
    const V3 X1 = lincomb(A, Xu, B, Xv);
    const V3 X2 = lincomb(C, Xu, D, Xv);
    const double E = dot(X1, X1), F = dot(X1, X2), G = dot(X2, X2);
    const double denom = E + G;
    if (denom <= 0.0) continue;
    worst = std::max(worst, std::max(std::abs(E - G), std::abs(F)) / denom);
  }
  return worst;
}

void export_mesh(const ImmersionGrid& g, const std::string& path) {
  check_grid(g);
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open mesh output file: " + path);
  const int n = g.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const size_t p = static_cast<size_t>(i) * n + j;
      const double u = static_cast<double>(i) / n, v = static_cast<double>(j) / n;
      std::fprintf(f, "%.12g %.12g %.12g\n", g.x[p] + u * g.secular_u[0] + v * g.secular_v[0],
                   g.y[p] + u * g.secular_u[1] + v * g.secular_v[1],
                   g.z[p] + u * g.secular_u[2] + v * g.secular_v[2]);
    }
  std::fclose(f);
}

double potential_l2_sq(const FourierPotential& pot, const Lattice& lat) {
  double s = 0.0;
  for (const auto& [idx, val] : pot.V) {
    (void)idx;
    s += std::norm(val);
  }
  return lat.vol * s;
}

}  // namespace fermicurve
