#include "fermicurve/dirac.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fermicurve {

namespace {

using ModeMap = std::map<std::array<int, 2>, cplx>;

int map_max_index(const ModeMap& m) {
  int r = 0;
  for (const auto& [key, val] : m) {
    (void)val;
    r = std::max({r, std::abs(key[0]), std::abs(key[1])});
  }
  return r;
}

cplx map_at(const ModeMap& m, int n1, int n2) {
  auto it = m.find({n1, n2});
  return it == m.end() ? cplx(0.0) : it->second;
}

ModeMap reflect_map(const ModeMap& m) {
  ModeMap r;
  for (const auto& [key, val] : m) r[{-key[0], -key[1]}] = val;
  return r;
}

// Off-diagonal spinor multipliers pi((k+kappa')_2 +- i (k+kappa')_1).
cplx deriv_plus(const Lattice& lat, const CVec2& k, int n1, int n2) {
  CVec2 q = k + CVec2(dual_vec(lat, n1, n2));
  return PI * (q.y + I * q.x);
}
cplx deriv_minus(const Lattice& lat, const CVec2& k, int n1, int n2) {
  CVec2 q = k + CVec2(dual_vec(lat, n1, n2));
  return PI * (q.y - I * q.x);
}

// Matrix-free application of the Dirac-type operator with the given maps in
// the two convolution slots. swapped_derivs exchanges the two off-diagonal
// multipliers (the transposed operator's layout).
Eigen::VectorXcd apply_dirac_vec(const ModeMap& vslot, const ModeMap& wslot, const Lattice& lat,
                                 const CVec2& k, int K, bool swapped_derivs,
                                 const Eigen::VectorXcd& v) {
  const int W = 2 * K + 1;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(2 * W * W);
  for (int m1 = -K; m1 <= K; ++m1)
    for (int m2 = -K; m2 <= K; ++m2) {
      const int im = BlochMatrix::mode_index(m1, m2, K);
      cplx dp = deriv_plus(lat, k, m1, m2), dm = deriv_minus(lat, k, m1, m2);
      if (swapped_derivs) std::swap(dp, dm);
      out[2 * im] += dp * v[2 * im + 1];
      out[2 * im + 1] += dm * v[2 * im];
    }
  auto convolve = [&](const ModeMap& mp, int row_off, int col_off) {
    for (const auto& [key, amp] : mp) {
      if (amp == cplx(0.0)) continue;
      for (int n1 = -K; n1 <= K; ++n1)
        for (int n2 = -K; n2 <= K; ++n2) {
          const int m1 = n1 + key[0], m2 = n2 + key[1];
          if (std::abs(m1) > K || std::abs(m2) > K) continue;
          out[2 * BlochMatrix::mode_index(m1, m2, K) + row_off] +=
              amp * v[2 * BlochMatrix::mode_index(n1, n2, K) + col_off];
        }
    }
  };
  convolve(vslot, 0, 0);
  convolve(wslot, 1, 1);
  return out;
}

}  // namespace

int FourierPotential::max_index() const { return std::max(map_max_index(V), map_max_index(W)); }

cplx FourierPotential::vhat(int n1, int n2) const { return map_at(V, n1, n2); }
cplx FourierPotential::what(int n1, int n2) const { return map_at(W, n1, n2); }

bool satisfies_symmetry(const FourierPotential& p, FourierPotential::Symmetry s) {
  const double tol = 1e-12;
  auto amp_scale = [&] {
    double r = 0;
    for (const auto& [k, v] : p.V) {
      (void)k;
      r = std::max(r, std::abs(v));
    }
    for (const auto& [k, v] : p.W) {
      (void)k;
      r = std::max(r, std::abs(v));
    }
    return std::max(r, 1.0);
  }();
  auto check_pairs = [&](const ModeMap& a, const ModeMap& b, bool conj_reflect) {
    // b(kappa) must equal conj(a(-kappa)) (conj_reflect) resp. a(kappa).
    ModeMap keys = conj_reflect ? reflect_map(a) : a;
    for (const auto& [k, v] : b) keys.emplace(k, v);
    for (const auto& [k, unused] : keys) {
      (void)unused;
      cplx lhs = map_at(b, k[0], k[1]);
      cplx rhs = conj_reflect ? std::conj(map_at(a, -k[0], -k[1])) : map_at(a, k[0], k[1]);
      if (std::abs(lhs - rhs) > tol * amp_scale) return false;
    }
    return true;
  };
  switch (s) {
    case FourierPotential::general_pair:
      return true;
    case FourierPotential::eta_pair:
      return check_pairs(p.V, p.W, true);
    case FourierPotential::sigma_real:
      return check_pairs(p.V, p.W, false) && check_pairs(p.V, p.V, true);
  }
  return false;
}

void FourierPotential::validate() const {
  if (!satisfies_symmetry(*this, sym)) throw std::invalid_argument("potential symmetry closure fails");
}

FourierPotential FourierPotential::constant(cplx u) {
  FourierPotential p;
  p.V[{0, 0}] = u;
  p.W[{0, 0}] = std::conj(u);
  p.sym = std::abs(u.imag()) == 0.0 ? sigma_real : eta_pair;
  return p;
}

FourierPotential FourierPotential::single_mode(cplx u, std::array<int, 2> kappa) {
  FourierPotential p;
  p.sym = eta_pair;
  p.V[{kappa[0], kappa[1]}] = u;
  p.W[{-kappa[0], -kappa[1]}] = std::conj(u);
  return p;
}

BlochMatrix assemble_dirac(const FourierPotential& pot, const Lattice& lat, const CVec2& k,
                           int K) {
  if (K < pot.max_index()) throw std::invalid_argument("cutoff smaller than potential support");
  BlochMatrix B;
  B.K = K;
  B.lat = lat;
  B.k = k;
  const int W = 2 * K + 1;
  B.A = Eigen::MatrixXcd::Zero(2 * W * W, 2 * W * W);
  for (int m1 = -K; m1 <= K; ++m1)
    for (int m2 = -K; m2 <= K; ++m2) {
      const int im = BlochMatrix::mode_index(m1, m2, K);
      B.A(2 * im, 2 * im + 1) = deriv_plus(lat, k, m1, m2);
      B.A(2 * im + 1, 2 * im) = deriv_minus(lat, k, m1, m2);
      for (int n1 = -K; n1 <= K; ++n1)
        for (int n2 = -K; n2 <= K; ++n2) {
          const int in = BlochMatrix::mode_index(n1, n2, K);
          cplx v = pot.vhat(m1 - n1, m2 - n2);
          cplx w = pot.what(m1 - n1, m2 - n2);
          if (v != cplx(0.0)) B.A(2 * im, 2 * in) += v;
          if (w != cplx(0.0)) B.A(2 * im + 1, 2 * in + 1) += w;
        }
    }
  return B;
}

BlochMatrix assemble_dtilde(const FourierPotential& pot, const Lattice& lat, cplx xp, int K) {
  if (K < pot.max_index()) throw std::invalid_argument("cutoff smaller than potential support");
  const cplx ap = lat.kappa1.y + I * lat.kappa1.x, am = lat.kappa1.y - I * lat.kappa1.x;
  const cplx bp = lat.kappa2.y + I * lat.kappa2.x, bm = lat.kappa2.y - I * lat.kappa2.x;
  if (std::abs(bp * bm) < 1e-14 * norm2(lat.kappa2))
    throw std::invalid_argument("degenerate dual-basis condition g(kappa2,kappa2)=0");
  BlochMatrix B;
  B.K = K;
  B.lat = lat;
  B.xp = xp;
  B.sheared = true;
  const int W = 2 * K + 1;
  B.A = Eigen::MatrixXcd::Zero(2 * W * W, 2 * W * W);
  for (int m1 = -K; m1 <= K; ++m1)
    for (int m2 = -K; m2 <= K; ++m2) {
      const int im = BlochMatrix::mode_index(m1, m2, K);
      Vec2 kp = dual_vec(lat, m1, m2);
      const cplx cp = kp.y + I * kp.x, cm = kp.y - I * kp.x;
      B.A(2 * im, 2 * im) = -PI * (xp * am + cm) / bm;
      B.A(2 * im + 1, 2 * im + 1) = -PI * (xp * ap + cp) / bp;
      for (int n1 = -K; n1 <= K; ++n1)
        for (int n2 = -K; n2 <= K; ++n2) {
          const int in = BlochMatrix::mode_index(n1, n2, K);
          cplx v = pot.vhat(m1 - n1, m2 - n2);
          cplx w = pot.what(m1 - n1, m2 - n2);
          if (w != cplx(0.0)) B.A(2 * im, 2 * in + 1) += -w / bm;
          if (v != cplx(0.0)) B.A(2 * im + 1, 2 * in) += -v / bp;
        }
    }
  return B;
}

std::vector<SlicePoint> fermi_slice(const FourierPotential& pot, const Lattice& lat, cplx xp,
                                    int K) {
  BlochMatrix B = assemble_dtilde(pot, lat, xp, K);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(B.A, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");
  std::vector<SlicePoint> pts(B.A.rows());
  for (int i = 0; i < B.A.rows(); ++i) {
    pts[i].yp = es.eigenvalues()[i] / PI;
    pts[i].vec = es.eigenvectors().col(i);
  }
  auto key = [](const SlicePoint& p) {
    return std::pair<long long, long long>(llround(p.yp.real() * 1e9), llround(p.yp.imag() * 1e9));
  };
  std::sort(pts.begin(), pts.end(),
            [&](const SlicePoint& a, const SlicePoint& b) { return key(a) < key(b); });
  return pts;
}

std::vector<cplx> fermi_slice_values(const FourierPotential& pot, const Lattice& lat, cplx xp,
                                     int K) {
  if (K < pot.max_index()) throw std::invalid_argument("cutoff smaller than potential support");
  const cplx ap = lat.kappa1.y + I * lat.kappa1.x, am = lat.kappa1.y - I * lat.kappa1.x;
  const cplx bp = lat.kappa2.y + I * lat.kappa2.x, bm = lat.kappa2.y - I * lat.kappa2.x;
  if (std::abs(bp * bm) < 1e-14 * norm2(lat.kappa2))
    throw std::invalid_argument("degenerate dual-basis condition g(kappa2,kappa2)=0");
  const int W = 2 * K + 1;
  bool axis1 = true, axis2 = true;
  auto scan = [&](const ModeMap& m) {
    for (const auto& [key, v] : m) {
      (void)v;
      if (key[1] != 0) axis1 = false;
      if (key[0] != 0) axis2 = false;
    }
  };
  scan(pot.V);
  scan(pot.W);

  std::vector<cplx> vals;
  vals.reserve(2 * W * W);
  if (axis1 || axis2) {
    // Coupling moves modes only along one index axis, so the transverse index
    // is conserved and each transverse block diagonalizes independently.
    const bool along1 = axis1;
    Eigen::MatrixXcd Bm(2 * W, 2 * W);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es;
    for (int t = -K; t <= K; ++t) {
      Bm.setZero();
      for (int i = -K; i <= K; ++i) {
        const int m1 = along1 ? i : t, m2 = along1 ? t : i;
        Vec2 kp = dual_vec(lat, m1, m2);
        const cplx cp = kp.y + I * kp.x, cm = kp.y - I * kp.x;
        Bm(2 * (i + K), 2 * (i + K)) = -PI * (xp * am + cm) / bm;
        Bm(2 * (i + K) + 1, 2 * (i + K) + 1) = -PI * (xp * ap + cp) / bp;
        for (int j = -K; j <= K; ++j) {
          const int d = i - j;
          cplx v = along1 ? pot.vhat(d, 0) : pot.vhat(0, d);
          cplx w = along1 ? pot.what(d, 0) : pot.what(0, d);
          if (w != cplx(0.0)) Bm(2 * (i + K), 2 * (j + K) + 1) += -w / bm;
          if (v != cplx(0.0)) Bm(2 * (i + K) + 1, 2 * (j + K)) += -v / bp;
        }
      }
      es.compute(Bm, /*computeEigenvectors=*/false);
      if (es.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");
      for (int i = 0; i < 2 * W; ++i) vals.push_back(es.eigenvalues()[i] / PI);
    }
  } else {
    BlochMatrix B = assemble_dtilde(pot, lat, xp, K);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(B.A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");
    for (int i = 0; i < B.A.rows(); ++i) vals.push_back(es.eigenvalues()[i] / PI);
  }
  auto key = [](cplx y) {
    return std::pair<long long, long long>(llround(y.real() * 1e9), llround(y.imag() * 1e9));
  };
  std::sort(vals.begin(), vals.end(), [&](cplx a, cplx b) { return key(a) < key(b); });
  return vals;
}

namespace {

std::optional<std::array<int, 2>> spinor_character(const Lattice& lat, const CVec2& k) {
  if (std::abs(k.x.imag()) > 1e-10 || std::abs(k.y.imag()) > 1e-10) return std::nullopt;
  std::array<int, 2> out;
  const Vec2 g[2] = {lat.gamma1, lat.gamma2};
  for (int i = 0; i < 2; ++i) {
    double t = 2.0 * (g[i].x * k.x.real() + g[i].y * k.y.real());
    double r = std::round(t);
    if (std::abs(t - r) > 1e-9) return std::nullopt;
    out[i] = (llround(r) % 2 == 0) ? 1 : -1;
  }
  return out;
}

struct SingularTriple {
  double sigma;
  Eigen::VectorXcd vec;  // full Bloch layout
};

}  // namespace

KernelResult kernel_at(const FourierPotential& pot, const Lattice& lat, const CVec2& k, int K) {
  if (K < pot.max_index()) throw std::invalid_argument("cutoff smaller than potential support");
  const int W = 2 * K + 1;
  bool axis1 = true, axis2 = true;  // support confined to one index axis?
  auto scan = [&](const ModeMap& m) {
    for (const auto& [key, v] : m) {
      (void)v;
      if (key[1] != 0) axis1 = false;
      if (key[0] != 0) axis2 = false;
    }
  };
  scan(pot.V);
  scan(pot.W);

  std::vector<SingularTriple> all;
  double op_norm = 0;

  if (axis1 || axis2) {
    // Exact block decomposition over the transverse mode index: coupling
    // never changes the conserved index, so each block is an independent
    // one-dimensional Dirac truncation.
    const bool along1 = axis1;  // varying index is the first one
    for (int t = -K; t <= K; ++t) {
      Eigen::MatrixXcd Bm = Eigen::MatrixXcd::Zero(2 * W, 2 * W);
      for (int i = -K; i <= K; ++i) {
        const int m1 = along1 ? i : t, m2 = along1 ? t : i;
        Bm(2 * (i + K), 2 * (i + K) + 1) = deriv_plus(lat, k, m1, m2);
        Bm(2 * (i + K) + 1, 2 * (i + K)) = deriv_minus(lat, k, m1, m2);
        for (int j = -K; j <= K; ++j) {
          const int d = i - j;
          cplx v = along1 ? pot.vhat(d, 0) : pot.vhat(0, d);
          cplx w = along1 ? pot.what(d, 0) : pot.what(0, d);
          if (v != cplx(0.0)) Bm(2 * (i + K), 2 * (j + K)) += v;
          if (w != cplx(0.0)) Bm(2 * (i + K) + 1, 2 * (j + K) + 1) += w;
        }
      }
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Bm, Eigen::ComputeThinV);
      op_norm = std::max(op_norm, svd.singularValues()[0]);
      for (int s = 0; s < svd.singularValues().size(); ++s) {
        Eigen::VectorXcd full = Eigen::VectorXcd::Zero(2 * W * W);
        for (int i = -K; i <= K; ++i) {
          const int im = along1 ? BlochMatrix::mode_index(i, t, K)
                                : BlochMatrix::mode_index(t, i, K);
          full[2 * im] = svd.matrixV()(2 * (i + K), s);
          full[2 * im + 1] = svd.matrixV()(2 * (i + K) + 1, s);
        }
        all.push_back({svd.singularValues()[s], std::move(full)});
      }
    }
  } else {
    BlochMatrix B = assemble_dirac(pot, lat, k, K);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(B.A, Eigen::ComputeThinV);
    op_norm = svd.singularValues()[0];
    for (int s = 0; s < svd.singularValues().size(); ++s)
      all.push_back({svd.singularValues()[s], svd.matrixV().col(s)});
  }

  KernelResult res;
  res.op_norm = op_norm;
  for (const auto& tr : all) {
    const double ratio = tr.sigma / op_norm;
    if (ratio >= 1e-10 && ratio <= 1e-6) res.ambiguous = true;
    if (tr.sigma < 1e-8 * op_norm) {
      KernelSpinor sp;
      sp.k = k;
      sp.K = K;
      sp.coeffs = tr.vec;
      sp.character = spinor_character(lat, k);
      sp.sigma_min = tr.sigma;
      res.spinors.push_back(std::move(sp));
    }
  }
  std::sort(res.spinors.begin(), res.spinors.end(),
            [](const KernelSpinor& a, const KernelSpinor& b) { return a.sigma_min < b.sigma_min; });
  return res;
}

cplx zplus(const Lattice& lat, const CVec2& k) { return lat.vol * (I * k.x - k.y); }
cplx zminus(const Lattice& lat, const CVec2& k) { return lat.vol * (I * k.x + k.y); }

namespace {

// Distance from w to the complexified lattice Z lambda1 + Z lambda2.
double complex_lattice_distance(const ThetaParams& tp, cplx w) {
  const double det = tp.lambda1.real() * tp.lambda2.imag() - tp.lambda1.imag() * tp.lambda2.real();
  const double s = (w.real() * tp.lambda2.imag() - w.imag() * tp.lambda2.real()) / det;
  const double t = (tp.lambda1.real() * w.imag() - tp.lambda1.imag() * w.real()) / det;
  cplx near = std::round(s) * tp.lambda1 + std::round(t) * tp.lambda2;
  return std::abs(w - near);
}

cplx k1_eval(const Lattice& lat, const ThetaParams& tp, const CVec2& k, cplx w) {
  const double scale = std::max(std::abs(tp.lambda1), std::abs(tp.lambda2));
  const cplx zp = zplus(lat, k);
  if (complex_lattice_distance(tp, zp) < 1e-10 * scale)
    throw std::domain_error("resolvent pole: z+(k) on the complexified lattice");
  if (complex_lattice_distance(tp, w) < 1e-10 * scale)
    throw std::domain_error("resolvent kernel evaluated on the diagonal lattice");
  const cplx pref = std::exp(2.0 * PI * I * gform(CVec2(lat.gamma1), k) * w / tp.lambda1);
  return pref * theta_delta_eval(tp, w + zp) /
         (theta_delta_eval(tp, w) * theta_delta_eval(tp, zp));
}

}  // namespace

ResolventKernel free_resolvent_kernel(const Lattice& lat, const CVec2& k, cplx z, cplx zprime) {
  const ThetaParams tp = theta_params(lat);
  const cplx w = z - zprime;
  ResolventKernel out;
  out.K1 = k1_eval(lat, tp, k, w);
  // The dbar-direction kernel is the conjugate of the holomorphic one at the
  // reflected momentum: K2(w, k) = conj(K1(w, -conj(k))), which reproduces the
  // displayed prefactor exp(2 pi i g(gamma1,k) conj(w)/conj(lambda1)) and the
  // conjugated theta ratio with shift conj(z-(k)) = z+(-conj(k)).
  const CVec2 kr{-std::conj(k.x), -std::conj(k.y)};
  out.K2 = std::conj(k1_eval(lat, tp, kr, w));
  return out;
}

std::array<cplx, 3> periodicity_integrals(const KernelSpinor& s, const Lattice& lat) {
  if (std::abs(s.k.x.imag()) > 1e-10 || std::abs(s.k.y.imag()) > 1e-10)
    throw std::invalid_argument("periodicity integrals need a real momentum");
  std::array<long long, 2> t;
  const Vec2 g[2] = {lat.gamma1, lat.gamma2};
  for (int i = 0; i < 2; ++i) {
    double ti = 2.0 * (g[i].x * s.k.x.real() + g[i].y * s.k.y.real());
    if (std::abs(ti - std::round(ti)) > 1e-9)
      throw std::invalid_argument("periodicity integrals need 2k in the dual lattice");
    t[i] = llround(ti);
  }
  const int K = s.K, W = 2 * K + 1;
  auto coeff = [&](int comp, int m1, int m2) -> cplx {
    if (std::abs(m1) > K || std::abs(m2) > K) return 0.0;
    return s.coeffs[2 * BlochMatrix::mode_index(m1, m2, K) + comp];
  };
  (void)W;
  cplx i1 = 0, i2 = 0, i3 = 0;
  for (int m1 = -K; m1 <= K; ++m1)
    for (int m2 = -K; m2 <= K; ++m2) {
      const int n1 = -static_cast<int>(t[0]) - m1, n2 = -static_cast<int>(t[1]) - m2;
      i1 += coeff(0, m1, m2) * coeff(0, n1, n2);
      i2 += coeff(1, m1, m2) * coeff(1, n1, n2);
      i3 += coeff(0, m1, m2) * std::conj(coeff(1, m1, m2));
    }
  return {lat.vol * i1, lat.vol * i2, lat.vol * i3};
}

TransportedSpinor involution_images(const KernelSpinor& s, const FourierPotential& pot,
                                    const Lattice& lat, Involution which) {
  const int K = s.K, W = 2 * K + 1;
  auto cof = [&](int comp, int m1, int m2) -> cplx {
    return s.coeffs[2 * BlochMatrix::mode_index(m1, m2, K) + comp];
  };
  TransportedSpinor out;
  out.coeffs = Eigen::VectorXcd::Zero(2 * W * W);

  ModeMap vslot, wslot;
  bool swapped_derivs = false;
  switch (which) {
    case Involution::sigma:
      // phi = (reflected) J psi annihilates the transpose of the operator
      // with swapped potentials at -k.
      out.k_image = -s.k;
      for (int m1 = -K; m1 <= K; ++m1)
        for (int m2 = -K; m2 <= K; ++m2) {
          const int im = BlochMatrix::mode_index(m1, m2, K);
          out.coeffs[2 * im] = cof(1, -m1, -m2);
          out.coeffs[2 * im + 1] = -cof(0, -m1, -m2);
        }
      vslot = reflect_map(pot.W);
      wslot = reflect_map(pot.V);
      swapped_derivs = true;
      break;
    case Involution::rho:
      if (!satisfies_symmetry(pot, FourierPotential::sigma_real))
        throw std::invalid_argument("rho transport needs a sigma_real potential");
      out.k_image = rho_k(s.k);
      for (int i = 0; i < 2 * W * W; ++i) out.coeffs[i] = std::conj(s.coeffs[i]);
      vslot = reflect_map(pot.V);
      wslot = reflect_map(pot.W);
      swapped_derivs = true;
      break;
    case Involution::eta:
      if (!satisfies_symmetry(pot, FourierPotential::eta_pair))
        throw std::invalid_argument("eta transport needs an eta_pair potential");
      out.k_image = eta_k(s.k);
      for (int m1 = -K; m1 <= K; ++m1)
        for (int m2 = -K; m2 <= K; ++m2) {
          const int im = BlochMatrix::mode_index(m1, m2, K);
          out.coeffs[2 * im] = std::conj(cof(1, -m1, -m2));
          out.coeffs[2 * im + 1] = -std::conj(cof(0, -m1, -m2));
        }
      vslot = pot.V;
      wslot = pot.W;
      break;
  }
  Eigen::VectorXcd r =
      apply_dirac_vec(vslot, wslot, lat, out.k_image, K, swapped_derivs, out.coeffs);
  out.residual = r.norm() / out.coeffs.norm();
  return out;
}

}  // namespace fermicurve
