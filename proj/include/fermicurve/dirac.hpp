#pragma once
// Fourier-Galerkin truncation of the periodic Dirac operator, the sheared
// eigenvalue problem producing Fermi-curve slices, kernel extraction, the
// free-resolvent theta kernel, periodicity integrals, and involution
// transport of kernel spinors.

#include "fermicurve/common.hpp"
#include "fermicurve/elliptic.hpp"
#include "fermicurve/lattice.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>

namespace fermicurve {

// Finitely supported Fourier data of a potential pair (V, W). Indices (n1,n2)
// refer to the dual vector n1*kappa1 + n2*kappa2.
struct FourierPotential {
  enum Symmetry { general_pair, eta_pair, sigma_real };
  Symmetry sym = general_pair;
  std::map<std::array<int, 2>, cplx> V, W;

  int max_index() const;
  cplx vhat(int n1, int n2) const;
  cplx what(int n1, int n2) const;
  void validate() const;  // throws when the symmetry closure fails

  // (V, W) = (u, conj(u)) constant pair.
  static FourierPotential constant(cplx u);
  // (V, W) = (u psi_kappa, conj(u) psi_{-kappa}).
  static FourierPotential single_mode(cplx u, std::array<int, 2> kappa);
};

// True when the coefficient data actually satisfies the closure relations of
// symmetry s (identity check, independent of the declared tag).
bool satisfies_symmetry(const FourierPotential& p, FourierPotential::Symmetry s);

// Dense truncation over modes |n1|,|n2| <= K with 2x2 spinor blocks.
struct BlochMatrix {
  int K = 0;
  Lattice lat;
  CVec2 k;        // quasimomentum (Dirac form) — unused for the sheared form
  cplx xp = 0;    // slice coordinate (sheared form only)
  bool sheared = false;
  Eigen::MatrixXcd A;

  static int mode_index(int n1, int n2, int K) { return (n1 + K) * (2 * K + 1) + (n2 + K); }
  int dim() const { return 2 * (2 * K + 1) * (2 * K + 1); }
};

// D(V, W, k): rows (V psi1 + d psi2, -dbar psi1 + W psi2) over modes, with
// d psi_q = pi (q2 + i q1) psi_q and -dbar psi_q = pi (q2 - i q1) psi_q.
BlochMatrix assemble_dirac(const FourierPotential& pot, const Lattice& lat, const CVec2& k, int K);

// Sheared operator at fixed xp: eigenvalues lambda give Fermi-curve points
// k = xp*kappa1 + (lambda/pi)*kappa2 + modes.
BlochMatrix assemble_dtilde(const FourierPotential& pot, const Lattice& lat, cplx xp, int K);

struct SlicePoint {
  cplx yp;
  Eigen::VectorXcd vec;
};

// All eigenvalues lambda/pi of the sheared operator, sorted by the rounded
// lexicographic key (1e-9 grid on real, then imaginary part).
std::vector<SlicePoint> fermi_slice(const FourierPotential& pot, const Lattice& lat, cplx xp,
                                    int K);

// Eigenvalues-only variant (same multiset, same ordering, no vectors).  When
// every stored potential mode lies on a single index axis the sheared
// operator conserves the transverse mode index, and the slice is solved per
// transverse block of size 2(2K+1) instead of densely.
std::vector<cplx> fermi_slice_values(const FourierPotential& pot, const Lattice& lat, cplx xp,
                                     int K);

struct KernelSpinor {
  CVec2 k;
  int K = 0;
  Eigen::VectorXcd coeffs;  // BlochMatrix layout
  std::optional<std::array<int, 2>> character;  // {+-1, +-1} when 2k is a real dual vector
  double sigma_min = 0;
};

struct KernelResult {
  std::vector<KernelSpinor> spinors;
  bool ambiguous = false;  // singular values inside the two-tier threshold band
  double op_norm = 0;
};

// Singular vectors of D(V,W,k) below 1e-8 * ||D||. Potentials supported on a
// single index axis use the exact block decomposition over transverse modes.
KernelResult kernel_at(const FourierPotential& pot, const Lattice& lat, const CVec2& k, int K);

// Free resolvent kernel entries at z - z'.
struct ResolventKernel {
  cplx K1, K2;  // matrix ((0, K1), (-K2, 0)) with measure d^2x'/pi
};
ResolventKernel free_resolvent_kernel(const Lattice& lat, const CVec2& k, cplx z, cplx zprime);

// z^+(k) = vol (i k1 - k2), z^-(k) = vol (i k1 + k2).
cplx zplus(const Lattice& lat, const CVec2& k);
cplx zminus(const Lattice& lat, const CVec2& k);

// Integrals I1 = int psi1^2, I2 = int psi2^2, I3 = int psi1 conj(psi2) of a
// kernel spinor at a real half-dual-lattice momentum (2k in the dual lattice),
// evaluated exactly from Fourier coefficients.
std::array<cplx, 3> periodicity_integrals(const KernelSpinor& s, const Lattice& lat);

enum class Involution { sigma, rho, eta };

struct TransportedSpinor {
  CVec2 k_image;
  Eigen::VectorXcd coeffs;
  double residual = 0;  // in the operator the image is predicted to annihilate
};

// Transports a kernel spinor through one of the curve involutions:
// sigma: J psi at -k in the transposed operator with (V,W) swapped;
// rho (sigma_real only): conj(psi) at conj(k) in the transposed operator;
// eta (eta_pair only): J conj(psi) at -conj(k) in the same operator.
TransportedSpinor involution_images(const KernelSpinor& s, const FourierPotential& pot,
                                    const Lattice& lat, Involution which);

}  // namespace fermicurve
