#pragma once
// Periodicity combinations of kernel spinors at half dual-lattice momenta,
// spectral integration of the induced one-form into a torus immersion, and
// quadrature of conformality and of the mean-curvature energy.

#include "fermicurve/common.hpp"
#include "fermicurve/dirac.hpp"
#include "fermicurve/lattice.hpp"

#include <array>
#include <string>
#include <vector>

namespace fermicurve {

// Combination chi = z1 psi_a + z2 tau(psi_a) + z3 psi_b + z4 tau(psi_b) whose
// three one-form periods vanish, where tau(psi) = (-conj(psi2), conj(psi1)) is
// the antilinear pairing mapping each kernel element to its orbit partner.
struct PeriodicityCombination {
  KernelSpinor chi;                      // z1 = 1 normalization
  std::array<double, 3> residuals{};     // worst-case one-form periods of chi
  int family_dim = 0;                    // complex dimension of the solution family
  std::array<cplx, 4> z{};               // weights in the normalized orbit basis
  std::string branch;                    // "degenerate", "equal-slope", "conjugate-slope"
  cplx alpha = 0, beta = 0;              // slopes of the two combined orbits
};

// Solves the four bilinear period equations for a combination of kernel
// elements at a real momentum k with 2k in the dual lattice.
//
// The kernel list is arranged as consecutive orbit pairs: elements (2o, 2o+1)
// span orbit o and slopes[o] is the curve slope d y-p / d x-p at that orbit.
// Only the first element of each pair is read; its partner is regenerated as
// tau(psi) so the pair structure is exact.  When every period pairing already
// vanishes on the whole kernel (a double point), any combination works and the
// first element is returned with the full family dimension.  Otherwise two
// orbits with equal or conjugate slopes are combined through the closed-form
// weights (z3, z4) = (i z1, -i z2) or (z3, z4) = (z2, -z1); if exactly two
// orbits exist and neither relation holds, no nontrivial combination exists
// and the solver throws "no Weierstrass potential in this gauge".
PeriodicityCombination solve_periodicity_combination(const std::vector<KernelSpinor>& kernel,
                                                     const std::vector<cplx>& slopes,
                                                     const Lattice& lat);

// Sampled torus immersion X: R^2/Lambda -> R^3 on an n x n grid over the
// fundamental domain, node (i, j) at x = (i/n) gamma1 + (j/n) gamma2 stored at
// offset i*n + j.  The full map is the stored grid plus an affine part
// u * secular_u + v * secular_v in the lattice coordinates (u, v) = (i/n, j/n);
// spinor-generated immersions are closed and have zero secular part.
struct ImmersionGrid {
  int n = 0;
  Lattice lat;
  std::vector<double> x, y, z;           // components of X per node
  std::array<double, 3> closure{};       // one-form periods that generated X
  std::vector<double> density;           // |chi|^2 per node; empty disables masking
  std::array<double, 3> secular_u{};
  std::array<double, 3> secular_v{};
  CVec2 k{};                             // character momentum of the source spinor
};

// Integrates the one-form
//   (Re(chi1^2 dz - chi2^2 dzbar), Im(chi1^2 dz - chi2^2 dzbar),
//    chi1 conj(chi2) dz + conj(chi1) chi2 dzbar)
// spectrally: every nonzero mode is divided by its derivative symbol and the
// mean modes are exactly the periodicity integrals, which must vanish.
// Pinned at X(0) = 0.  Throws when a period exceeds 1e-8 (the map would close
// only on the universal cover).
ImmersionGrid immersion_from_spinor(const KernelSpinor& chi, const Lattice& lat, int n);

// Willmore energy: mean curvature from spectral first and second fundamental
// forms in the Euclidean coordinates, integrated with the trapezoid rule
// (exact for trigonometric polynomials).  Throws on degenerate metric cells.
double willmore_quadrature(const ImmersionGrid& g);

// max over unmasked nodes of |E - G| / (E + G) and |F| / (E + G) for the first
// fundamental form in the Euclidean coordinates; nodes where the stored
// spinor density falls below 1e-10 of its maximum are masked.
double conformality_residual(const ImmersionGrid& g);

// Plain-text mesh: one "x y z" line per grid node, row-major.
void export_mesh(const ImmersionGrid& g, const std::string& path);

// Integral of |V|^2 over the fundamental domain (vol times the Parseval sum).
double potential_l2_sq(const FourierPotential& pot, const Lattice& lat);

}  // namespace fermicurve
