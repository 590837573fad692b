#pragma once
// Forward Bäcklund transformation of potentials and kernel spinors, plus the
// slice-level verification that the transformed pair carries the same curve.

#include "fermicurve/dirac.hpp"
#include "fermicurve/fermi.hpp"

#include <optional>
#include <vector>

namespace fermicurve {

// A spinor sampled on the uniform n x n grid x = (i/n) gamma1 + (j/n) gamma2
// (row-major, index i*n + j), character included in the stored values. When
// built from a kernel spinor the modal representation is kept so derivatives
// are spectral and exact; otherwise derivatives fall back to the fast Fourier
// transform of the periodic part.
struct GridSpinor {
  int n = 0;
  CVec2 k;
  std::vector<cplx> c1, c2;
  double margin = 0.0;   // min over the grid of sqrt(|c1|^2 + |c2|^2)
  double amp_max = 0.0;  // max of the same quantity
  std::optional<KernelSpinor> modal;
};

// Samples a kernel spinor on the grid. n must be a power of two and large
// enough to hold the modal band (n >= 4K + 4).
GridSpinor grid_spinor(const KernelSpinor& s, const Lattice& lat, int n = 64);

// Derivative of one component (comp = 1 or 2) of the spinor: d/dz when
// bar == false, d/dzbar when bar == true, returned on the same grid.
std::vector<cplx> component_derivative(const GridSpinor& s, const Lattice& lat, int comp,
                                       bool bar);

// Relative residual of s against D(V, W, k) with the potential evaluated on
// the grid: ||D s||_2 / (||s||_2 * scale) with scale the symbol bound of the
// operator over the occupied band.
double dirac_residual(const FourierPotential& pot, const Lattice& lat, const GridSpinor& s);

struct BacklundPotential {
  FourierPotential potential;  // transformed pair, eta-closure, truncated
  double tail_mass = 0.0;      // relative l2 mass of the discarded modes
  double kernel_residual = 0.0;
  int cutoff = 0;
};

// Transformed potential U' = ((dbar chi2) conj(chi1) - chi2 dbar(conj(chi1)))
// / (|chi1|^2 + |chi2|^2), transformed back to Fourier coefficients and
// truncated at `cutoff`. Throws std::invalid_argument when chi vanishes
// somewhere on the grid (margin below 1e-6 of the amplitude) and
// std::runtime_error when chi fails the kernel residual gate 1e-7.
BacklundPotential backlund_potential(const FourierPotential& pot, const Lattice& lat,
                                     const GridSpinor& chi, int cutoff);

// Transformed spinor psi' = (d/dz + a, b; c, d/dzbar + d) psi with the
// coefficient functions generated by chi. Same validation as the potential
// transform on chi; psi is differentiated spectrally.
GridSpinor backlund_spinor(const GridSpinor& psi, const GridSpinor& chi, const Lattice& lat);

struct InvarianceReport {
  std::vector<cplx> xp;
  std::vector<double> dist;  // symmetric Hausdorff distance per slice
  double max_dist = 0.0;
  bool pass = false;  // max_dist <= 1e-4
};

// Compares the Fermi slices of two potentials at the given x-p positions.
// Throws std::runtime_error when a slice yields mismatched eigenvalue counts.
InvarianceReport invariance_check(const FourierPotential& a, const FourierPotential& b,
                                  const Lattice& lat, const std::vector<cplx>& slices, int K);

// Restricted inverse transformation, generated by a spinor in the kernel of
// the transposed operator.  It is available only where the closed-path
// integrals entering the spinor formula have closed forms: constant
// potentials and single-mode spinors.
struct InverseBacklund {
  FourierPotential potential;  // the recovered constant potential
  CVec2 k;                     // quasi-momentum of the generating spinor
  cplx b;                      // its second component (first normalized to 1)
};

// Generating spinor phi = (1, b') e_{-k'} in the kernel of the transposed
// operator at a real point k' of the curve of the constant potential `pot`;
// returns the transformed constant potential.  Applied to the output of
// backlund_potential at the same k', it recovers the original potential.
InverseBacklund inverse_backlund_constant(const FourierPotential& pot, const Lattice& lat,
                                          const Vec2& kprime);

// Transform of a single-mode kernel spinor psi of D(pot, k_psi) under the
// inverse transformation generated at k'.  The closed path is
// gamma = c1*gamma1 + c2*gamma2; the two quotients of path integrals by
// character denominators reduce to rational expressions in the
// quasi-momenta.  The result is a single-mode spinor in the kernel of the
// transformed operator at k_psi (any nonzero gamma gives the same spinor up
// to scale).
KernelSpinor inverse_backlund_spinor(const FourierPotential& pot, const Lattice& lat,
                                     const Vec2& kprime, const KernelSpinor& psi, int c1, int c2);

}  // namespace fermicurve
