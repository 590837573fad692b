#pragma once

#include <array>
#include <utility>
#include <vector>

#include "fermicurve/dirac.hpp"

namespace fermicurve {

// ---------------------------------------------------------------------------
// Branch tracing over x-p paths.
// ---------------------------------------------------------------------------

// One traced sheet of the curve over a path in the x-p coordinate.  Samples
// include any refinement points inserted by the tracer.  `match_dist[i]` is
// the distance between the predicted and the matched eigenvalue at sample i
// (0 for the seed); `gap[i]` is the distance from the matched value to the
// nearest other eigenvalue of the same slice.  Acceptance of a step requires
// match_dist < gap / 2.
struct FermiBranch {
  std::vector<cplx> xp;
  std::vector<cplx> yp;
  std::vector<double> match_dist;
  std::vector<double> gap;
  bool closed = false;  // path endpoints coincide and the sheet value returned to 1e-8
};

// Path helpers: inclusive segment with n subintervals (n+1 points), and a
// closed circle with n subintervals whose last point equals the first.
std::vector<cplx> xp_segment(cplx a, cplx b, int n);
std::vector<cplx> xp_circle(cplx center, double radius, int n);

// Follow the eigenvalue sheet of the sheared operator starting from the
// eigenvalue nearest seed_yp at xp_path.front().  Nearest-eigenvalue matching
// with a linear-extrapolation predictor; ambiguous matches trigger step
// halving; persistent ambiguity throws std::runtime_error naming the x-p
// location of the collision.
FermiBranch trace_branch(const FourierPotential& pot, const Lattice& lat,
                         const std::vector<cplx>& xp_path, cplx seed_yp, int K);

// ---------------------------------------------------------------------------
// Handle moduli.
// ---------------------------------------------------------------------------

// Modulus t of the handle indexed by kappa (integer coordinates in the dual
// basis).  t = pi * contour integral of k1 dk2 over the cycle that encircles
// both branch points of the handle on one sheet.  `orientation` is -1 when
// the raw contour value was negated to meet the positivity convention for
// conjugate-symmetric pairs; `refine_delta` is the |t(2N) - t(N)| quadrature
// certificate from doubling the contour sampling.
struct HandleModulus {
  std::array<int, 2> kappa{};
  CVec2 center{};          // conj(k+_kappa), where the handle opens
  cplx xp_center{};        // refined midpoint of the branch-point pair in x-p
  double separation = 0.0; // fitted branch-point separation in x-p
  cplx t_value{};
  int orientation = 1;
  double refine_delta = 0.0;
};

// Locates the branch-point pair of the kappa-handle by a quadratic fit of the
// squared sheet separation, then integrates over a circle of radius 3x the
// branch-point separation with `samples` points (doubled once for the
// quadrature certificate).  A vanishing fitted separation (double point or
// zero potential) yields t = 0.  Throws std::runtime_error when the handle
// cycle cannot be isolated (sheet matching collision or monodromy across the
// contour).
HandleModulus handle_modulus(const FourierPotential& pot, const Lattice& lat,
                             std::array<int, 2> kappa, int K, int samples = 256);

// ---------------------------------------------------------------------------
// Willmore evaluations.
// ---------------------------------------------------------------------------

// 4 * vol * sum_kappa Vhat(kappa) * What(-kappa)  (Parseval form of
// 4 * integral of V W over the torus).  Real for conjugate-symmetric pairs.
cplx willmore_pairing(const FourierPotential& pot, const Lattice& lat);

struct ResidueFit {
  cplx W{};            // 8 * pi^2 * vol * c
  cplx c{};            // fitted coefficient of k2 = i*(k1 - c/k1)
  double residual = 0; // rms misfit of k2 - i*k1 against -i*c/k1
  int n_samples = 0;
};

// Least-squares fit of c in the sheet asymptotics k2 = i*(k1 - c/k1) sampled
// on the sheet with k2/k1 -> +i.  fit_range = {lo, hi} bounds |k1| in
// dual-lattice units; {0, 0} selects the default [K/2, 3K/4].  Samples both
// signs of k1 (the odd model cancels even contamination).  Throws
// std::runtime_error when the rms residual exceeds 1e-4 (range too small or
// cutoff too low).
ResidueFit willmore_residue_fit(const FourierPotential& pot, const Lattice& lat, int K,
                                std::pair<double, double> fit_range = {0.0, 0.0});

// ---------------------------------------------------------------------------
// Analytic reference curve for one-mode pairs.
// ---------------------------------------------------------------------------

// min over kappa' in the integer window [-window, window]^2 of
// |pi^2 g(k + k+_kappa + kappa', same) - u*conj(u)|.  Zero exactly on the
// curve of the pair (u e_kappa, conj(u) e_{-kappa}); the window-minimum is
// symmetric under the reflection k -> -k - 2 k+_kappa through the double
// point -k+_kappa.
double analytic_single_mode_curve(cplx u, std::array<int, 2> kappa, const Lattice& lat,
                                  const CVec2& k, int window = 8);

// ---------------------------------------------------------------------------
// Half-period singularity report.
// ---------------------------------------------------------------------------

// Orbit of the sheet set at a half-period point under the involutions
// k -> -k and k -> conj(k).  type 1: two fixed points of the conjugation
// swapped by the negation; type 2: two fixed points of the negation swapped
// by the conjugation; type 3: four points with no fixed point of either.
// type 0 marks an orbit that fits none of the three patterns (or a potential
// class where only the combined involution k -> -conj(k) acts).
struct SingularOrbit {
  int type = 0;
  std::vector<int> members;  // sheet indices into dyp_dxp / cusp
};

struct WeakSingularityReport {
  std::array<int, 2> half_class{};
  cplx xp0{}, yp0{};          // slice coordinates of the half-period point
  bool on_curve = false;
  int multiplicity = 0;       // sheets through the point at the central representative
  bool ambiguous = false;     // eigenvalues in the threshold band [1e-7, 1e-4)
  std::vector<cplx> dyp_dxp;  // fitted sheet slope per sheet
  std::vector<bool> cusp;     // both one-sided slope magnitudes below 1e-6
  std::vector<SingularOrbit> orbits;
};

// Evaluates the sheared-operator spectrum at x-p = c1/2, collects eigenvalues
// matching y-p = c2/2 mod Z at the central representative, counts the sheet
// multiplicity, fits per-sheet slopes and curvatures from samples at
// +-h, +-h/2, and classifies the involution orbits (full taxonomy for
// potentials with W = V and conjugation-symmetric coefficients; orbits under
// the combined involution alone otherwise).
WeakSingularityReport weak_singularity_report(const FourierPotential& pot, const Lattice& lat,
                                              std::array<int, 2> c, int K);

}  // namespace fermicurve
