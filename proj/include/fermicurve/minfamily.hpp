#pragma once
// Explicit minimizer families of the first integral: the genus-zero minimal
// curves of a lattice, the genus-one family built from Weierstrass functions
// on rectangles, the curve with disconnected normalization, and the per-class
// lower bound over conformal classes assembled from half-period sublattices.

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fermicurve/common.hpp"
#include "fermicurve/elliptic.hpp"
#include "fermicurve/lattice.hpp"

namespace fermicurve {

// Genus-zero minimal curve g(k,k) = g(kappa*,kappa*)/4 where kappa* is a
// shortest nonzero dual vector. Ties (several shortest vectors) are all
// reported, one representative per +- pair, sorted lexicographically.
struct Genus0MinCurve {
  double constant = 0.0;  // g(kappa*, kappa*)/4
  double willmore = 0.0;  // 4 pi^2 vol(lattice) * constant
  std::vector<std::array<int, 2>> minimizers;
};
Genus0MinCurve genus0_min_curve(const Lattice& L);

// A point of the genus-one family: a rectangle with half-periods
// (omega real > 0, omega'/omega positive imaginary), a marked point z1 on the
// vertical segment omega/2 + omega'*[-1,1] (mod 2 omega'), odd labels
// Hhat/Ccheck and an integer shift N. alpha and beta are derived by
// genus1_family_point.
struct Genus1Point {
  EllipticData elliptic;
  cplx z1;
  int Hhat = 1;
  int Ccheck = 1;
  int N = 0;
  cplx alpha{};
  cplx beta{};
};

// Canonical construction: half-periods (1/2, i t/2) and z1 = omega/2 + s omega'
// with s in [-1, 1]. Throws std::invalid_argument for t <= 0, |s| > 1, or even
// labels.
Genus1Point genus1_point(double t, double s = 0.0, int Hhat = 1, int Ccheck = 1,
                         int N = 0);

struct Genus1Result {
  cplx tau_chart;           // modulus in the family chart (includes the shift N)
  cplx tau;                 // reduced to the fundamental domain
  SL2Word word;             // reduction word recording the shift
  double willmore = 0.0;    // first integral, positive
  bool minimizing = false;  // labels equal (1, 1, 0)
};

// Evaluates the family displays at p, filling p.alpha / p.beta. Throws
// std::domain_error when z1 degenerates a coefficient (zero of the derivative
// of the Weierstrass function other than the intended half-period limits) and
// std::invalid_argument when z1 leaves the vertical segment.
Genus1Result genus1_family_point(Genus1Point& p);

// W(t) at z1 = omega/2 in closed form from theta constants. theta_terms <= 0
// evaluates the q-series to machine precision; theta_terms > 0 truncates every
// theta sum to exactly that many terms.
double genus1_closed_form_w(double t, int theta_terms = 0);

// (W(t) - pi^2) / pi^2 at z1 = omega/2, computed without forming the
// near-cancelling limit terms, so the tail stays resolvable far below the
// rounding floor of W itself (the excess decays like 4 exp(-2 pi t)).
double genus1_w_excess(double t);

struct SweepRow {
  double t = 0.0;
  double willmore = 0.0;
  double excess = 0.0;  // (W - pi^2)/pi^2
};

// Evaluates W on an increasing grid of aspect ratios at z1 = omega/2 and
// verifies strict decrease (compared on the excess, which stays resolvable
// when W itself rounds to pi^2). Throws std::runtime_error naming the
// offending pair on a violation.
std::vector<SweepRow> monotone_sweep(const std::vector<double>& t_grid);

// The curve whose normalization has two components, realized over the dual of
// L: closures for the two quasi-momentum coordinates, their values at the
// three half-periods (reduced mod 1 into [-1/2, 1/2)), and the first integral
// carried by each sheet.
struct DisconnectedCurve {
  std::function<cplx(cplx)> xp, yp;
  std::array<std::array<double, 2>, 3> half_period_table{};  // at w, w', w+w'
  double willmore_per_sheet = 0.0;                           // 4 pi
};
DisconnectedCurve disconnected_curve_functions(const Lattice& L);

// Lower bound of the first integral on a conformal class, per half-period
// class. A class whose constrained minimizer is not reachable by the genus
// <= 1 families (geometric genus two) carries NaN and route "genus2".
struct ClassBound {
  std::array<int, 2> cls{};
  double willmore = std::numeric_limits<double>::quiet_NaN();
  std::string route = "genus2";  // "genus0", "genus1", "degenerate", "genus2"
};

struct BoundPoint {
  cplx tau;
  std::array<ClassBound, 3> classes{};  // order (1,0), (0,1), (1,1)
  double w_min = std::numeric_limits<double>::quiet_NaN();
};

// tau must lie in the fundamental domain (|Re| <= 1/2, |tau| >= 1). Throws
// std::runtime_error when no class is reachable by the genus <= 1 families or
// when a family root find stalls (residuals reported in the message).
BoundPoint wbound_of_tau(cplx tau);

}  // namespace fermicurve
