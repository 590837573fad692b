#pragma once
// Weierstrass elliptic functions (p, p', zeta), quasi-periods, half-period
// values, and the lattice-normalized theta function. All evaluation goes
// through the odd Jacobi theta q-series with argument reduction.

#include "fermicurve/common.hpp"
#include "fermicurve/lattice.hpp"

namespace fermicurve {

struct EllipticData {
  cplx omega, omega_prime;  // half-periods, Im(omega_prime/omega) > 0
  cplx eta, eta_prime;      // zeta(omega), zeta(omega_prime)
  cplx e1, e2, e3;          // p at omega, omega+omega', omega'
  cplx g2, g3;              // cubic invariants

  // Internal: modularly reduced basis of the same lattice used for series
  // evaluation (kept well-conditioned), with its quasi-periods.
  cplx omega_t, omegap_t, tau_t, eta_t, etap_t;
};

// Builds the full elliptic dataset from half-periods. Throws when
// Im(omega_prime/omega) <= 0 or the basis is degenerate.
EllipticData elliptic_from_periods(cplx omega, cplx omega_prime);

struct WpValues {
  cplx p, pp, zeta;  // p(z), p'(z), zeta(z)
};

// Evaluates p, p', zeta at z. Throws std::domain_error within 1e-12 of a
// lattice point (relative to the period scale).
WpValues wp_eval(const EllipticData& d, cplx z);

// Distance from z to the nearest lattice point (callers stay above 1e-6 of
// the period scale for full accuracy).
double pole_distance(const EllipticData& d, cplx z);

// Quasi-period eta computed from the weight-two divisor (Lambert) series
// instead of the theta logarithmic derivative; independent cross-check.
cplx eta_from_eisenstein(const EllipticData& d);

// Theta parameters for a planar lattice: lambda1 = gamma1 as a complex
// number, modulus = lambda2/lambda1.
struct ThetaParams {
  cplx lambda1, lambda2, tau;
};
ThetaParams theta_params(const Lattice& L);

// Odd normalized theta function of the lattice: entire, odd, simple zeros on
// the complexified lattice, theta(z) = z + O(z^3), and
// theta(z + lambda1) = -theta(z),
// theta(z + lambda2) = -exp(-pi i (2z + lambda2)/lambda1) theta(z).
cplx theta_delta_eval(const ThetaParams& p, cplx z);

// theta'/theta (logarithmic derivative) of the same function.
cplx theta_delta_logderiv(const ThetaParams& p, cplx z);

// Values of -p'/(p - e1) at +omega/2, -omega/2, +omega/2+omega',
// -omega/2+omega' in that order, via closed forms in e1, e2, e3 with the
// square-root branch matched to direct evaluation. Rectangular lattices only
// (omega real, omega'/omega positive imaginary); throws otherwise.
std::array<cplx, 4> half_period_map_values(const EllipticData& d);

// Raw theta series: theta1 and derivatives w.r.t. u up to order 3 at nome q.
struct Theta1Values {
  cplx t0, t1, t2, t3;
};
Theta1Values theta1_all(cplx u, cplx q);

}  // namespace fermicurve
