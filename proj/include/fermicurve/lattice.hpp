#pragma once
// Planar lattices, dual bases, modular reduction, half-period sublattices,
// and the modulus map for the three half-period classes.

#include "fermicurve/common.hpp"

#include <array>
#include <optional>

namespace fermicurve {

// A positively oriented lattice with its dual basis: g(kappa_i, gamma_j) = delta_ij.
struct Lattice {
  Vec2 gamma1, gamma2;  // primal basis
  Vec2 kappa1, kappa2;  // dual basis
  double vol = 0;       // area of the fundamental domain
  bool swapped = false; // true if the input basis was negatively oriented
};

// Builds a Lattice from a basis; swaps the generators (recording it) when the
// input is negatively oriented. Throws std::invalid_argument when degenerate.
Lattice make_lattice(const Vec2& g1, const Vec2& g2);

// Integer combination n1*kappa1 + n2*kappa2 of the dual basis.
inline Vec2 dual_vec(const Lattice& L, int n1, int n2) {
  return n1 * L.kappa1 + n2 * L.kappa2;
}

// All dual lattice vectors with squared norm <= bound, as integer coordinates.
std::vector<std::array<int, 2>> dual_range(const Lattice& L, double norm2_bound);

// Modulus of the lattice: ratio of the generators as complex numbers.
cplx tau_raw(const Lattice& L);

// Word in the modular group, stored in order of application.
struct SL2Word {
  enum Letter { S, T, Ti };
  std::vector<Letter> letters;
  // Accumulated integer matrix [[a,b],[c,d]] with tau_out = (a tau + b)/(c tau + d).
  long long a = 1, b = 0, c = 0, d = 1;

  void push(Letter l);
  cplx apply(cplx tau) const;
  std::string str() const;  // e.g. "T^-5 S", "id"
};

struct ReducedTau {
  cplx tau;      // representative with -1/2 < Re <= 1/2, |tau| >= 1 (canonical boundary)
  SL2Word word;  // word taking the input to the representative
};

// Reduces a modulus to the fundamental domain of the modular group.
ReducedTau reduce_to_fundamental(cplx tau);

// True when two moduli are related by the modular group (both reduced, compared within tol).
bool tau_equivalent(cplx t1, cplx t2, double tol = 1e-10);

// The index-two sublattice associated with the half-period class
// c1*kappa1 + c2*kappa2 (mod 2) of the dual lattice: its dual is
// Z*(c1 kappa1 + c2 kappa2) + 2 * (dual of L). Throws if c is trivial (both even).
Lattice half_period_sublattice(const Lattice& L, std::array<int, 2> c);

// Result of the modulus map tau -> tau' for one case of the piecewise map.
struct TauMapResult {
  cplx tau_prime;                          // modulus of the sublattice
  std::array<std::string, 2> preimages;    // half-period classes of the sublattice
  int genus = 2;                           // 0, 1, or 2
  std::string case_id;
};

// Piecewise modulus map for the half-period classes. `c` selects the class
// ((1,0), (0,1) or (1,1) mod 2), `case_id` one of "1a".."1d", "2a".."2c",
// "3a".."3f". Throws std::domain_error when tau lies outside the case domain
// or the case does not belong to the class of c.
TauMapResult tau_sublattice_map(cplx tau, std::array<int, 2> c, const std::string& case_id);

// All case ids whose domain contains tau for the class of c (boundaries overlap).
std::vector<std::string> tau_cases_of(cplx tau, std::array<int, 2> c);

// The two double points of the free spectrum attached to a dual vector kappa.
struct DoublePoints {
  CVec2 kminus, kplus;  // kplus = kminus + kappa
};
DoublePoints free_double_points(const Vec2& kappa);

// The three anti-/holomorphic involutions of the momentum plane.
inline CVec2 sigma_k(const CVec2& k) { return -k; }
inline CVec2 rho_k(const CVec2& k) { return {std::conj(k.x), std::conj(k.y)}; }
inline CVec2 eta_k(const CVec2& k) { return {-std::conj(k.x), -std::conj(k.y)}; }

}  // namespace fermicurve
