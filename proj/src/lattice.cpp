#include "fermicurve/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fermicurve {

Lattice make_lattice(const Vec2& g1, const Vec2& g2) {
  Vec2 a = g1, b = g2;
  double det = a.x * b.y - a.y * b.x;
  double scale = std::max({std::abs(a.x), std::abs(a.y), std::abs(b.x), std::abs(b.y)});
  if (scale == 0 || std::abs(det) < 1e-14 * scale * scale)
    throw std::invalid_argument("degenerate lattice basis");
  Lattice L;
  L.swapped = det < 0;
  if (L.swapped) {
    std::swap(a, b);
    det = -det;
  }
  L.gamma1 = a;
  L.gamma2 = b;
  L.vol = det;
  L.kappa1 = Vec2{b.y, -b.x} * (1.0 / det);
  L.kappa2 = Vec2{-a.y, a.x} * (1.0 / det);
  return L;
}

std::vector<std::array<int, 2>> dual_range(const Lattice& L, double norm2_bound) {
  // Conservative box: |n1|,|n2| <= bound/shortest projection. Use the primal
  // basis to bound integer coordinates: n_i = g(kappa, gamma_i).
  double r = std::sqrt(std::max(norm2_bound, 0.0));
  double l1 = std::sqrt(norm2(L.gamma1)), l2 = std::sqrt(norm2(L.gamma2));
  int m1 = static_cast<int>(std::floor(r * l1)) + 1;
  int m2 = static_cast<int>(std::floor(r * l2)) + 1;
  std::vector<std::array<int, 2>> out;
  for (int n1 = -m1; n1 <= m1; ++n1)
    for (int n2 = -m2; n2 <= m2; ++n2) {
      Vec2 k = dual_vec(L, n1, n2);
      if (norm2(k) <= norm2_bound + 1e-12) out.push_back({n1, n2});
    }
  std::sort(out.begin(), out.end(), [&](const auto& p, const auto& q) {
    double np = norm2(dual_vec(L, p[0], p[1])), nq = norm2(dual_vec(L, q[0], q[1]));
    if (np != nq) return np < nq;
    return p < q;
  });
  return out;
}

cplx tau_raw(const Lattice& L) {
  return cplx(L.gamma2.x, L.gamma2.y) / cplx(L.gamma1.x, L.gamma1.y);
}

void SL2Word::push(Letter l) {
  letters.push_back(l);
  long long na, nb, nc, nd;
  switch (l) {
    case S:  na = 0; nb = -1; nc = 1; nd = 0; break;
    case T:  na = 1; nb = 1;  nc = 0; nd = 1; break;
    default: na = 1; nb = -1; nc = 0; nd = 1; break;  // Ti
  }
  // New letter acts after the stored word: M_new = L * M.
  long long ra = na * a + nb * c, rb = na * b + nb * d;
  long long rc = nc * a + nd * c, rd = nc * b + nd * d;
  a = ra; b = rb; c = rc; d = rd;
}

cplx SL2Word::apply(cplx tau) const {
  return (static_cast<double>(a) * tau + static_cast<double>(b)) /
         (static_cast<double>(c) * tau + static_cast<double>(d));
}

std::string SL2Word::str() const {
  if (letters.empty()) return "id";
  std::ostringstream os;
  size_t i = 0;
  bool first = true;
  while (i < letters.size()) {
    if (letters[i] == S) {
      os << (first ? "" : " ") << "S";
      ++i;
    } else {
      Letter l = letters[i];
      size_t j = i;
      while (j < letters.size() && letters[j] == l) ++j;
      long long n = static_cast<long long>(j - i) * (l == T ? 1 : -1);
      os << (first ? "" : " ") << "T";
      if (n != 1) os << "^" << n;
      i = j;
    }
    first = false;
  }
  return os.str();
}

ReducedTau reduce_to_fundamental(cplx tau) {
  if (!(tau.imag() > 0)) throw std::invalid_argument("modulus must have positive imaginary part");
  ReducedTau r;
  r.tau = tau;
  constexpr double eps = 1e-13;
  for (int iter = 0; iter < 10000; ++iter) {
    // Shift the real part into (-1/2, 1/2].
    double n = std::ceil(r.tau.real() - 0.5 - eps);
    if (n != 0) {
      auto l = n > 0 ? SL2Word::Ti : SL2Word::T;
      for (long long i = 0; i < std::llabs(static_cast<long long>(n)); ++i) r.word.push(l);
      r.tau -= n;
    }
    if (std::norm(r.tau) < 1.0 - eps) {
      r.word.push(SL2Word::S);
      r.tau = -1.0 / r.tau;
    } else {
      break;
    }
  }
  // Canonical boundary representative: |tau| = 1 with Re < 0 maps to Re > 0,
  // and Re = -1/2 maps to Re = +1/2.
  if (std::abs(std::norm(r.tau) - 1.0) < 10 * eps && r.tau.real() < -eps) {
    r.word.push(SL2Word::S);
    r.tau = -1.0 / r.tau;
  }
  if (std::abs(r.tau.real() + 0.5) < 10 * eps) {
    r.word.push(SL2Word::T);
    r.tau += 1.0;
  }
  return r;
}

bool tau_equivalent(cplx t1, cplx t2, double tol) {
  cplx r1 = reduce_to_fundamental(t1).tau;
  cplx r2 = reduce_to_fundamental(t2).tau;
  if (std::abs(r1 - r2) <= tol) return true;
  // Boundary identifications can still separate representatives within tol.
  if (std::abs(r1 - r2 - 1.0) <= tol || std::abs(r1 - r2 + 1.0) <= tol) return true;
  if (std::abs(r1 + 1.0 / r2) <= tol || std::abs(r2 + 1.0 / r1) <= tol) return true;
  return false;
}

Lattice half_period_sublattice(const Lattice& L, std::array<int, 2> c) {
  int c1 = ((c[0] % 2) + 2) % 2, c2 = ((c[1] % 2) + 2) % 2;
  if (c1 == 0 && c2 == 0)
    throw std::invalid_argument("half-period class must be nontrivial (c not both even)");
  // Reduce to a primitive odd representative of the class.
  // Pick integers (e1, e2) with c1*e2 - c2*e1 = 1.
  int e1, e2;
  if (c1 == 1 && c2 == 0) { e1 = 0; e2 = 1; }
  else if (c1 == 0 && c2 == 1) { e1 = -1; e2 = 0; }
  else { e1 = 0; e2 = 1; }  // c = (1,1): 1*1 - 1*0 = 1
  // Dual of the sublattice: spanned by u = c1 k1 + c2 k2 and v = 2(e1 k1 + e2 k2).
  Vec2 u = dual_vec(L, c1, c2);
  Vec2 v = 2.0 * dual_vec(L, e1, e2);
  // Primal basis dual to (u, v): columns of the inverse of rows-[u; v].
  double det = u.x * v.y - u.y * v.x;
  Vec2 p{v.y / det, -v.x / det};
  Vec2 q{-u.y / det, u.x / det};
  return make_lattice(p, q);
}

namespace {

struct CaseRow {
  const char* id;
  int cls;  // 1, 2, 3
  // Domain test returns +1 strictly inside, 0 on boundary (within tol), -1 outside.
  // tau' and the rest are computed by the handler.
};

constexpr double kDomTol = 1e-12;   // leniency for domain membership
constexpr double kRefTol = 1e-9;    // tolerance for the genus refinement equalities

int cmp(double lhs, double rhs) {  // -1: lhs < rhs, 0: equal within tol, +1: lhs > rhs
  double s = std::max(1.0, std::max(std::abs(lhs), std::abs(rhs)));
  if (std::abs(lhs - rhs) <= kDomTol * s) return 0;
  return lhs < rhs ? -1 : 1;
}

bool geq(double lhs, double rhs) { return cmp(lhs, rhs) >= 0; }
bool leq(double lhs, double rhs) { return cmp(lhs, rhs) <= 0; }
bool near(double lhs, double rhs) {
  return std::abs(lhs - rhs) <= kRefTol * std::max(1.0, std::abs(rhs));
}

const std::string A = "k1/2", B = "k2/2", C = "k1/2+k2/2";

}  // namespace

TauMapResult tau_sublattice_map(cplx tau, std::array<int, 2> c, const std::string& case_id) {
  if (!(tau.imag() > 0)) throw std::invalid_argument("modulus must have positive imaginary part");
  int c1 = ((c[0] % 2) + 2) % 2, c2 = ((c[1] % 2) + 2) % 2;
  int cls = c1 == 1 && c2 == 0 ? 1 : (c1 == 0 && c2 == 1 ? 2 : (c1 == 1 && c2 == 1 ? 3 : 0));
  if (cls == 0) throw std::invalid_argument("half-period class must be nontrivial");
  if (case_id.size() != 2 || case_id[0] - '0' != cls)
    throw std::domain_error("case id does not belong to the class of c");

  double re = tau.real();
  double ap2 = std::abs(tau + 2.0), am2 = std::abs(tau - 2.0), at = std::abs(tau);
  double ap1 = std::abs(tau + 1.0), am1 = std::abs(tau - 1.0);

  TauMapResult r;
  r.case_id = case_id;
  auto dom_err = [&]() { throw std::domain_error("tau outside the domain of case " + case_id); };

  if (case_id == "1a") {
    if (!geq(at, 2.0)) dom_err();
    r.tau_prime = tau / 2.0;
    r.preimages = {A, C};
    r.genus = 2;
  } else if (case_id == "1b") {
    if (!(leq(at, 2.0) && geq(ap2, 2.0) && geq(am2, 2.0))) dom_err();
    r.tau_prime = -2.0 / tau;
    r.preimages = {B, C};
    r.genus = (near(ap2, 2.0) || near(am2, 2.0)) ? 1 : 2;
  } else if (case_id == "1c") {
    if (!leq(ap2, 2.0)) dom_err();
    r.tau_prime = -2.0 / tau - 1.0;
    r.preimages = {A, B};
    r.genus = 1;
  } else if (case_id == "1d") {
    if (!leq(am2, 2.0)) dom_err();
    r.tau_prime = -2.0 / tau + 1.0;
    r.preimages = {A, B};
    r.genus = 1;
  } else if (case_id == "2a") {
    if (!leq(std::abs(re), 0.25)) dom_err();
    r.tau_prime = 2.0 * tau;
    r.preimages = {B, C};
    r.genus = near(std::abs(re), 0.25) ? 1 : 2;
  } else if (case_id == "2b") {
    if (!leq(re, -0.25)) dom_err();
    r.tau_prime = 2.0 * tau + 1.0;
    r.preimages = {A, B};
    r.genus = 1;
  } else if (case_id == "2c") {
    if (!geq(re, 0.25)) dom_err();
    r.tau_prime = 2.0 * tau - 1.0;
    r.preimages = {A, B};
    r.genus = 1;
  } else if (case_id == "3a") {
    if (!(geq(ap1, 2.0) && geq(am1, 2.0) && leq(re, 0.0))) dom_err();
    r.tau_prime = (tau + 1.0) / 2.0;
    r.preimages = {A, C};
    r.genus = near(re, 0.0) ? 1 : 2;
  } else if (case_id == "3b") {
    if (!(geq(ap1, 2.0) && geq(am1, 2.0) && geq(re, 0.0))) dom_err();
    r.tau_prime = (tau - 1.0) / 2.0;
    r.preimages = {A, C};
    r.genus = near(re, 0.0) ? 1 : 2;
  } else if (case_id == "3c") {
    if (!(leq(ap1, 2.0) && geq(am1, 2.0))) dom_err();
    r.tau_prime = -2.0 / (tau + 1.0);
    r.preimages = {B, C};
    r.genus = near(am1, 2.0) ? 1 : 2;
  } else if (case_id == "3d") {
    if (!(geq(ap1, 2.0) && leq(am1, 2.0))) dom_err();
    r.tau_prime = -2.0 / (tau - 1.0);
    r.preimages = {B, C};
    r.genus = near(ap1, 2.0) ? 1 : 2;
  } else if (case_id == "3e") {
    if (!(leq(ap1, 2.0) && leq(am1, 2.0) && leq(re, 0.0))) dom_err();
    r.tau_prime = (tau - 1.0) / (tau + 1.0);
    r.preimages = {A, B};
    r.genus = near(re, 0.0) ? 0 : 1;
  } else if (case_id == "3f") {
    if (!(leq(ap1, 2.0) && leq(am1, 2.0) && geq(re, 0.0))) dom_err();
    r.tau_prime = -(tau + 1.0) / (tau - 1.0);
    r.preimages = {A, B};
    r.genus = near(re, 0.0) ? 0 : 1;
  } else {
    throw std::domain_error("unknown case id: " + case_id);
  }
  return r;
}

std::vector<std::string> tau_cases_of(cplx tau, std::array<int, 2> c) {
  static const char* kIds[] = {"1a", "1b", "1c", "1d", "2a", "2b", "2c",
                               "3a", "3b", "3c", "3d", "3e", "3f"};
  std::vector<std::string> out;
  for (const char* id : kIds) {
    try {
      tau_sublattice_map(tau, c, id);
      out.push_back(id);
    } catch (const std::domain_error&) {
    }
  }
  return out;
}

DoublePoints free_double_points(const Vec2& kappa) {
  DoublePoints d;
  d.kminus = CVec2{cplx(-kappa.x / 2, -kappa.y / 2), cplx(-kappa.y / 2, kappa.x / 2)};
  d.kplus = d.kminus + CVec2{kappa.x, kappa.y};
  return d;
}

}  // namespace fermicurve
