#include "fermicurve/minfamily.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace fermicurve {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Genus-one family chart: rectangle with half-periods (1/2, i t/2), marked
// point z1 on the vertical segment through omega/2.

EllipticData chart_elliptic(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("aspect ratio t must be positive");
  return elliptic_from_periods(cplx(0.5, 0.0), cplx(0.0, 0.5 * t));
}

struct FamilyEval {
  cplx alpha, beta;     // display coefficients (beta kept complex for checks)
  double re_tau = 0.0;  // Re of the chart modulus (= Re beta)
  double im_tau = 0.0;
  double willmore = 0.0;
  bool flipped = false;  // alpha sign adjusted to keep the energy positive
};

// Evaluates the family displays at (data, z1) for labels (Hhat, Ccheck, N):
//   x  = alpha (zeta(z) - zeta(z + omega) + eta),  alpha = -Hhat (p - e1)/p'
//   Re tau = -(Ccheck/(Hhat pi i)) (2 eta z1 - omega (zeta(z1)+zeta(z1+omega)-eta)) + N
//   Im tau = -(Ccheck omega/(2 Hhat pi)) p'(z1)/(p(z1) - e1)
//   W = 8 pi alpha Ccheck (eta + e1 omega)
FamilyEval family_eval(const EllipticData& d, cplx z1, int Hhat, int Ccheck, int N) {
  const cplx omega = d.omega;
  const double scale = std::abs(d.e1) + std::abs(d.e2) + std::abs(d.e3);
  if (pole_distance(d, z1) < 1e-9 * std::abs(omega))
    throw std::domain_error("z1 coincides with the puncture of the family");
  if (pole_distance(d, z1 + omega) < 1e-9 * std::abs(omega))
    throw std::domain_error(
        "z1 sits at a zero of the Weierstrass derivative where alpha degenerates");
  WpValues w1 = wp_eval(d, z1);
  WpValues w2 = wp_eval(d, z1 + omega);
  if (std::abs(w1.pp) < 1e-8 * std::pow(scale, 1.5))
    throw std::domain_error(
        "z1 sits at a zero of the Weierstrass derivative where alpha degenerates");
  const cplx f = -w1.pp / (w1.p - d.e1);
  cplx alpha = static_cast<double>(Hhat) / f;
  // The same coefficient through the zeta-form of the display; disagreement
  // flags an evaluation bug.
  const cplx alpha2 = static_cast<double>(Hhat) / (2.0 * (w1.zeta - w2.zeta + d.eta));
  if (std::abs(alpha - alpha2) > 1e-6 * (1.0 + std::abs(alpha)))
    throw std::runtime_error("family coefficient mismatch between representations");
  const cplx beta = -static_cast<double>(Ccheck) / (static_cast<double>(Hhat) * PI * I) *
                        (2.0 * d.eta * z1 - omega * (w1.zeta + w2.zeta - d.eta)) +
                    static_cast<double>(N);
  const cplx imtau =
      -(static_cast<double>(Ccheck) * omega / (2.0 * PI * static_cast<double>(Hhat))) *
      w1.pp / (w1.p - d.e1);
  cplx wil = 8.0 * PI * alpha * static_cast<double>(Ccheck) * (d.eta + d.e1 * omega);
  FamilyEval r;
  r.beta = beta;
  r.re_tau = beta.real();
  r.im_tau = imtau.real();
  double W = wil.real();
  if (W < 0.0) {
    alpha = -alpha;
    W = -W;
    r.flipped = true;
  }
  r.alpha = alpha;
  r.willmore = W;
  return r;
}

cplx chart_tau(const EllipticData& d, cplx z1) {
  FamilyEval ev = family_eval(d, z1, 1, 1, 0);
  return cplx(ev.re_tau, ev.im_tau);
}

// ---------------------------------------------------------------------------
// q-series pieces for the closed form at z1 = omega/2 (2 omega = 1, nome
// q = exp(-pi t)). Every sum is accumulated directly so the small-q tail
// never passes through a near-cancelling subtraction.

// 2 sum_{k>=1} (+-1)^k q^{k^2}: theta3 = 1 + gap(q, false), theta4 = 1 + gap(q, true).
double theta_gap_sum(double q, bool alternating) {
  double s = 0.0;
  for (int k = 1; k <= 400; ++k) {
    double term = 2.0 * std::pow(q, static_cast<double>(k) * k);
    if (alternating && (k % 2 == 1)) term = -term;
    s += term;
    if (std::abs(term) < 1e-18 * (1.0 + std::abs(s))) break;
  }
  return s;
}

// sum_{n>=1} sigma_1(n) x^n as the Lambert series sum n x^n/(1-x^n).
double sigma_lambert(double x) {
  double s = 0.0;
  double xn = x;
  for (int n = 1; n <= 4000; ++n) {
    double term = n * xn / (1.0 - xn);
    s += term;
    if (term < 1e-18 * (1.0 + s)) break;
    xn *= x;
  }
  return s;
}

// (theta3^2 - 1) + (theta4^2 - 1) = 8 sum_j q^{4 j^2} + gap3^2 + gap4^2; the
// odd powers of q cancel exactly, so they are never formed.
double theta_sq_sum_excess(double q, double gap3, double gap4) {
  double even = 0.0;
  for (int j = 1; j <= 200; ++j) {
    double term = 8.0 * std::pow(q, 4.0 * static_cast<double>(j) * j);
    even += term;
    if (term < 1e-18 * (1.0 + even)) break;
  }
  return even + gap3 * gap3 + gap4 * gap4;
}

double pow4(double v) { return v * v * v * v; }

}  // namespace

// ---------------------------------------------------------------------------

double genus1_w_excess(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("aspect ratio t must be positive");
  // W(t) = (2 pi^2/3) (E2(q^2) + theta3^4 + theta4^4) / (theta3^2 + theta4^2),
  // assembled as pi^2 (1 + excess) with every deviation from the large-t limit
  // summed directly.
  const double q = std::exp(-PI * t);
  const double x = q * q;
  const double g = theta_gap_sum(q, false);  // theta3 - 1
  const double h = theta_gap_sum(q, true);   // theta4 - 1
  const double u = 2.0 * g + g * g;          // theta3^2 - 1
  const double v = 2.0 * h + h * h;          // theta4^2 - 1
  const double upv = theta_sq_sum_excess(q, g, h);
  const double sig = sigma_lambert(x);  // E2(q^2) = 1 - 24 sig
  const double num = -48.0 * sig + upv + 2.0 * (u * u + v * v);
  const double den = 6.0 + 3.0 * upv;
  return num / den;
}

double genus1_closed_form_w(double t, int theta_terms) {
  if (!(t > 0.0)) throw std::invalid_argument("aspect ratio t must be positive");
  if (theta_terms <= 0) return PI * PI * (1.0 + genus1_w_excess(t));

  // Literal closed form from truncated theta constants: with 2 omega = 1,
  //   e1 = pi^2 (theta3^4 + theta4^4)/3,  e2 = pi^2 (theta2^4 - theta4^4)/3,
  //   e3 = -pi^2 (theta2^4 + theta3^4)/3, eta = -theta1'''(0)/(6 theta1'(0)),
  //   W = 4 pi (eta + e1/2) / sqrt(3 e1 + 2 sqrt(2 e1^2 + e2 e3)).
  const double q = std::exp(-PI * t);
  double t2 = 0.0, d1 = 0.0, d3 = 0.0;
  for (int k = 0; k < theta_terms; ++k) {
    const double w = 2.0 * k + 1.0;
    const double qk = std::pow(q, 0.25 * w * w);
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    t2 += 2.0 * qk;
    d1 += 2.0 * sgn * (w * PI) * qk;
    d3 -= 2.0 * sgn * (w * PI) * (w * PI) * (w * PI) * qk;
  }
  double t3 = 1.0, t4 = 1.0;
  for (int k = 1; k <= theta_terms; ++k) {
    const double qk = std::pow(q, static_cast<double>(k) * k);
    t3 += 2.0 * qk;
    t4 += 2.0 * ((k % 2 == 1) ? -1.0 : 1.0) * qk;
  }
  const double e1 = PI * PI * (pow4(t3) + pow4(t4)) / 3.0;
  const double e2 = PI * PI * (pow4(t2) - pow4(t4)) / 3.0;
  const double e3 = -PI * PI * (pow4(t2) + pow4(t3)) / 3.0;
  const double eta = -d3 / (6.0 * d1);
  const double sval = std::sqrt(2.0 * e1 * e1 + e2 * e3);
  return 4.0 * PI * (eta + 0.5 * e1) / std::sqrt(3.0 * e1 + 2.0 * sval);
}

std::vector<SweepRow> monotone_sweep(const std::vector<double>& t_grid) {
  if (t_grid.size() < 2) throw std::invalid_argument("sweep needs at least two grid points");
  std::vector<SweepRow> rows;
  rows.reserve(t_grid.size());
  for (size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) throw std::invalid_argument("sweep grid must be positive");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("sweep grid must be strictly increasing");
    SweepRow r;
    r.t = t_grid[i];
    r.excess = genus1_w_excess(r.t);
    r.willmore = PI * PI * (1.0 + r.excess);
    rows.push_back(r);
  }
  for (size_t i = 0; i + 1 < rows.size(); ++i) {
    if (!(rows[i + 1].excess < rows[i].excess)) {
      std::ostringstream os;
      os << "monotonicity violated between t = " << rows[i].t << " (W = " << rows[i].willmore
         << ") and t = " << rows[i + 1].t << " (W = " << rows[i + 1].willmore << ")";
      throw std::runtime_error(os.str());
    }
  }
  return rows;
}

Genus1Point genus1_point(double t, double s, int Hhat, int Ccheck, int N) {
  if (!(t > 0.0)) throw std::invalid_argument("aspect ratio t must be positive");
  if (!(s >= -1.0 - 1e-12 && s <= 1.0 + 1e-12))
    throw std::invalid_argument("marked-point parameter s must lie in [-1, 1]");
  if (((Hhat % 2) + 2) % 2 == 0 || ((Ccheck % 2) + 2) % 2 == 0)
    throw std::invalid_argument("labels Hhat and Ccheck must be odd");
  Genus1Point p;
  p.elliptic = chart_elliptic(t);
  p.z1 = 0.25 + cplx(0.0, 0.5 * t) * s;
  p.Hhat = Hhat;
  p.Ccheck = Ccheck;
  p.N = N;
  return p;
}

Genus1Result genus1_family_point(Genus1Point& p) {
  const EllipticData& d = p.elliptic;
  if (!(d.omega.real() > 0.0) || std::abs(d.omega.imag()) > 1e-12 * std::abs(d.omega))
    throw std::invalid_argument("omega must be real and positive");
  const cplx ratio = d.omega_prime / d.omega;
  if (!(ratio.imag() > 0.0) || std::abs(ratio.real()) > 1e-12)
    throw std::invalid_argument("omega'/omega must be positive imaginary");
  if (((p.Hhat % 2) + 2) % 2 == 0 || ((p.Ccheck % 2) + 2) % 2 == 0)
    throw std::invalid_argument("labels Hhat and Ccheck must be odd");
  // Degeneracy first, so coefficient blowups report the sharper error even for
  // off-segment points.
  FamilyEval ev = family_eval(d, p.z1, p.Hhat, p.Ccheck, p.N);
  const cplx seg = (p.z1 - 0.5 * d.omega) / d.omega_prime;
  if (std::abs(seg.imag()) > 1e-9 * (1.0 + std::abs(seg)))
    throw std::invalid_argument("z1 must lie on the segment omega/2 + omega' [-1, 1]");
  if (std::abs(ev.beta.imag()) > 1e-8 * (1.0 + std::abs(ev.beta)))
    throw std::invalid_argument("z1 off the segment: the modulus is not real");
  if (!(ev.im_tau > 0.0)) throw std::runtime_error("family point with nonpositive Im tau");
  p.alpha = ev.alpha;
  p.beta = ev.beta;
  Genus1Result out;
  out.tau_chart = cplx(ev.re_tau, ev.im_tau);
  ReducedTau rt = reduce_to_fundamental(out.tau_chart);
  out.tau = rt.tau;
  out.word = rt.word;
  out.willmore = ev.willmore;
  out.minimizing = (p.Hhat == 1 && p.Ccheck == 1 && p.N == 0);
  return out;
}

Genus0MinCurve genus0_min_curve(const Lattice& L) {
  const double start = std::min(norm2(L.kappa1), norm2(L.kappa2));
  auto cand = dual_range(L, start * (1.0 + 1e-9));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cand) {
    if (c[0] == 0 && c[1] == 0) continue;
    best = std::min(best, norm2(dual_vec(L, c[0], c[1])));
  }
  Genus0MinCurve out;
  for (const auto& c : cand) {
    if (c[0] == 0 && c[1] == 0) continue;
    if (norm2(dual_vec(L, c[0], c[1])) > best * (1.0 + 1e-9)) continue;
    if (c[0] < 0 || (c[0] == 0 && c[1] < 0)) continue;  // one per +- pair
    out.minimizers.push_back(c);
  }
  std::sort(out.minimizers.begin(), out.minimizers.end());
  out.constant = best / 4.0;
  out.willmore = 4.0 * PI * PI * L.vol * out.constant;
  return out;
}

DisconnectedCurve disconnected_curve_functions(const Lattice& L) {
  const cplx omega = 0.5 * cplx(L.kappa1.x, L.kappa1.y);
  const cplx omegap = 0.5 * cplx(L.kappa2.x, L.kappa2.y);
  const EllipticData d = elliptic_from_periods(omega, omegap);
  DisconnectedCurve out;
  out.xp = [d](cplx z) {
    WpValues w = wp_eval(d, z);
    return -I * (d.omega_prime * w.zeta - d.eta_prime * z) / PI;
  };
  out.yp = [d](cplx z) {
    WpValues w = wp_eval(d, z);
    return I * (d.omega * w.zeta - d.eta * z) / PI;
  };
  const std::array<cplx, 3> pts = {d.omega, d.omega_prime, d.omega + d.omega_prime};
  for (int i = 0; i < 3; ++i) {
    const cplx xv = out.xp(pts[i]);
    const cplx yv = out.yp(pts[i]);
    if (std::abs(xv.imag()) > 1e-9 || std::abs(yv.imag()) > 1e-9)
      throw std::runtime_error("half-period values of the split curve must be real");
    // Bias keeps values that are half-integers up to rounding on the -1/2 side
    // of the window [-1/2, 1/2).
    auto reduce = [](double v) { return v - std::floor(v + 0.5 + 1e-10); };
    out.half_period_table[i] = {reduce(xv.real()), reduce(yv.real())};
  }
  // First integral per sheet from the residue of the momentum pairing at the
  // puncture: 8 pi^2 i vol * Res(k2 dk1) = 8 i (eta' omega - eta omega').
  out.willmore_per_sheet =
      (8.0 * I * (d.eta_prime * d.omega - d.eta * d.omega_prime)).real();
  return out;
}

// ---------------------------------------------------------------------------
// Conformal-class lower bound.

namespace {

std::array<int, 2> class_of_label(const std::string& s) {
  if (s == "k1/2") return {1, 0};
  if (s == "k2/2") return {0, 1};
  return {1, 1};
}

// All family-chart moduli compatible with the ordered half-period classes
// (o1 for the marked-point orbit, o2 for the fixed-point orbit) on the
// sublattice marked by tau_prime: unimodular words whose dual action sends
// the chart classes onto (o1, o2) mod 2, restricted to the chart
// Re in [-1, 1], |tau| >= 1.
std::vector<cplx> chart_targets(cplx tau_prime, std::array<int, 2> o1,
                                std::array<int, 2> o2) {
  std::vector<cplx> out;
  auto par = [](int v) { return ((v % 2) + 2) % 2; };
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c)
        for (int dd = -3; dd <= 3; ++dd) {
          if (a * dd - b * c != 1) continue;
          if (par(dd) != o1[0] || par(b) != o1[1]) continue;
          if (par(c) != o2[0] || par(a) != o2[1]) continue;
          const cplx den = static_cast<double>(a) - static_cast<double>(c) * tau_prime;
          if (std::abs(den) < 1e-14) continue;
          const cplx t0 = (static_cast<double>(dd) * tau_prime - static_cast<double>(b)) / den;
          if (!(t0.imag() > 0.0)) continue;
          if (std::abs(t0.real()) > 1.0 + 1e-9) continue;
          if (std::abs(t0) < 1.0 - 1e-9) continue;
          bool dup = false;
          for (const cplx& v : out)
            if (std::abs(v - t0) < 1e-10) dup = true;
          if (!dup) out.push_back(t0);
        }
  return out;
}

struct FamilySolve {
  double t = 0.0, s = 0.0;
  double willmore = 0.0;
  cplx tau0;
};

// Locates the family point whose chart modulus equals target (Im > 1 region of
// the chart) by a coarse scan plus a damped Newton iteration on (log t, s).
FamilySolve solve_family_chart(cplx target) {
  const double lo = std::log(0.02), hi = std::log(60.0);
  double bt = 0.0, bs = 0.0, berr = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 40; ++i) {
    const double t = std::exp(lo + (hi - lo) * i / 40.0);
    EllipticData d = chart_elliptic(t);
    for (int j = 0; j <= 32; ++j) {
      const double s = -0.96 + 0.06 * j;
      const cplx z1 = 0.25 + cplx(0.0, 0.5 * t) * s;
      cplx v;
      try {
        v = chart_tau(d, z1);
      } catch (const std::exception&) {
        continue;
      }
      const double err = std::abs(v - target);
      if (err < berr) {
        berr = err;
        bt = std::log(t);
        bs = s;
      }
    }
  }
  auto eval = [](double logt, double s) {
    const double t = std::exp(logt);
    EllipticData d = chart_elliptic(t);
    return chart_tau(d, 0.25 + cplx(0.0, 0.5 * t) * s);
  };
  double xt = bt, xs = bs;
  cplx cur = eval(xt, xs);
  const double tol = 1e-9 * (1.0 + std::abs(target));
  for (int iter = 0; iter < 80 && std::abs(cur - target) > tol; ++iter) {
    const double h = 1e-6;
    const cplx d1 = (eval(xt + h, xs) - cur) / h;
    const cplx d2 = (eval(xt, std::min(0.999999, xs + h)) - cur) /
                    (std::min(0.999999, xs + h) - xs);
    // Solve the 2x2 real system J (dt, ds) = target - cur.
    const double a11 = d1.real(), a12 = d2.real(), a21 = d1.imag(), a22 = d2.imag();
    const double det = a11 * a22 - a12 * a21;
    if (std::abs(det) < 1e-14) break;
    const double r1 = (target - cur).real(), r2 = (target - cur).imag();
    double dt = (a22 * r1 - a12 * r2) / det;
    double ds = (-a21 * r1 + a11 * r2) / det;
    bool improved = false;
    for (int k = 0; k < 12; ++k) {
      const double f = std::ldexp(1.0, -k);
      double nt = std::clamp(xt + f * dt, std::log(1e-3), std::log(150.0));
      double ns = std::clamp(xs + f * ds, -0.999999, 0.999999);
      cplx nxt;
      try {
        nxt = eval(nt, ns);
      } catch (const std::exception&) {
        continue;
      }
      if (std::abs(nxt - target) < std::abs(cur - target)) {
        xt = nt;
        xs = ns;
        cur = nxt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (std::abs(cur - target) > tol) {
    std::ostringstream os;
    os << "family root find stalled: target tau = (" << target.real() << ", "
       << target.imag() << "), reached (" << cur.real() << ", " << cur.imag()
       << "), residual = " << std::abs(cur - target) << " at t = " << std::exp(xt)
       << ", s = " << xs;
    throw std::runtime_error(os.str());
  }
  FamilySolve out;
  out.t = std::exp(xt);
  out.s = xs;
  out.tau0 = cur;
  out.willmore = family_eval(chart_elliptic(out.t), 0.25 + cplx(0.0, 0.5 * out.t) * xs,
                             1, 1, 0)
                     .willmore;
  return out;
}

}  // namespace

BoundPoint wbound_of_tau(cplx tau) {
  if (!(tau.imag() > 0.0) || std::abs(tau.real()) > 0.5 + 1e-9 ||
      std::abs(tau) < 1.0 - 1e-9)
    throw std::invalid_argument("tau must lie in the fundamental domain");
  const std::array<std::array<int, 2>, 3> classes = {{{1, 0}, {0, 1}, {1, 1}}};
  BoundPoint bp;
  bp.tau = tau;
  for (int ci = 0; ci < 3; ++ci) {
    const std::array<int, 2> c = classes[ci];
    double best = std::numeric_limits<double>::infinity();
    std::string route = "genus2";
    for (const std::string& id : tau_cases_of(tau, c)) {
      TauMapResult r = tau_sublattice_map(tau, c, id);
      if (r.genus == 2) continue;
      if (r.genus == 0) {
        // Degenerate locus: the doubled-lattice minimal curve carries both
        // preimage classes as tied shortest dual vectors.
        Lattice Lt = make_lattice({1.0, 0.0}, {tau.real(), tau.imag()});
        Lattice S = half_period_sublattice(Lt, c);
        Genus0MinCurve g0 = genus0_min_curve(S);
        for (const auto& m : g0.minimizers) {
          Vec2 w = dual_vec(S, m[0], m[1]);
          const double a = gform(w, Lt.gamma1), b = gform(w, Lt.gamma2);
          const long ia = std::lround(a), ib = std::lround(b);
          if (std::abs(a - ia) > 1e-9 || std::abs(b - ib) > 1e-9 ||
              ((ia % 2 + 2) % 2) != c[0] || ((ib % 2 + 2) % 2) != c[1])
            throw std::runtime_error("minimal-curve class check failed on the sublattice");
        }
        if (g0.willmore < best) {
          best = g0.willmore;
          route = "genus0";
        }
        continue;
      }
      const std::array<int, 2> p0 = class_of_label(r.preimages[0]);
      const std::array<int, 2> p1 = class_of_label(r.preimages[1]);
      std::array<int, 2> o1{}, o2{};
      if (p0 == std::array<int, 2>{1, 1} || p1 == std::array<int, 2>{1, 1}) {
        o1 = {1, 1};
        o2 = (p0 == o1) ? p1 : p0;
      } else {
        o1 = {1, 0};
        o2 = {0, 1};
      }
      for (const cplx& t0 : chart_targets(r.tau_prime, o1, o2)) {
        double v;
        std::string vroute;
        if (std::abs(std::abs(t0) - 1.0) <= 1e-8) {
          // Nodal large-t limit of the family at an on-circle chart modulus.
          v = PI * PI / t0.imag();
          vroute = "degenerate";
        } else {
          v = solve_family_chart(t0).willmore;
          vroute = "genus1";
        }
        if (v < best) {
          best = v;
          route = vroute;
        }
      }
    }
    ClassBound cb;
    cb.cls = c;
    // Doubling: the index-two sublattice curve descends with twice the energy.
    // Values above 8 pi mean the constrained minimizer left the genus <= 1
    // families, so the class is reported unreachable.
    if (std::isfinite(best) && 2.0 * best <= 8.0 * PI + 1e-6) {
      cb.willmore = 2.0 * best;
      cb.route = route;
    }
    bp.classes[ci] = cb;
  }
  double wmin = std::numeric_limits<double>::infinity();
  for (const ClassBound& cb : bp.classes)
    if (std::isfinite(cb.willmore)) wmin = std::min(wmin, cb.willmore);
  if (!std::isfinite(wmin))
    throw std::runtime_error(
        "no half-period class of this conformal class is reachable by the genus <= 1 "
        "families");
  bp.w_min = wmin;
  return bp;
}

}  // namespace fermicurve
