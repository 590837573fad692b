#include "fermicurve/elliptic.hpp"

#include <cmath>

namespace fermicurve {

Theta1Values theta1_all(cplx u, cplx q) {
  // theta1(u) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) pi u),
  // differentiated termwise in u. Terms are accumulated until they fall
  // below 1e-17 of the running third-derivative scale.
  Theta1Values v{0.0, 0.0, 0.0, 0.0};
  const cplx ei = std::exp(cplx(0, 1) * PI * u);   // e^{i pi u}
  const cplx eim = 1.0 / ei;
  cplx En = ei, Enm = eim;                         // e^{+-i(2n+1) pi u}
  cplx qpow = std::pow(q, 0.25);                   // q^{(n+1/2)^2}
  const cplx qstep = q * q;
  cplx qfac = q * q;                               // q^{2n+2}: ratio of consecutive qpow
  double sign = 1.0;
  double scale = 0.0;
  int quiet = 0;
  for (int n = 0; n <= 200; ++n) {
    const cplx sn = (En - Enm) / cplx(0, 2.0);
    const cplx cn = (En + Enm) / 2.0;
    const double w = (2 * n + 1) * PI;
    const cplx c = 2.0 * sign * qpow;
    v.t0 += c * sn;
    v.t1 += c * w * cn;
    v.t2 -= c * w * w * sn;
    v.t3 -= c * w * w * w * cn;
    const double tmag = std::abs(c) * w * w * w * std::max(std::abs(sn), std::abs(cn));
    scale = std::max(scale, tmag);
    if (tmag < 1e-17 * scale) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
    sign = -sign;
    qpow *= qfac;
    qfac *= qstep;
    En *= ei * ei;
    Enm *= eim * eim;
  }
  return v;
}

namespace {

// Reduce z modulo the lattice 2*Z*w1 + 2*Z*w2 into the centered cell;
// returns the reduced point and the integer shifts.
struct Reduced {
  cplx z0;
  long long m1, m2;
};

Reduced reduce_cell(cplx z, cplx w1, cplx w2) {
  double det = 4.0 * (w1.real() * w2.imag() - w1.imag() * w2.real());
  double s = (2.0 * w2.imag() * z.real() - 2.0 * w2.real() * z.imag()) / det;
  double t = (-2.0 * w1.imag() * z.real() + 2.0 * w1.real() * z.imag()) / det;
  long long m1 = static_cast<long long>(std::floor(s + 0.5));
  long long m2 = static_cast<long long>(std::floor(t + 0.5));
  return {z - 2.0 * static_cast<double>(m1) * w1 - 2.0 * static_cast<double>(m2) * w2, m1, m2};
}

struct LogDerivs {
  cplx l1, l2, l3;  // (log theta1)', '', ''' w.r.t. u
};

LogDerivs log_theta_derivs(cplx u, cplx q) {
  Theta1Values t = theta1_all(u, q);
  cplx r1 = t.t1 / t.t0;
  cplx r2 = t.t2 / t.t0;
  cplx r3 = t.t3 / t.t0;
  return {r1, r2 - r1 * r1, r3 - 3.0 * r2 * r1 + 2.0 * r1 * r1 * r1};
}

double period_scale(const EllipticData& d) {
  return std::max(std::abs(2.0 * d.omega_t), std::abs(2.0 * d.omegap_t));
}

}  // namespace

EllipticData elliptic_from_periods(cplx omega, cplx omega_prime) {
  cplx tau = omega_prime / omega;
  if (!(tau.imag() > 0))
    throw std::invalid_argument("half-periods must satisfy Im(omega_prime/omega) > 0");
  EllipticData d;
  d.omega = omega;
  d.omega_prime = omega_prime;

  // Move to a modularly reduced basis of the same lattice for the series.
  ReducedTau rt = reduce_to_fundamental(tau);
  const auto& w = rt.word;
  d.omegap_t = static_cast<double>(w.a) * omega_prime + static_cast<double>(w.b) * omega;
  d.omega_t = static_cast<double>(w.c) * omega_prime + static_cast<double>(w.d) * omega;
  d.tau_t = d.omegap_t / d.omega_t;
  cplx q = std::exp(cplx(0, 1) * PI * d.tau_t);

  Theta1Values t0 = theta1_all(0.0, q);
  d.eta_t = -t0.t3 / (12.0 * d.omega_t * t0.t1);
  d.etap_t = (d.eta_t * d.omegap_t - cplx(0, PI / 2)) / d.omega_t;

  // Transport the quasi-periods back to the requested basis:
  // omega = a*omega_t - c*omegap_t, omega' = d*omegap_t - b*omega_t.
  d.eta = static_cast<double>(w.a) * d.eta_t - static_cast<double>(w.c) * d.etap_t;
  d.eta_prime = static_cast<double>(w.d) * d.etap_t - static_cast<double>(w.b) * d.eta_t;

  d.e1 = wp_eval(d, omega).p;
  d.e2 = wp_eval(d, omega + omega_prime).p;
  d.e3 = wp_eval(d, omega_prime).p;
  d.g2 = -4.0 * (d.e1 * d.e2 + d.e2 * d.e3 + d.e3 * d.e1);
  d.g3 = 4.0 * d.e1 * d.e2 * d.e3;
  return d;
}

double pole_distance(const EllipticData& d, cplx z) {
  Reduced r = reduce_cell(z, d.omega_t, d.omegap_t);
  // Nearest lattice point to z is one of the four cell corners around z0.
  double best = std::abs(r.z0);
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      best = std::min(best, std::abs(r.z0 - 2.0 * static_cast<double>(a) * d.omega_t -
                                     2.0 * static_cast<double>(b) * d.omegap_t));
  return best;
}

WpValues wp_eval(const EllipticData& d, cplx z) {
  const double scale = period_scale(d);
  Reduced r = reduce_cell(z, d.omega_t, d.omegap_t);
  if (std::abs(r.z0) < 1e-12 * scale) throw std::domain_error("evaluation at a lattice pole");
  const cplx w = d.omega_t;
  const cplx q = std::exp(cplx(0, 1) * PI * d.tau_t);
  const cplx u = r.z0 / (2.0 * w);
  LogDerivs L = log_theta_derivs(u, q);
  WpValues out;
  const cplx inv2w = 1.0 / (2.0 * w);
  out.zeta = d.eta_t * r.z0 / w + inv2w * L.l1 +
             2.0 * static_cast<double>(r.m1) * d.eta_t + 2.0 * static_cast<double>(r.m2) * d.etap_t;
  out.p = -d.eta_t / w - inv2w * inv2w * L.l2;
  out.pp = -inv2w * inv2w * inv2w * L.l3;
  return out;
}

cplx eta_from_eisenstein(const EllipticData& d) {
  // eta_t = (pi^2 / (12 omega_t)) * E2(exp(2 pi i tau_t)) with
  // E2(x) = 1 - 24 sum_{n>=1} n x^n / (1 - x^n), then transported like the
  // theta route.
  cplx x = std::exp(2.0 * PI * cplx(0, 1) * d.tau_t);
  cplx s = 0.0, xn = x;
  for (int n = 1; n <= 400; ++n) {
    cplx term = static_cast<double>(n) * xn / (1.0 - xn);
    s += term;
    if (std::abs(term) < 1e-18 * (1.0 + std::abs(s))) break;
    xn *= x;
  }
  cplx e2 = 1.0 - 24.0 * s;
  cplx eta_t = PI * PI / (12.0 * d.omega_t) * e2;
  cplx etap_t = (eta_t * d.omegap_t - cplx(0, PI / 2)) / d.omega_t;
  // Recover the word transport coefficients from the stored bases.
  // omega = a*omega_t - c*omegap_t and omega' = d*omegap_t - b*omega_t with
  // integer coefficients; solve the 2x2 complex system in real arithmetic.
  auto solve2 = [&](cplx target) {
    // target = p * omega_t + q * omegap_t with p, q (near-)integers.
    double det = d.omega_t.real() * d.omegap_t.imag() - d.omega_t.imag() * d.omegap_t.real();
    double p = (target.real() * d.omegap_t.imag() - target.imag() * d.omegap_t.real()) / det;
    double qq = (d.omega_t.real() * target.imag() - d.omega_t.imag() * target.real()) / det;
    return std::array<double, 2>{std::round(p), std::round(qq)};
  };
  auto pw = solve2(d.omega);
  return pw[0] * eta_t + pw[1] * etap_t;
}

ThetaParams theta_params(const Lattice& L) {
  ThetaParams p;
  p.lambda1 = cplx(L.gamma1.x, L.gamma1.y);
  p.lambda2 = cplx(L.gamma2.x, L.gamma2.y);
  p.tau = p.lambda2 / p.lambda1;
  return p;
}

cplx theta_delta_eval(const ThetaParams& p, cplx z) {
  cplx q = std::exp(cplx(0, 1) * PI * p.tau);
  cplx u = z / p.lambda1;
  // Reduce u by the quasi-periods to keep the series well conditioned:
  // u -> u - m1 - m2 tau picks up (-1)^{m1+m2} exp(i pi m2 (m2 tau + 2u')).
  double t = u.imag() / p.tau.imag();
  long long m2 = static_cast<long long>(std::floor(t + 0.5));
  cplx u1 = u - static_cast<double>(m2) * p.tau;
  long long m1 = static_cast<long long>(std::floor(u1.real() + 0.5));
  cplx u0 = u1 - static_cast<double>(m1);
  Theta1Values tv = theta1_all(u0, q);
  Theta1Values t0 = theta1_all(0.0, q);
  cplx val = p.lambda1 * tv.t0 / t0.t1;
  // Undo the reduction: from theta1(u+1) = -theta1(u) and
  // theta1(u+tau) = -q^{-1} e^{-2 pi i u} theta1(u) one gets
  // theta1(u0 + m1 + m2 tau) =
  //   (-1)^{m1+m2} exp(-i pi (m2^2 tau + 2 m2 u0)) theta1(u0).
  double dm2 = static_cast<double>(m2);
  cplx factor = ((m1 + m2) % 2 == 0) ? 1.0 : -1.0;
  if (m2 != 0) factor *= std::exp(-cplx(0, 1) * PI * (dm2 * dm2 * p.tau + 2.0 * dm2 * u0));
  return factor * val;
}

cplx theta_delta_logderiv(const ThetaParams& p, cplx z) {
  cplx q = std::exp(cplx(0, 1) * PI * p.tau);
  cplx u = z / p.lambda1;
  double t = u.imag() / p.tau.imag();
  long long m2 = static_cast<long long>(std::floor(t + 0.5));
  cplx u1 = u - static_cast<double>(m2) * p.tau;
  long long m1 = static_cast<long long>(std::floor(u1.real() + 0.5));
  cplx u0 = u1 - static_cast<double>(m1);
  Theta1Values tv = theta1_all(u0, q);
  // d/dz log theta(z) = (1/lambda1) [theta1'/theta1](u0) - 2 pi i m2/lambda1.
  return (tv.t1 / tv.t0 - 2.0 * PI * cplx(0, 1) * static_cast<double>(m2)) / p.lambda1;
}

std::array<cplx, 4> half_period_map_values(const EllipticData& d) {
  bool rect = std::abs(d.omega.imag()) < 1e-12 * std::abs(d.omega) &&
              std::abs((d.omega_prime / d.omega).real()) < 1e-12;
  if (!rect) throw std::invalid_argument("closed half-period values require a rectangular lattice");
  // At the four zeros of d(-p'/(p-e1)) one has (p - e1)^2 = 2 e1^2 + e2 e3,
  // and with s the square root of that, (p'/(p-e1))^2 = 4 (3 e1 +- 2 s)
  // follows from (p'/(p-e1))^2 = 4 (p-e2)(p-e3)/(p-e1).
  cplx s = std::sqrt(2.0 * d.e1 * d.e1 + d.e2 * d.e3);
  cplx qa = 2.0 * std::sqrt(3.0 * d.e1 + 2.0 * s);
  cplx qb = 2.0 * std::sqrt(3.0 * d.e1 - 2.0 * s);
  auto direct = [&](cplx z) {
    WpValues w = wp_eval(d, z);
    return -w.pp / (w.p - d.e1);
  };
  std::array<cplx, 4> out;
  const cplx pts[4] = {d.omega / 2.0, -d.omega / 2.0, d.omega / 2.0 + d.omega_prime,
                       -d.omega / 2.0 + d.omega_prime};
  const cplx closed[4] = {qa, -qa, qb, -qb};
  for (int i = 0; i < 4; ++i) {
    cplx dv = direct(pts[i]);
    cplx cf = closed[i];
    if (std::abs(dv - cf) > std::abs(dv + cf)) cf = -cf;  // match the branch
    out[i] = cf;
  }
  return out;
}

}  // namespace fermicurve
