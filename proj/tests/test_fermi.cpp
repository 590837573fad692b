#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fermicurve/fermi.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

using namespace fermicurve;

namespace {

Lattice square() { return make_lattice({1, 0}, {0, 1}); }

double nearest_dist(cplx x, const std::vector<cplx>& b) {
  double best = 1e300;
  for (const cplx& y : b) best = std::min(best, std::abs(x - y));
  return best;
}

bool match_sets(std::vector<cplx> a, std::vector<cplx> b, double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const cplx& x : a) {
    double best = 1e300;
    size_t arg = 0;
    for (size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      double d = std::abs(x - b[j]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    if (best > tol) return false;
    used[arg] = true;
  }
  return true;
}

}  // namespace

TEST_CASE("path builders") {
  auto seg = xp_segment(cplx(0.3), cplx(1.3), 10);
  REQUIRE(seg.size() == 11);
  CHECK(std::abs(seg.front() - cplx(0.3)) < 1e-15);
  CHECK(std::abs(seg.back() - cplx(1.3)) < 1e-15);
  CHECK(std::abs(seg[5] - cplx(0.8)) < 1e-15);

  auto cir = xp_circle(cplx(0.5), 0.05, 64);
  REQUIRE(cir.size() == 65);
  CHECK(cir.front() == cir.back());
  for (const cplx& p : cir) CHECK(std::abs(std::abs(p - cplx(0.5)) - 0.05) < 1e-12);
}

TEST_CASE("free-curve trace follows the analytic line through exact crossings") {
  // The free slice holds the lines -n2 + i(xp + n1); the traced line y = i*xp
  // crosses -(xp-1)i at xp = 1/2 and -(xp-2)i at xp = 1 (zero-gap crossings
  // that the trace must pass through).
  auto lat = square();
  FourierPotential zero;
  auto path = xp_segment(cplx(0.3), cplx(1.3), 50);  // grid lands exactly on 0.5 and 1.0
  auto br = trace_branch(zero, lat, path, I * 0.3, 4);
  REQUIRE(br.xp.size() >= path.size());
  REQUIRE(br.yp.size() == br.xp.size());
  REQUIRE(br.match_dist.size() == br.xp.size());
  REQUIRE(br.gap.size() == br.xp.size());
  double worst = 0;
  for (size_t j = 0; j < br.xp.size(); ++j)
    worst = std::max(worst, std::abs(br.yp[j] - I * br.xp[j]));
  CHECK(worst < 1e-9);
  CHECK(!br.closed);
}

TEST_CASE("constant-potential loop around the origin closes") {
  auto lat = square();
  auto pot = FourierPotential::constant(0.3);
  const double R = 2.0 * 0.3 / PI;
  auto path = xp_circle(cplx(0.0), R, 128);
  // Upper sheet value at the first path point xp = R: i*sqrt(R^2 - u^2/pi^2).
  const cplx seed = I * std::sqrt(R * R - 0.09 / (PI * PI));
  auto br = trace_branch(pot, lat, path, seed, 4);
  CHECK(br.closed);
  CHECK(std::abs(br.yp.front() - br.yp.back()) < 1e-10);
}

TEST_CASE("single-mode circle enclosing both branch points closes") {
  // The opened handle has branch points at xp = 1/2 +- u/pi (u/pi ~ 0.0318);
  // a radius-0.05 circle about 1/2 encloses both, so the square root is
  // single-valued on it and the branch closes (no monodromy).
  auto lat = square();
  auto pot = FourierPotential::single_mode(0.1, {1, 0});
  auto path = xp_circle(cplx(0.5), 0.05, 128);
  const cplx a = 0.01 / (PI * PI);
  const cplx seed = -0.5 * I + std::sqrt(a - cplx(0.05 * 0.05));
  auto br = trace_branch(pot, lat, path, seed, 4);
  CHECK(br.closed);
}

TEST_CASE("single-mode circle around one branch point has monodromy") {
  auto lat = square();
  auto pot = FourierPotential::single_mode(0.1, {1, 0});
  const double b1 = 0.5 + 0.1 / PI;  // one branch point of the handle
  auto path = xp_circle(cplx(b1), 0.02, 128);
  const cplx a = 0.01 / (PI * PI);
  const cplx w = cplx(b1 + 0.02) - 0.5;
  const cplx seed = -0.5 * I + std::sqrt(a - w * w);
  auto br = trace_branch(pot, lat, path, seed, 4);
  CHECK(!br.closed);
  // The endpoint lands on the other sheet: mismatch of twice the sheet offset.
  CHECK(std::abs(br.yp.front() - br.yp.back()) > 1e-3);
}

TEST_CASE("tracing through a branch point reports the collision") {
  auto lat = square();
  auto pot = FourierPotential::single_mode(0.1, {1, 0});
  auto path = xp_segment(cplx(0.4), cplx(0.6), 10);
  const cplx a = 0.01 / (PI * PI);
  const cplx w = cplx(0.4) - 0.5;
  const cplx seed = -0.5 * I + std::sqrt(a - w * w);
  try {
    trace_branch(pot, lat, path, seed, 4);
    FAIL("expected a collision error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("collision") != std::string::npos);
  }
}

TEST_CASE("tracing rejects a cutoff below the potential support") {
  auto lat = square();
  auto pot = FourierPotential::single_mode(0.1, {1, 0});
  CHECK_THROWS_AS(trace_branch(pot, lat, xp_segment(cplx(0.3), cplx(0.4), 4), I * 0.3, 0),
                  std::invalid_argument);
}

TEST_CASE("handle modulus of the single open handle") {
  auto lat = square();
  auto pot = FourierPotential::single_mode(0.1, {1, 0});
  auto H = handle_modulus(pot, lat, {1, 0}, 4);
  CHECK(std::abs(H.t_value - cplx(0.01)) < 1e-6);
  CHECK(std::abs(H.t_value.imag()) < 1e-8);
  CHECK(H.t_value.real() >= -1e-10);
  CHECK(H.refine_delta < 1e-8);
  // Branch points sit at 1/2 +- u/pi: separation 2u/pi.
  CHECK(std::abs(H.separation - 2.0 * 0.1 / PI) < 1e-3);
  CHECK(std::abs(H.xp_center - cplx(0.5)) < 1e-6);
}

TEST_CASE("handle modulus of the constant potential") {
  auto lat = square();
  auto pot = FourierPotential::constant(0.3);
  SUBCASE("origin handle carries t = u^2") {
    auto H = handle_modulus(pot, lat, {0, 0}, 4);
    CHECK(std::abs(H.t_value - cplx(0.09)) < 1e-6);
    CHECK(std::abs(H.t_value.imag()) < 1e-8);
    CHECK(H.refine_delta < 1e-8);
  }
  SUBCASE("nonzero classes stay double points (t = 0)") {
    auto H = handle_modulus(pot, lat, {1, 0}, 4);
    CHECK(std::abs(H.t_value) < 1e-10);
    CHECK(H.separation < 1e-8);
  }
}

TEST_CASE("handle modulus of the free curve vanishes") {
  auto lat = square();
  FourierPotential zero;
  auto H0 = handle_modulus(zero, lat, {0, 0}, 4);
  CHECK(std::abs(H0.t_value) < 1e-12);
  auto H1 = handle_modulus(zero, lat, {1, 0}, 4);
  CHECK(std::abs(H1.t_value) < 1e-12);
}

TEST_CASE("pairing form of the first integral") {
  auto lat = square();
  const double clifford = PI / std::sqrt(2.0);
  CHECK(std::abs(willmore_pairing(FourierPotential::constant(clifford), lat) -
                 cplx(2.0 * PI * PI)) < 1e-12);
  CHECK(std::abs(willmore_pairing(FourierPotential::single_mode(0.1, {1, 0}), lat) -
                 cplx(0.04)) < 1e-15);
  CHECK(std::abs(willmore_pairing(FourierPotential(), lat)) == 0.0);
}

TEST_CASE("residue fit of the first integral") {
  auto lat = square();
  SUBCASE("constant potential") {
    auto F = willmore_residue_fit(FourierPotential::constant(0.3), lat, 6);
    CHECK(F.residual < 1e-4);
    CHECK(std::abs(F.W - cplx(0.36)) < 0.01 * 0.36);
  }
  SUBCASE("single-mode pair") {
    auto F = willmore_residue_fit(FourierPotential::single_mode(0.1, {1, 0}), lat, 12);
    CHECK(F.residual < 1e-4);
    CHECK(std::abs(F.W - cplx(0.04)) < 0.01 * 0.04);
  }
  SUBCASE("free curve") {
    auto F = willmore_residue_fit(FourierPotential(), lat, 4);
    CHECK(std::abs(F.c) < 1e-12);
    CHECK(std::abs(F.W) < 1e-10);
  }
}

TEST_CASE("analytic single-mode curve") {
  auto lat = square();
  SUBCASE("free curve point gives zero at u = 0") {
    const cplx xp = 0.37;
    CHECK(analytic_single_mode_curve(0.0, {1, 0}, lat, {xp, I * xp}) < 1e-12);
  }
  SUBCASE("traced points satisfy the implicit equation") {
    auto pot = FourierPotential::single_mode(0.1, {1, 0});
    auto path = xp_circle(cplx(0.5), 0.05, 32);
    const cplx a = 0.01 / (PI * PI);
    const cplx seed = -0.5 * I + std::sqrt(a - cplx(0.05 * 0.05));
    auto br = trace_branch(pot, lat, path, seed, 4);
    for (size_t j = 0; j < br.xp.size(); ++j) {
      CVec2 k{br.xp[j], br.yp[j]};
      CHECK(analytic_single_mode_curve(0.1, {1, 0}, lat, k) < 1e-6);
    }
  }
  SUBCASE("reflection symmetry through the handle center") {
    // The value is invariant under k -> -k - 2 k^+ (the negation fixing the
    // double point k^+); the lattice-shifted map k -> -k - kappa is not a
    // symmetry of the family.
    const auto dp = free_double_points(dual_vec(lat, 1, 0));
    const CVec2 two_kp = 2.0 * dp.kplus;
    const std::vector<CVec2> ks = {{cplx(0.13, 0.07), cplx(-0.21, 0.31)},
                                   {cplx(-0.41, 0.11), cplx(0.05, -0.17)},
                                   {cplx(0.29, -0.23), cplx(0.37, 0.19)}};
    for (const auto& k : ks) {
      const double v = analytic_single_mode_curve(0.1, {1, 0}, lat, k);
      const double vref = analytic_single_mode_curve(0.1, {1, 0}, lat, -k - two_kp);
      CHECK(std::abs(v - vref) < 1e-12);
    }
    const CVec2 k0 = ks[0];
    const CVec2 shifted{-k0.x - 1.0, -k0.y};  // -k - kappa with kappa = (1,0)
    const double v0 = analytic_single_mode_curve(0.1, {1, 0}, lat, k0);
    CHECK(std::abs(v0 - analytic_single_mode_curve(0.1, {1, 0}, lat, shifted)) > 1e-6);
  }
}

TEST_CASE("half-period singularity of the Clifford-value constant potential") {
  auto lat = square();
  auto pot = FourierPotential::constant(PI / std::sqrt(2.0));
  auto R = weak_singularity_report(pot, lat, {1, 1}, 4);
  CHECK(R.on_curve);
  CHECK(!R.ambiguous);
  REQUIRE(R.multiplicity == 4);
  // Four transversal sheets with slopes -1, +1, +1, -1.
  int plus = 0, minus = 0;
  for (const cplx& s : R.dyp_dxp) {
    if (std::abs(s - cplx(1.0)) < 1e-3) ++plus;
    if (std::abs(s + cplx(1.0)) < 1e-3) ++minus;
  }
  CHECK(plus == 2);
  CHECK(minus == 2);
  for (bool c : R.cusp) CHECK(!c);
  REQUIRE(R.orbits.size() == 2);
  for (const auto& orb : R.orbits) {
    CHECK(orb.type == 1);
    REQUIRE(orb.members.size() == 2);
    const double s0 = std::abs(R.dyp_dxp[orb.members[0]]);
    const double s1 = std::abs(R.dyp_dxp[orb.members[1]]);
    CHECK(std::abs(s0 - s1) < 1e-3);
  }
}

TEST_CASE("free double point at the origin is one conjugation-paired orbit") {
  auto lat = square();
  FourierPotential zero;
  auto R = weak_singularity_report(zero, lat, {0, 0}, 4);
  CHECK(R.on_curve);
  REQUIRE(R.multiplicity == 2);
  int ip = 0, im = 0;
  for (const cplx& s : R.dyp_dxp) {
    if (std::abs(s - I) < 1e-3) ++ip;
    if (std::abs(s + I) < 1e-3) ++im;
  }
  CHECK(ip == 1);
  CHECK(im == 1);
  REQUIRE(R.orbits.size() == 1);
  CHECK(R.orbits[0].type == 2);
  CHECK(R.orbits[0].members.size() == 2);
}

TEST_CASE("half-period point off the curve is reported as such") {
  auto lat = square();
  auto R = weak_singularity_report(FourierPotential::constant(1.0), lat, {1, 1}, 4);
  CHECK(!R.on_curve);
  CHECK(R.multiplicity == 0);
}

TEST_CASE("traced branch of a real potential is point-symmetric under negation") {
  auto lat = square();
  auto pot = FourierPotential::constant(0.3);
  auto br = trace_branch(pot, lat, xp_segment(cplx(0.1), cplx(0.4), 6),
                         I * std::sqrt(0.01 - 0.09 / (PI * PI)), 4);
  for (size_t j = 0; j < br.xp.size(); ++j) {
    auto mirror = fermi_slice_values(pot, lat, -br.xp[j], 4);
    CHECK(nearest_dist(-br.yp[j], mirror) < 1e-8);
  }
}

TEST_CASE("blocked slice solver agrees with the dense slice") {
  auto lat = square();
  const cplx xp(0.37, 0.21);
  auto pot = FourierPotential::single_mode(0.1, {1, 0});
  auto fast = fermi_slice_values(pot, lat, xp, 4);
  std::vector<cplx> dense;
  for (const auto& p : fermi_slice(pot, lat, xp, 4)) dense.push_back(p.yp);
  REQUIRE(fast.size() == dense.size());
  CHECK(match_sets(fast, dense, 1e-9));

  // A stored off-axis (zero) coefficient forces the dense fallback; the
  // spectrum is unchanged.
  auto pot2 = pot;
  pot2.V[{1, 1}] = 0.0;
  auto forced = fermi_slice_values(pot2, lat, xp, 4);
  CHECK(match_sets(fast, forced, 1e-9));
}
