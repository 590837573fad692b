#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fermicurve/backlund.hpp"
#include "fermicurve/weierstrass.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

using namespace fermicurve;

namespace {

// Single-mode spinor (1, b) e_{k + dual(n1,n2)}; b free, not tied to any
// operator.  Orbits of this shape carry a symmetric period pairing with curve
// slope tan(arg b).
KernelSpinor single_mode(const CVec2& k, int K, int n1, int n2, cplx b) {
  KernelSpinor s;
  s.k = k;
  s.K = K;
  s.coeffs = Eigen::VectorXcd::Zero(2 * (2 * K + 1) * (2 * K + 1));
  const int idx = BlochMatrix::mode_index(n1, n2, K);
  s.coeffs[2 * idx] = 1.0;
  s.coeffs[2 * idx + 1] = b;
  s.character = std::array<int, 2>{-1, -1};
  return s;
}

// Two-mode spinor with component-1 weights (1, c) on modes m and -(1,1)-m and
// component-2 weights (d1, d2).  With mean(chi1 conj(chi2)) = 0 the period
// pairing is antisymmetric with slope i(A+B)/(A-B), A = 2c, B = 2 d1 d2.
KernelSpinor two_mode(const CVec2& k, int K, std::array<int, 2> m, cplx c, cplx d1, cplx d2) {
  KernelSpinor s;
  s.k = k;
  s.K = K;
  s.coeffs = Eigen::VectorXcd::Zero(2 * (2 * K + 1) * (2 * K + 1));
  const std::array<int, 2> mn{-1 - m[0], -1 - m[1]};
  const int ia = BlochMatrix::mode_index(m[0], m[1], K);
  const int ib = BlochMatrix::mode_index(mn[0], mn[1], K);
  s.coeffs[2 * ia] = 1.0;
  s.coeffs[2 * ib] = c;
  s.coeffs[2 * ia + 1] = d1;
  s.coeffs[2 * ib + 1] = d2;
  s.character = std::array<int, 2>{-1, -1};
  return s;
}

// Kernel spinor of the constant potential at a sheet through the double point.
KernelSpinor sheet_spinor(const Lattice& lat, const CVec2& k, cplx u, int n1, int n2, int K) {
  KernelSpinor s;
  s.k = k;
  s.K = K;
  s.coeffs = Eigen::VectorXcd::Zero(2 * (2 * K + 1) * (2 * K + 1));
  const CVec2 q = k + CVec2(dual_vec(lat, n1, n2));
  const int idx = BlochMatrix::mode_index(n1, n2, K);
  s.coeffs[2 * idx] = 1.0;
  s.coeffs[2 * idx + 1] = -u / (PI * (q.y + I * q.x));
  s.character = std::array<int, 2>{-1, -1};
  return s;
}

ImmersionGrid sphere_grid(const Lattice& lat, int n, double offset_cells) {
  ImmersionGrid g;
  g.n = n;
  g.lat = lat;
  const size_t N = static_cast<size_t>(n) * n;
  g.x.resize(N);
  g.y.resize(N);
  g.z.resize(N);
  const double off = offset_cells * 2.0 * PI / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double phi = 2.0 * PI * i / n, th = 2.0 * PI * j / n + off;
      const size_t p = static_cast<size_t>(i) * n + j;
      g.x[p] = std::sin(th) * std::cos(phi);
      g.y[p] = std::sin(th) * std::sin(phi);
      g.z[p] = std::cos(th);
    }
  return g;
}

ImmersionGrid flat_grid(const Lattice& lat, int n) {
  ImmersionGrid g;
  g.n = n;
  g.lat = lat;
  const size_t N = static_cast<size_t>(n) * n;
  g.x.assign(N, 0.0);
  g.y.assign(N, 0.0);
  g.z.assign(N, 0.0);
  g.secular_u = {lat.gamma1.x, lat.gamma1.y, 0.0};
  g.secular_v = {lat.gamma2.x, lat.gamma2.y, 0.0};
  return g;
}

}  // namespace

TEST_CASE("periodicity combinations follow the closed-form branches") {
  const Lattice Z2 = make_lattice({1, 0}, {0, 1});
  const CVec2 k0{0.5, 0.5};
  const int K = 4;

  // equal slopes, symmetric pairing: weights (z1, z2, i z1, -i z2)
  {
    const cplx bA = std::polar(1.0, PI / 3.0), bB = std::polar(0.8, PI / 3.0);
    const std::vector<KernelSpinor> ker = {
        single_mode(k0, K, 0, 0, bA), single_mode(k0, K, -1, -1, bA),
        single_mode(k0, K, 0, -1, bB), single_mode(k0, K, -1, 0, bB)};
    const cplx sl = std::tan(PI / 3.0);
    const PeriodicityCombination r = solve_periodicity_combination(ker, {sl, sl}, Z2);
    CHECK(r.branch == "equal-slope");
    CHECK(r.family_dim == 2);
    CHECK(std::abs(r.z[0] - 1.0) < 1e-14);
    CHECK(std::abs(r.z[2] - I) < 1e-14);
    CHECK(std::abs(r.z[1]) < 1e-14);
    CHECK(std::abs(r.z[3]) < 1e-14);
    CHECK(std::abs(r.alpha - sl) < 1e-10);
    CHECK(std::abs(r.beta - sl) < 1e-10);
    for (double res : r.residuals) CHECK(res < 1e-13);
  }

  // conjugate slopes, antisymmetric pairing: weights (z1, z2, z2, -z1)
  {
    const KernelSpinor uA = two_mode(k0, K, {0, 0}, 1.0, 0.5, -0.5);
    const KernelSpinor uB = two_mode(k0, K, {0, -1}, -0.25, 0.5, 2.0);
    const std::vector<KernelSpinor> ker = {uA, uA, uB, uB};
    const PeriodicityCombination r =
        solve_periodicity_combination(ker, {cplx(0, 0.6), cplx(0, -0.6)}, Z2);
    CHECK(r.branch == "conjugate-slope");
    CHECK(r.family_dim == 2);
    CHECK(std::abs(r.z[0] - 1.0) < 1e-14);
    CHECK(std::abs(r.z[3] + 1.0) < 1e-14);
    CHECK(std::abs(r.alpha - cplx(0, 0.6)) < 1e-10);
    CHECK(std::abs(r.beta - cplx(0, -0.6)) < 1e-10);
    for (double res : r.residuals) CHECK(res < 1e-13);
  }
}

TEST_CASE("periodicity solver rejects incompatible or malformed inputs") {
  const Lattice Z2 = make_lattice({1, 0}, {0, 1});
  const CVec2 k0{0.5, 0.5};
  const int K = 4;
  const cplx bA = std::polar(1.0, PI / 3.0);

  // slopes neither equal nor conjugate: the lemma's only-if direction
  {
    const KernelSpinor uA = two_mode(k0, K, {0, 0}, 1.0, 0.5, -0.5);
    const cplx rt = I * std::sqrt(0.2);
    const KernelSpinor uC = two_mode(k0, K, {1, 0}, 0.5, -0.5 * rt, rt);
    CHECK_THROWS_WITH_AS(
        solve_periodicity_combination({uA, uA, uC, uC}, {cplx(0, 0.6), cplx(0, 1.5)}, Z2),
        "no Weierstrass potential in this gauge", std::runtime_error);
  }

  // supplied slope inconsistent with the vectors themselves
  {
    const std::vector<KernelSpinor> ker = {
        single_mode(k0, K, 0, 0, bA), single_mode(k0, K, -1, -1, bA),
        single_mode(k0, K, 0, -1, bA), single_mode(k0, K, -1, 0, bA)};
    CHECK_THROWS_AS(solve_periodicity_combination(ker, {cplx(0.4), cplx(0.4)}, Z2),
                    std::invalid_argument);
  }

  // a single nondegenerate orbit has no nontrivial combination
  {
    const std::vector<KernelSpinor> ker = {single_mode(k0, K, 0, 0, bA),
                                           single_mode(k0, K, -1, -1, bA)};
    CHECK_THROWS_AS(solve_periodicity_combination(ker, {std::tan(PI / 3.0)}, Z2),
                    std::runtime_error);
  }

  // structural errors
  CHECK_THROWS_AS(solve_periodicity_combination({single_mode(k0, K, 0, 0, bA)}, {}, Z2),
                  std::invalid_argument);
  {
    KernelSpinor other = single_mode(k0, 5, 0, 0, bA);
    CHECK_THROWS_AS(
        solve_periodicity_combination({single_mode(k0, K, 0, 0, bA), other}, {cplx(1.0)}, Z2),
        std::invalid_argument);
  }
  {
    const CVec2 kbad{0.3, 0.0};
    const std::vector<KernelSpinor> ker = {single_mode(kbad, K, 0, 0, bA),
                                           single_mode(kbad, K, -1, -1, bA)};
    CHECK_THROWS_AS(solve_periodicity_combination(ker, {cplx(1.0)}, Z2), std::invalid_argument);
  }
  {
    // nondegenerate four-dimensional kernel with a one-entry slope list
    const std::vector<KernelSpinor> ker = {
        single_mode(k0, K, 0, 0, bA), single_mode(k0, K, -1, -1, bA),
        single_mode(k0, K, 0, -1, bA), single_mode(k0, K, -1, 0, bA)};
    CHECK_THROWS_AS(solve_periodicity_combination(ker, {std::tan(PI / 3.0)}, Z2),
                    std::invalid_argument);
  }
}

TEST_CASE("the transformed double point carries a closed minimal-energy torus") {
  const Lattice Z2 = make_lattice({1, 0}, {0, 1});
  const cplx u = PI / std::sqrt(2.0);
  const CVec2 k0{0.5, 0.5};
  const FourierPotential pot = FourierPotential::constant(u);
  const double target = 2.0 * PI * PI;

  // before the transform: four kernel elements in two slope-incompatible orbits
  const int K1 = 6;
  const KernelResult pre = kernel_at(pot, Z2, k0, K1);
  REQUIRE(pre.spinors.size() == 4);
  const std::vector<KernelSpinor> preorb = {
      sheet_spinor(Z2, k0, u, 0, 0, K1), sheet_spinor(Z2, k0, u, -1, -1, K1),
      sheet_spinor(Z2, k0, u, 0, -1, K1), sheet_spinor(Z2, k0, u, -1, 0, K1)};
  CHECK_THROWS_WITH_AS(solve_periodicity_combination(preorb, {cplx(-1.0), cplx(1.0)}, Z2),
                       "no Weierstrass potential in this gauge", std::runtime_error);

  // transform generated by the cross-orbit kernel combination
  KernelSpinor mix = sheet_spinor(Z2, k0, u, 0, 0, K1);
  mix.coeffs = (mix.coeffs + sheet_spinor(Z2, k0, u, 0, -1, K1).coeffs) / std::sqrt(2.0);
  const GridSpinor chi = grid_spinor(mix, Z2, 128);
  const BacklundPotential bp = backlund_potential(pot, Z2, chi, 32);
  CHECK(bp.kernel_residual < 1e-10);
  CHECK(bp.tail_mass < 1e-10);

  // energy identity of the transformed potential
  const double l2 = potential_l2_sq(bp.potential, Z2);
  CHECK(std::abs(4.0 * l2 - target) < 1e-10 * target);

  // after the transform: a two-dimensional kernel whose pairings all vanish
  const KernelResult post = kernel_at(bp.potential, Z2, k0, 32);
  REQUIRE(post.spinors.size() == 2);
  const PeriodicityCombination comb = solve_periodicity_combination(
      {post.spinors[0], post.spinors[1]}, {cplx(-1.0), cplx(1.0)}, Z2);
  CHECK(comb.branch == "degenerate");
  CHECK(comb.family_dim == 2);
  for (double r : comb.residuals) CHECK(r < 1e-12);

  // closed conformal immersion with the minimal energy
  const ImmersionGrid grid = immersion_from_spinor(comb.chi, Z2, 128);
  for (double c : grid.closure) CHECK(c < 1e-12);
  CHECK(conformality_residual(grid) < 1e-6);
  const double w128 = willmore_quadrature(grid);
  CHECK(std::abs(w128 - target) < 1e-10 * target);
  CHECK(std::abs(w128 - 4.0 * l2) < 1e-10 * target);
  const double w256 = willmore_quadrature(immersion_from_spinor(comb.chi, Z2, 256));
  CHECK(std::abs(w256 - w128) < 1e-10 * w128);
}

TEST_CASE("immersion scales quadratically, pins the origin and ignores phases") {
  const Lattice Z2 = make_lattice({1, 0}, {0, 1});
  const CVec2 k0{0.5, 0.5};
  const int K = 4;

  // a cheap closed spinor: equal-slope combination of two synthetic orbits
  const cplx bA = std::polar(1.0, PI / 3.0), bB = std::polar(0.8, PI / 3.0);
  const std::vector<KernelSpinor> ker = {
      single_mode(k0, K, 0, 0, bA), single_mode(k0, K, -1, -1, bA),
      single_mode(k0, K, 0, -1, bB), single_mode(k0, K, -1, 0, bB)};
  const cplx sl = std::tan(PI / 3.0);
  const KernelSpinor chi = solve_periodicity_combination(ker, {sl, sl}, Z2).chi;

  const ImmersionGrid g = immersion_from_spinor(chi, Z2, 64);
  CHECK(g.x[0] == 0.0);
  CHECK(g.y[0] == 0.0);
  CHECK(g.z[0] == 0.0);
  CHECK(g.density.size() == g.x.size());

  // real scaling multiplies X by the squared factor
  KernelSpinor lam = chi;
  lam.coeffs *= 1.7;
  const ImmersionGrid gs = immersion_from_spinor(lam, Z2, 64);
  double scale_err = 0.0, amp = 0.0;
  for (size_t p = 0; p < g.x.size(); ++p) {
    scale_err = std::max(scale_err, std::abs(gs.x[p] - 1.7 * 1.7 * g.x[p]));
    scale_err = std::max(scale_err, std::abs(gs.y[p] - 1.7 * 1.7 * g.y[p]));
    scale_err = std::max(scale_err, std::abs(gs.z[p] - 1.7 * 1.7 * g.z[p]));
    amp = std::max({amp, std::abs(g.x[p]), std::abs(g.y[p]), std::abs(g.z[p])});
  }
  CHECK(amp > 1e-3);  // the surface is not a point
  CHECK(scale_err < 1e-12);

  // phase rotations act as rigid isometries of the image
  KernelSpinor rot = chi;
  rot.coeffs *= std::exp(I * 0.7);
  const double w0 = willmore_quadrature(g);
  const double w1 = willmore_quadrature(immersion_from_spinor(rot, Z2, 64));
  CHECK(std::abs(w1 - w0) < 1e-10 * std::max(1.0, w0));

  // structural gates
  CHECK_THROWS_AS(immersion_from_spinor(chi, Z2, 63), std::invalid_argument);
  CHECK_THROWS_AS(immersion_from_spinor(chi, Z2, 4), std::invalid_argument);
  KernelSpinor open = single_mode(k0, K, 0, 0, std::polar(1.0, 0.3));
  CHECK_THROWS_AS(immersion_from_spinor(open, Z2, 64), std::runtime_error);
}

TEST_CASE("quadrature reproduces the round sphere and flags degenerate metrics") {
  const Lattice Z2 = make_lattice({1, 0}, {0, 1});

  // double cover of the unit sphere: energy = area = 8 pi
  const double w128 = willmore_quadrature(sphere_grid(Z2, 128, 0.37));
  const double w256 = willmore_quadrature(sphere_grid(Z2, 256, 0.37));
  const double e128 = std::abs(w128 - 8.0 * PI) / (8.0 * PI);
  const double e256 = std::abs(w256 - 8.0 * PI) / (8.0 * PI);
  CHECK(e128 < 5e-4);
  CHECK(e256 < e128);

  // a pole on a grid node degenerates the metric
  CHECK_THROWS_WITH_AS(willmore_quadrature(sphere_grid(Z2, 64, 0.0)),
                       "degenerate metric cell in the quadrature grid", std::runtime_error);
}

TEST_CASE("conformality residual separates conformal, flat and perturbed grids") {
  const Lattice skew = make_lattice({1, 0}, {0.3, 1.2});
  const ImmersionGrid flat = flat_grid(skew, 32);
  CHECK(conformality_residual(flat) < 1e-12);
  CHECK(willmore_quadrature(flat) < 1e-12);

  // random perturbation destroys conformality by many orders
  ImmersionGrid noisy = flat;
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> d(-0.01, 0.01);
  for (size_t p = 0; p < noisy.x.size(); ++p) {
    noisy.x[p] += d(rng);
    noisy.y[p] += d(rng);
    noisy.z[p] += d(rng);
  }
  CHECK(conformality_residual(noisy) > 1e-1);

  // density masking removes flagged nodes from the report
  ImmersionGrid masked = noisy;
  masked.density.assign(noisy.x.size(), 1.0);
  const double full = conformality_residual(masked);
  CHECK(full == conformality_residual(noisy));
  for (size_t p = 0; p < masked.density.size(); ++p)
    if (p % 7 == 0) masked.density[p] = 1e-14;
  CHECK(conformality_residual(masked) <= full);
}

TEST_CASE("mesh export writes deterministic row-major plain text") {
  const Lattice Z2 = make_lattice({1, 0}, {0, 1});
  const ImmersionGrid flat = flat_grid(Z2, 8);
  const std::string path = "mesh_probe.txt";
  export_mesh(flat, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  in.close();
  REQUIRE(lines.size() == 64);
  CHECK(lines[0] == "0 0 0");
  // node (i, j) = (1, 2): X = u gamma1 + v gamma2 = (1/8, 2/8)
  CHECK(lines[1 * 8 + 2] == "0.125 0.25 0");
  export_mesh(flat, path);
  std::ifstream again(path);
  std::stringstream ss;
  ss << again.rdbuf();
  std::stringstream ref;
  for (const auto& l : lines) ref << l << "\n";
  CHECK(ss.str() == ref.str());
  std::remove(path.c_str());

  CHECK_THROWS_AS(export_mesh(flat, "/nonexistent-dir/mesh.txt"), std::runtime_error);
}

TEST_CASE("potential norm follows the Parseval sum") {
  const Lattice Z2 = make_lattice({1, 0}, {0, 1});
  const cplx u(0.21, 0.13);
  CHECK(std::abs(potential_l2_sq(FourierPotential::constant(u), Z2) - std::norm(u)) < 1e-15);
  CHECK(std::abs(potential_l2_sq(FourierPotential::single_mode(u, {1, 0}), Z2) - std::norm(u)) <
        1e-15);
  const Lattice wide = make_lattice({2, 0}, {0, 1});
  CHECK(std::abs(potential_l2_sq(FourierPotential::constant(u), wide) - 2.0 * std::norm(u)) <
        1e-15);
}
