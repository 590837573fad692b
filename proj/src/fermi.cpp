#include "fermicurve/fermi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fermicurve {

namespace {

struct Match {
  int idx = -1;
  double dist = 0;  // |value - target|
  double gap = 0;   // distance from the matched value to the nearest other value
};

Match nearest_match(const std::vector<cplx>& vals, cplx target) {
  Match m;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(vals.size()); ++i) {
    double d = std::abs(vals[i] - target);
    if (d < best) {
      best = d;
      m.idx = i;
    }
  }
  if (m.idx < 0) throw std::runtime_error("empty slice spectrum");
  m.dist = best;
  double g = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(vals.size()); ++i) {
    if (i == m.idx) continue;
    g = std::min(g, std::abs(vals[i] - vals[m.idx]));
  }
  m.gap = g;
  return m;
}

// Greedy one-to-one assignment of each target to a distinct candidate index,
// globally smallest distances first.  Sizes are tiny (sheet multiplicities).
std::vector<int> assign_nearest(const std::vector<cplx>& targets, const std::vector<cplx>& cands) {
  const int n = static_cast<int>(targets.size());
  struct Entry {
    double d;
    int t, c;
  };
  std::vector<Entry> es;
  for (int t = 0; t < n; ++t)
    for (int c = 0; c < static_cast<int>(cands.size()); ++c)
      es.push_back({std::abs(targets[t] - cands[c]), t, c});
  std::sort(es.begin(), es.end(), [](const Entry& a, const Entry& b) { return a.d < b.d; });
  std::vector<int> out(n, -1);
  std::vector<char> used(cands.size(), 0);
  for (const auto& e : es) {
    if (out[e.t] >= 0 || used[e.c]) continue;
    out[e.t] = e.c;
    used[e.c] = 1;
  }
  return out;
}

}  // namespace

std::vector<cplx> xp_segment(cplx a, cplx b, int n) {
  if (n < 1) throw std::invalid_argument("segment needs at least one step");
  std::vector<cplx> p(n + 1);
  for (int j = 0; j <= n; ++j) p[j] = a + (b - a) * (static_cast<double>(j) / n);
  return p;
}

std::vector<cplx> xp_circle(cplx center, double radius, int n) {
  if (n < 4) throw std::invalid_argument("circle needs at least four steps");
  std::vector<cplx> p(n + 1);
  for (int j = 0; j < n; ++j) p[j] = center + radius * std::exp(I * (2.0 * PI * j / n));
  p[n] = p[0];
  return p;
}

FermiBranch trace_branch(const FourierPotential& pot, const Lattice& lat,
                         const std::vector<cplx>& xp_path, cplx seed_yp, int K) {
  if (xp_path.size() < 2) throw std::invalid_argument("path needs at least two points");
  double scale = 1.0;
  for (cplx x : xp_path) scale = std::max(scale, std::abs(x));

  FermiBranch br;
  {
    auto vals = fermi_slice_values(pot, lat, xp_path.front(), K);
    Match m = nearest_match(vals, seed_yp);
    br.xp.push_back(xp_path.front());
    br.yp.push_back(vals[m.idx]);
    br.match_dist.push_back(0.0);
    br.gap.push_back(m.gap);
  }

  std::vector<cplx> pending(xp_path.rbegin(), xp_path.rend());
  pending.pop_back();
  int halvings = 0;
  while (!pending.empty()) {
    const cplx tgt = pending.back();
    const int n = static_cast<int>(br.xp.size());
    cplx pred = br.yp[n - 1];
    if (n >= 2) {
      const cplx dx = br.xp[n - 1] - br.xp[n - 2];
      if (std::abs(dx) > 1e-14 * scale)
        pred += (br.yp[n - 1] - br.yp[n - 2]) * ((tgt - br.xp[n - 1]) / dx);
    }
    auto vals = fermi_slice_values(pot, lat, tgt, K);
    Match m = nearest_match(vals, pred);
    // Exact transversal crossings leave a zero gap but an unambiguous value
    // (the candidates coincide); the absolute floor lets the trace pass
    // through them while genuine branch points still fail and halve.
    const double floor = 1e-9 * (1.0 + std::abs(pred));
    if (m.dist < std::max(0.5 * m.gap, floor)) {
      br.xp.push_back(tgt);
      br.yp.push_back(vals[m.idx]);
      br.match_dist.push_back(m.dist);
      br.gap.push_back(m.gap);
      pending.pop_back();
      halvings = 0;
    } else {
      ++halvings;
      if (halvings > 40 || std::abs(tgt - br.xp[n - 1]) < 1e-13 * scale) {
        std::ostringstream os;
        os << "eigenvalue collision while tracing near x-p = (" << tgt.real() << ", "
           << tgt.imag() << ")";
        throw std::runtime_error(os.str());
      }
      pending.push_back(0.5 * (br.xp[n - 1] + tgt));
    }
  }
  br.closed = std::abs(xp_path.front() - xp_path.back()) < 1e-12 * scale &&
              std::abs(br.yp.front() - br.yp.back()) < 1e-8;
  return br;
}

namespace {

// Squared separation of the two slice eigenvalues nearest to yc.  Analytic in
// xp near a simple handle (square-root pair), which the quadratic fit in
// handle_modulus exploits.
cplx sheet_gap_sq(const FourierPotential& pot, const Lattice& lat, cplx xp, cplx yc, int K) {
  auto vals = fermi_slice_values(pot, lat, xp, K);
  if (vals.size() < 2) throw std::runtime_error("slice too small");
  int i0 = -1, i1 = -1;
  double d0 = std::numeric_limits<double>::infinity(), d1 = d0;
  for (int i = 0; i < static_cast<int>(vals.size()); ++i) {
    double d = std::abs(vals[i] - yc);
    if (d < d0) {
      d1 = d0;
      i1 = i0;
      d0 = d;
      i0 = i;
    } else if (d < d1) {
      d1 = d;
      i1 = i;
    }
  }
  const cplx dy = vals[i0] - vals[i1];
  return dy * dy;
}

}  // namespace

HandleModulus handle_modulus(const FourierPotential& pot, const Lattice& lat,
                             std::array<int, 2> kappa, int K, int samples) {
  if (samples < 16) throw std::invalid_argument("contour needs at least 16 samples");
  HandleModulus H;
  H.kappa = kappa;
  const Vec2 kv = dual_vec(lat, kappa[0], kappa[1]);
  const DoublePoints dp = free_double_points(kv);
  H.center = rho_k(dp.kplus);
  cplx xc = gform(CVec2(lat.gamma1), H.center);
  const cplx yc = gform(CVec2(lat.gamma2), H.center);

  // Locate the branch-point pair: (dy)^2 is quadratic in xp near the handle,
  // so fit it from three samples and take the roots; one refinement round
  // re-centers the fit at the midpoint of the first-round roots.
  cplx r0 = 0, r1 = 0;
  double h = 0;
  for (int round = 0; round < 2; ++round) {
    const cplx D0 = sheet_gap_sq(pot, lat, xc, yc, K);
    h = (round == 0) ? std::max(std::sqrt(std::abs(D0)), 1e-6)
                     : std::max(std::abs(r0 - r1), 1e-6);
    const cplx Dp = sheet_gap_sq(pot, lat, xc + h, yc, K);
    const cplx Dm = sheet_gap_sq(pot, lat, xc - h, yc, K);
    const cplx C2 = (Dp + Dm - 2.0 * D0) / (2.0 * h * h);
    const cplx C1 = (Dp - Dm) / (2.0 * h);
    if (std::abs(C2) < 1e-10) {
      // No quadratic opening at this scale: degenerate cycle.
      H.xp_center = xc;
      H.separation = 0.0;
      H.t_value = 0.0;
      return H;
    }
    const cplx disc = std::sqrt(C1 * C1 - 4.0 * C2 * D0);
    r0 = (-C1 + disc) / (2.0 * C2);
    r1 = (-C1 - disc) / (2.0 * C2);
    xc += 0.5 * (r0 + r1);
  }
  H.xp_center = xc;
  H.separation = std::abs(r0 - r1);
  if (H.separation < 1e-8) {
    H.t_value = 0.0;  // coincident roots: double point (or empty handle)
    return H;
  }

  const double R = 3.0 * H.separation;
  auto not_isolable = [&](const std::string& why) {
    std::ostringstream os;
    os << "handle not isolable for kappa=(" << kappa[0] << "," << kappa[1] << "): " << why;
    return std::runtime_error(os.str());
  };

  // Walk from the centre out to the contour along the perpendicular bisector
  // of the branch-point pair (never closer to either than half their
  // separation); at the centre the handle pair is the nearest eigenvalue
  // pair, which anchors the sheet seed for the circle.
  const double phi = std::arg(r0 - r1) + 0.5 * PI;
  cplx rim_seed;
  try {
    auto radial = trace_branch(pot, lat, xp_segment(xc, xc + R * std::exp(I * phi), 16), yc, K);
    rim_seed = radial.yp.back();
  } catch (const std::runtime_error& e) {
    throw not_isolable(e.what());
  }

  // In the dual-basis slice coordinates, k1 dk2 integrates to
  // det(kappa1, kappa2) * xp dyp around a closed contour (the pure xp-xp and
  // yp-yp terms are exact differentials).  With xp on the circle, dxp is
  // known in closed form, so the equispaced trapezoid rule on
  // -yp dxp converges spectrally in the sample count.
  const double det = lat.kappa1.x * lat.kappa2.y - lat.kappa1.y * lat.kappa2.x;
  auto run = [&](int N) -> cplx {
    std::vector<cplx> nodes(N + 1);
    for (int j = 0; j < N; ++j) nodes[j] = xc + R * std::exp(I * (phi + 2.0 * PI * j / N));
    nodes[N] = nodes[0];
    FermiBranch br;
    try {
      br = trace_branch(pot, lat, nodes, rim_seed, K);
    } catch (const std::runtime_error& e) {
      throw not_isolable(e.what());
    }
    if (!br.closed) throw not_isolable("monodromy on the contour (branch points not enclosed)");
    cplx acc = 0;
    size_t pos = 0;
    for (int j = 0; j < N; ++j) {
      while (pos < br.xp.size() && br.xp[pos] != nodes[j]) ++pos;
      if (pos == br.xp.size()) throw not_isolable("contour node lost while tracing");
      acc += br.yp[pos] * I * R * std::exp(I * (phi + 2.0 * PI * j / N)) * (2.0 * PI / N);
    }
    return -PI * det * acc;
  };
  const cplx tN = run(samples);
  const cplx t2N = run(2 * samples);
  H.refine_delta = std::abs(t2N - tN);
  H.t_value = t2N;
  if (satisfies_symmetry(pot, FourierPotential::eta_pair) && H.t_value.real() < 0.0) {
    H.t_value = -H.t_value;
    H.orientation = -1;
  }
  return H;
}

cplx willmore_pairing(const FourierPotential& pot, const Lattice& lat) {
  cplx s = 0;
  for (const auto& [key, v] : pot.V) s += v * pot.what(-key[0], -key[1]);
  return 4.0 * lat.vol * s;
}

ResidueFit willmore_residue_fit(const FourierPotential& pot, const Lattice& lat, int K,
                                std::pair<double, double> fit_range) {
  double lo = fit_range.first, hi = fit_range.second;
  if (lo == 0.0 && hi == 0.0) {
    lo = 0.5 * K;
    hi = 0.75 * K;
  }
  if (!(0.0 < lo && lo < hi)) throw std::invalid_argument("fit range must satisfy 0 < lo < hi");

  // Seed direction of the sheet with k2/k1 -> +i, expressed in the slice
  // coordinate: solve k2 = i k1 for yp at given xp.
  const cplx den = cplx(lat.kappa2.y) - I * lat.kappa2.x;
  if (std::abs(den) < 1e-12) throw std::runtime_error("dual basis degenerate for the sheet seed");
  const cplx dir = (I * lat.kappa1.x - lat.kappa1.y) / den;

  const int nh = 6;
  std::vector<cplx> k1s, k2s;
  for (int side = 0; side < 2; ++side) {
    const double sgn = (side == 0) ? 1.0 : -1.0;
    cplx prev_xp = 0, prev_yp = 0, prev2_xp = 0, prev2_yp = 0;
    bool have1 = false, have2 = false;
    for (int j = 0; j < nh; ++j) {
      // Cell-midpoint grid: avoids the exact sheet degeneracies that the
      // near-free spectrum has at half-integer slice coordinates.
      const double xpr = sgn * (lo + (hi - lo) * (j + 0.5) / nh);
      cplx pred = dir * xpr;
      if (have2) pred = prev_yp + (prev_yp - prev2_yp) * ((xpr - prev_xp) / (prev_xp - prev2_xp));
      auto vals = fermi_slice_values(pot, lat, xpr, K);
      Match m = nearest_match(vals, pred);
      if (m.dist >= 0.5 * m.gap)
        throw std::runtime_error("sheet matching collision inside the residue fit range");
      const cplx yp = vals[m.idx];
      k1s.push_back(xpr * lat.kappa1.x + yp * lat.kappa2.x);
      k2s.push_back(xpr * lat.kappa1.y + yp * lat.kappa2.y);
      prev2_xp = prev_xp;
      prev2_yp = prev_yp;
      have2 = have1;
      prev_xp = xpr;
      prev_yp = yp;
      have1 = true;
    }
  }

  ResidueFit F;
  F.n_samples = static_cast<int>(k1s.size());
  cplx num = 0;
  double denom = 0;
  for (int j = 0; j < F.n_samples; ++j) {
    const cplx a = -I / k1s[j];
    const cplx b = k2s[j] - I * k1s[j];
    num += std::conj(a) * b;
    denom += std::norm(a);
  }
  F.c = num / denom;
  double rss = 0;
  for (int j = 0; j < F.n_samples; ++j) {
    const cplx a = -I / k1s[j];
    const cplx b = k2s[j] - I * k1s[j];
    rss += std::norm(b - F.c * a);
  }
  F.residual = std::sqrt(rss / F.n_samples);
  if (F.residual > 1e-4)
    throw std::runtime_error("residue fit residual above 1e-4: enlarge the fit range or cutoff");
  F.W = 8.0 * PI * PI * lat.vol * F.c;
  return F;
}

double analytic_single_mode_curve(cplx u, std::array<int, 2> kappa, const Lattice& lat,
                                  const CVec2& k, int window) {
  const Vec2 kv = dual_vec(lat, kappa[0], kappa[1]);
  const DoublePoints dp = free_double_points(kv);
  const double uu = std::norm(u);
  double best = std::numeric_limits<double>::infinity();
  for (int n1 = -window; n1 <= window; ++n1)
    for (int n2 = -window; n2 <= window; ++n2) {
      const Vec2 t = dual_vec(lat, n1, n2);
      const CVec2 q{k.x + dp.kplus.x + t.x, k.y + dp.kplus.y + t.y};
      best = std::min(best, std::abs(PI * PI * gform(q, q) - uu));
    }
  return best;
}

WeakSingularityReport weak_singularity_report(const FourierPotential& pot, const Lattice& lat,
                                              std::array<int, 2> c, int K) {
  const bool is_real = satisfies_symmetry(pot, FourierPotential::sigma_real);
  const bool is_pair = satisfies_symmetry(pot, FourierPotential::eta_pair);
  if (!is_real && !is_pair)
    throw std::invalid_argument("singularity taxonomy needs a symmetric potential pair");

  WeakSingularityReport R;
  R.half_class = c;
  const cplx xp0 = 0.5 * c[0];
  const cplx yp0 = 0.5 * c[1];
  R.xp0 = xp0;
  R.yp0 = yp0;

  auto vals0 = fermi_slice_values(pot, lat, xp0, K);
  for (cplx v : vals0) {
    const double d = std::abs(v - yp0);
    if (d < 1e-7)
      ++R.multiplicity;
    else if (d < 1e-4)
      R.ambiguous = true;
  }
  R.on_curve = R.multiplicity > 0;
  if (!R.on_curve) return R;
  const int m = R.multiplicity;

  // The m sheet values nearest yp0 at a given xp.
  auto select = [&](cplx xp) {
    auto vals = fermi_slice_values(pot, lat, xp, K);
    std::sort(vals.begin(), vals.end(),
              [&](cplx a, cplx b) { return std::abs(a - yp0) < std::abs(b - yp0); });
    vals.resize(m);
    return vals;
  };

  const double h = 1e-3;
  const auto vh = select(xp0 + h);    // branch labels live on this list
  const auto vh2 = select(xp0 + 0.5 * h);
  const auto vmh = select(xp0 - h);

  // Per-branch slope and curvature from the two samples on the + side:
  // y = yp0 + s*xi + q*xi^2 with xi = xp - xp0.
  std::vector<cplx> pred_h2(m);
  for (int i = 0; i < m; ++i) pred_h2[i] = yp0 + 0.5 * (vh[i] - yp0);
  const auto at_h2 = assign_nearest(pred_h2, vh2);
  std::vector<cplx> slope(m), curv(m);
  for (int i = 0; i < m; ++i) {
    const cplx d1 = vh[i] - yp0;
    const cplx d2 = vh2[at_h2[i]] - yp0;
    slope[i] = (4.0 * d2 - d1) / h;
    curv[i] = 2.0 * (d1 - 2.0 * d2) / (h * h);
  }

  // Continuation of each branch to the - side.
  std::vector<cplx> pred_mh(m);
  for (int i = 0; i < m; ++i) pred_mh[i] = yp0 - slope[i] * h + curv[i] * h * h;
  const auto at_mh = assign_nearest(pred_mh, vmh);
  std::vector<cplx> ymh(m);
  for (int i = 0; i < m; ++i) ymh[i] = vmh[at_mh[i]];

  R.dyp_dxp = slope;
  R.cusp.resize(m);
  for (int i = 0; i < m; ++i) {
    const double dplus = std::abs(vh[i] - yp0) / h;
    const double dminus = std::abs(yp0 - ymh[i]) / h;
    R.cusp[i] = dplus < 1e-6 && dminus < 1e-6;
  }

  // Involution actions as permutations of the sheet set.  The half-period
  // point is fixed mod the dual lattice by k -> -k and (being real) by
  // k -> conj(k), so both act on the sheets through the point:
  //   negation:    sheet value y at xp0+h  ->  2*yp0 - y at xp0-h,
  //   conjugation: sheet value y at xp0+h  ->  conj(y) at xp0+h.
  std::vector<int> sig(m, -1), rho(m, -1);
  if (is_real) {
    std::vector<cplx> sig_img(m), rho_img(m);
    for (int i = 0; i < m; ++i) sig_img[i] = 2.0 * yp0 - vh[i];
    for (int i = 0; i < m; ++i) rho_img[i] = std::conj(vh[i]);
    sig = assign_nearest(sig_img, ymh);  // indices into the branch list via ymh
    rho = assign_nearest(rho_img, vh);
  } else {
    // Only the combined involution k -> -conj(k) acts for a conjugate pair.
    std::vector<cplx> eta_img(m);
    for (int i = 0; i < m; ++i) eta_img[i] = 2.0 * yp0 - std::conj(vh[i]);
    sig = assign_nearest(eta_img, ymh);  // stored in `sig` as the only action
  }

  std::vector<char> seen(m, 0);
  for (int i = 0; i < m; ++i) {
    if (seen[i]) continue;
    SingularOrbit orb;
    std::vector<int> stack{i};
    seen[i] = 1;
    while (!stack.empty()) {
      const int j = stack.back();
      stack.pop_back();
      orb.members.push_back(j);
      for (int img : {sig[j], is_real ? rho[j] : sig[j]}) {
        if (img >= 0 && !seen[img]) {
          seen[img] = 1;
          stack.push_back(img);
        }
      }
    }
    std::sort(orb.members.begin(), orb.members.end());
    if (is_real) {
      bool rho_fixes_all = true, sig_fixes_all = true, rho_free = true, sig_free = true;
      for (int j : orb.members) {
        if (rho[j] == j)
          rho_free = false;
        else
          rho_fixes_all = false;
        if (sig[j] == j)
          sig_free = false;
        else
          sig_fixes_all = false;
      }
      const int n = static_cast<int>(orb.members.size());
      if (n == 2 && rho_fixes_all && sig_free)
        orb.type = 1;
      else if (n == 2 && sig_fixes_all && rho_free)
        orb.type = 2;
      else if (n == 4 && rho_free && sig_free)
        orb.type = 3;
      else
        orb.type = 0;
    }
    R.orbits.push_back(orb);
  }
  return R;
}

}  // namespace fermicurve
