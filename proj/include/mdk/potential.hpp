#pragma once

// The mirror potential W = x^a + x^b y^c + x^-d y^-e, its critical values, the
// branch points of the projection (x, y) -> x of a fiber W = t, and the
// continuation of those branch points along straight vanishing paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "mdk/error.hpp"
#include "mdk/lattice.hpp"
#include "mdk/polynomial.hpp"

namespace mdk {

inline cplx ipow(cplx z, Int n) {
  if (n < 0) return 1.0 / ipow(z, -n);
  cplx r = 1;
  while (n) {
    if (n & 1) r *= z;
    z *= z;
    n >>= 1;
  }
  return r;
}

inline cplx unit(double turns) { return std::polar(1.0, 2 * std::numbers::pi * turns); }

struct Potential {
  NormalizedTriangle nt;
  std::array<Vec2i, 3> exponents;  // Newton polygon vertices; all coefficients are 1

  Int g() const { return nt.g(); }
  Int h() const { return nt.h(); }
  Int N() const { return nt.N(); }

  cplx operator()(cplx x, cplx y) const {
    return ipow(x, nt.a) + ipow(x, nt.b) * ipow(y, nt.c) + ipow(x, -nt.d) * ipow(y, -nt.e);
  }
  cplx dWdx(cplx x, cplx y) const {
    return double(nt.a) * ipow(x, nt.a - 1) + double(nt.b) * ipow(x, nt.b - 1) * ipow(y, nt.c) -
           double(nt.d) * ipow(x, -nt.d - 1) * ipow(y, -nt.e);
  }
  cplx dWdy(cplx x, cplx y) const {
    return double(nt.c) * ipow(x, nt.b) * ipow(y, nt.c - 1) - double(nt.e) * ipow(x, -nt.d) * ipow(y, -nt.e - 1);
  }

  // fiber W = t times x^d y^e:  A y^{c+e} + B y^e + 1 = 0
  cplx A(cplx x) const { return ipow(x, nt.b + nt.d); }
  cplx B(cplx x, cplx t) const { return (ipow(x, nt.a) - t) * ipow(x, nt.d); }

  Poly fiber_polynomial(cplx x, cplx t) const {
    Poly p(static_cast<std::size_t>(g() + 1), 0.0);
    p[g()] += A(x);
    p[nt.e] += B(x, t);
    p[0] += 1.0;
    return p;
  }

  /// (-1)^g c^c e^e / g^g
  double branch_constant() const {
    const double c = double(nt.c), e = double(nt.e), gg = double(g());
    const double k = std::exp(c * std::log(c) + e * std::log(e) - gg * std::log(gg));
    return (g() % 2 ? -1.0 : 1.0) * k;
  }

  /// K (x^a - t)^g x^h - 1, degree N in x.
  Poly branch_polynomial(cplx t) const {
    Poly p(static_cast<std::size_t>(N() + 1), 0.0);
    const double K = branch_constant();
    double binom = 1;  // C(g, j)
    for (Int j = 0; j <= g(); ++j) {
      p[static_cast<std::size_t>(nt.a * j + h())] += K * binom * ipow(-t, g() - j);
      binom = binom * double(g() - j) / double(j + 1);
    }
    p[0] -= 1.0;
    return p;
  }
};

inline Potential build_potential(const NormalizedTriangle& nt) {
  if (!is_coprime(nt))
    throw Error(ErrorCode::NonCoprime, "gcd(a,h) = " + std::to_string(gcd(nt.a, nt.h())) + " for " + nt.str() +
                                           "; " + kCoverReductionNote);
  return Potential{nt, nt.vertices()};
}

// ---------------------------------------------------------------------------
// Critical values

struct CriticalValue {
  cplx t;
  int index = 0;  // t = r exp(2 pi i index / N)
  double r = 0;
  int multiplicity = 1;
};

struct CriticalPoint {
  cplx x, y, t;
  int value_index = 0;
};

/// log C with t^N = C = N^N / (a^{ag} c^{ca} e^{ea} h^h).
inline double log_closed_form_constant(const NormalizedTriangle& nt) {
  const double a = double(nt.a), c = double(nt.c), e = double(nt.e), g = double(nt.g()), h = double(nt.h()),
               N = double(nt.N());
  return N * std::log(N) - a * g * std::log(a) - c * a * std::log(c) - e * a * std::log(e) - h * std::log(h);
}

/// Positive root of the equation as printed in the source,
/// t^{g+h/a} = (1/(c^c e^e)) (1+h/a)^g (1+ag/h)^{h/a}. Kept for comparison only:
/// it disagrees with the gradient (t0 = 12^{1/3} instead of 3 for P^2).
inline double printed_closed_form_t0(const NormalizedTriangle& nt) {
  const double a = double(nt.a), c = double(nt.c), e = double(nt.e), g = double(nt.g()), h = double(nt.h());
  const double lhs_log = -c * std::log(c) - e * std::log(e) + g * std::log1p(h / a) + (h / a) * std::log1p(a * g / h);
  return std::exp(lhs_log / (g + h / a));
}

/// Positive real critical value.
inline double critical_t0(const NormalizedTriangle& nt) {
  return std::exp(log_closed_form_constant(nt) / double(nt.N()));
}

/// Solutions of dW/dx = dW/dy = 0, by elimination: with X = x^{a+d} y^e and
/// Y = x^{b+d} y^{c+e}, the gradient equations are linear, aX + bY = d and
/// cY = e; then x^N = X^g / Y^e and y is recovered from y^g, y^e.
inline std::vector<CriticalPoint> critical_points_oracle(const Potential& p) {
  const auto& nt = p.nt;
  const double X0 = double(nt.h()) / double(nt.a * nt.c), Y0 = double(nt.e) / double(nt.c);
  const Int N = p.N(), g = p.g();
  Poly xpoly(static_cast<std::size_t>(N + 1), 0.0);
  xpoly[N] = 1;
  xpoly[0] = -std::exp(double(g) * std::log(X0) - double(nt.e) * std::log(Y0));
  const RootResult xr = find_roots(xpoly);

  const Bezout bz = extended_gcd(g, nt.e);
  std::vector<CriticalPoint> pts;
  for (cplx x : xr.roots) {
    const cplx ye = X0 / ipow(x, nt.a + nt.d), yg = Y0 / ipow(x, nt.b + nt.d);
    const cplx z = ipow(yg, bz.x) * ipow(ye, bz.y);  // y^{gcd(g,e)}
    const cplx base = std::pow(z, 1.0 / double(bz.g));
    for (Int j = 0; j < bz.g; ++j) {
      cplx y = base * unit(double(j) / double(bz.g));
      const double r1 = std::abs(ipow(x, nt.a + nt.d) * ipow(y, nt.e) - X0) / X0;
      const double r2 = std::abs(ipow(x, nt.b + nt.d) * ipow(y, g) - Y0) / Y0;
      if (r1 < 1e-9 && r2 < 1e-9) pts.push_back({x, y, p(x, y), 0});
    }
  }
  if (static_cast<Int>(pts.size()) != N)
    throw Error(ErrorCode::SolveFailure,
                "gradient system has " + std::to_string(pts.size()) + " solutions, expected " + std::to_string(N));
  return pts;
}

/// The N critical values from the closed form, with multiplicity. When the
/// vertices span an index-k sublattice the values are the N/k roots of
/// t^{N/k} = C^{1/k}, each attained at k critical points. Each closed-form value
/// is checked against the gradient oracle.
inline std::vector<CriticalValue> critical_values(const Potential& p, double rel_tol = 1e-9) {
  const Int N = p.N(), k = p.nt.lattice_index();
  const double r = critical_t0(p.nt);
  std::vector<CriticalValue> vals;
  for (Int n = 0; n < N; n += k)
    for (Int copy = 0; copy < k; ++copy)
      vals.push_back({std::polar(r, 2 * std::numbers::pi * double(n) / double(N)), int(n), r, int(k)});

  const auto oracle = critical_points_oracle(p);
  std::vector<char> used(oracle.size(), 0);
  for (const auto& v : vals) {
    std::size_t best = oracle.size();
    for (std::size_t i = 0; i < oracle.size(); ++i)
      if (!used[i] && (best == oracle.size() || std::abs(oracle[i].t - v.t) < std::abs(oracle[best].t - v.t)))
        best = i;
    if (best == oracle.size() || std::abs(oracle[best].t - v.t) > rel_tol * r)
      throw Error(ErrorCode::OracleMismatch, "closed-form critical value with no gradient-oracle partner");
    used[best] = 1;
  }
  return vals;
}

/// Critical points ordered by value index, then by arg x in [0, 2pi). This is
/// the indexing of the distinguished basis.
inline std::vector<CriticalPoint> critical_points(const Potential& p, double rel_tol = 1e-9) {
  const auto vals = critical_values(p, rel_tol);
  auto pts = critical_points_oracle(p);
  for (auto& cp : pts) {
    double best = INFINITY;
    for (const auto& v : vals)
      if (std::abs(v.t - cp.t) < best) {
        best = std::abs(v.t - cp.t);
        cp.value_index = v.index;
      }
  }
  auto argkey = [](cplx z) {
    double a = std::arg(z);
    if (a < -1e-12) a += 2 * std::numbers::pi;
    return std::max(a, 0.0);
  };
  std::sort(pts.begin(), pts.end(), [&](const CriticalPoint& u, const CriticalPoint& w) {
    if (u.value_index != w.value_index) return u.value_index < w.value_index;
    return argkey(u.x) < argkey(w.x);
  });
  return pts;
}

// ---------------------------------------------------------------------------
// K0 action

/// (x, y) -> (alpha x, beta y) with (alpha, beta) = exp(2 pi i theta).
/// W(alpha x, beta y) = alpha^a W(x, y) for theta in K0.
inline cplx k0_multiplier(const NormalizedTriangle& nt, const RotationPair& th) {
  return unit((Rational(nt.a) * th[0]).mod1().to_double());
}

inline CriticalValue k0_action(const Potential& p, const RotationPair& th, const CriticalValue& cv,
                               const std::vector<CriticalValue>& values, double rel_tol = 1e-9) {
  if (!annihilates(p.nt.psi(), th)) throw Error(ErrorCode::NotInOrbit, "rotation pair is not in K0");
  const cplx img = k0_multiplier(p.nt, th) * cv.t;
  for (const auto& v : values)
    if (std::abs(v.t - img) <= rel_tol * std::max(1.0, std::abs(img))) return v;
  throw Error(ErrorCode::NotInOrbit, "image matches no critical value");
}

inline CriticalPoint k0_action(const Potential& p, const RotationPair& th, const CriticalPoint& cp) {
  if (!annihilates(p.nt.psi(), th)) throw Error(ErrorCode::NotInOrbit, "rotation pair is not in K0");
  const cplx x = unit(th[0].to_double()) * cp.x, y = unit(th[1].to_double()) * cp.y;
  return {x, y, p(x, y), cp.value_index};
}

// ---------------------------------------------------------------------------
// Branch points and continuation

struct TraceOptions {
  RootOptions root;
  double max_step = 0.02;    // in the path parameter s in [0, 1]
  double continuity = 0.25;  // accept a step when every root moves < continuity * min root separation
  double terminal = 1e-13;   // a path ending at a critical value stops at s = 1 - terminal
  double collision = 1e-6;   // merged pair: distance < collision * root scale
  double ambiguity = 1e-12;
  double min_step = 1e-15;
};

struct BranchSet {
  cplx t;
  std::vector<cplx> roots;
  double residual = 0;
  double newton_step = 0;
};

/// The N roots of K (x^a - t)^g x^h - 1. When d = gcd(c, e) > 1 the curve is
/// a function of y^d and this polynomial is the d-th power of the true
/// condition: only N/d roots ramify (d double roots in y over each), the rest
/// are where the two double-root equations disagree by a d-th root of unity.
inline BranchSet branch_points(const Potential& p, cplx t, const RootOptions& opt = {},
                               const std::vector<cplx>* warm = nullptr) {
  RootResult rr = find_roots(p.branch_polynomial(t), opt, warm);
  if (!(rr.newton_step < opt.tol))
    throw Error(ErrorCode::RootFindingFailure, "branch polynomial roots did not converge");
  if (!warm) sort_by_argument(rr.roots);
  return {t, std::move(rr.roots), rr.residual, rr.newton_step};
}

/// Common modulus of the branch points at t = 0, (g^g / (c^c e^e))^{1/N}.
inline double branch_radius_t0(const NormalizedTriangle& nt) {
  const double c = double(nt.c), e = double(nt.e), g = double(nt.g());
  return std::exp((g * std::log(g) - c * std::log(c) - e * std::log(e)) / double(nt.N()));
}

struct CollisionEvent {
  std::size_t step = 0;
  int i = 0, j = 0;
  cplx point;
  double distance = 0;
};

struct Trajectory {
  cplx t_start, t_end;
  std::vector<double> s;                    // path parameter per sample
  std::vector<std::vector<cplx>> samples;   // samples[k][label]
  std::vector<CollisionEvent> collisions;

  cplx t_at(std::size_t k) const { return t_start + s[k] * (t_end - t_start); }
  std::size_t root_count() const { return samples.empty() ? 0 : samples[0].size(); }
  std::vector<cplx> path_of(int label) const {
    std::vector<cplx> out;
    for (const auto& smp : samples) out.push_back(smp[label]);
    return out;
  }
};

inline double min_separation(const std::vector<cplx>& z) {
  double m = INFINITY;
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) m = std::min(m, std::abs(z[i] - z[j]));
  return m;
}

inline double root_scale(const std::vector<cplx>& z) {
  double s = 0;
  for (cplx w : z) s += std::abs(w);
  return z.empty() ? 1.0 : std::max(s / double(z.size()), 1e-300);
}

/// Follows the roots of the branch polynomial along t_start -> t_end. Step
/// control: a step is accepted when no root moves more than `continuity` times
/// the smallest pairwise distance; roots are matched to their predecessors by
/// minimum total displacement.
inline Trajectory trace_branch_points(const Potential& p, cplx t_start, cplx t_end, const TraceOptions& opt = {}) {
  Trajectory tr{t_start, t_end, {0.0}, {branch_points(p, t_start, opt.root).roots}, {}};
  if (t_start == t_end) {
    tr.s.push_back(1.0);
    tr.samples.push_back(tr.samples[0]);
    return tr;
  }
  double s = 0, ds = opt.max_step / 2;
  while (s < 1.0 && 1.0 - s >= opt.terminal) {
    ds = std::min({ds, 1.0 - s, opt.max_step});
    const auto& prev = tr.samples.back();
    const double dmin = min_separation(prev);
    while (true) {
      const cplx t = t_start + (s + ds) * (t_end - t_start);
      const BranchSet bs = branch_points(p, t, opt.root, &prev);
      const double scale = root_scale(bs.roots);
      auto next = match_roots(prev, bs.roots, opt.ambiguity * scale, opt.collision * scale);
      double disp = 0;
      for (std::size_t i = 0; i < next.size(); ++i) disp = std::max(disp, std::abs(next[i] - prev[i]));
      if (disp < opt.continuity * dmin || disp == 0.0) {
        s += ds;
        tr.s.push_back(s);
        tr.samples.push_back(std::move(next));
        ds *= 1.5;
        break;
      }
      if (ds < opt.min_step) {
        // forced step: only legitimate at a merged pair at either end
        if (s > 1e-6 && 1.0 - s > 1e-6)
          throw Error(ErrorCode::ContinuityLoss, "step refinement exhausted at s = " + std::to_string(s));
        s += ds;
        tr.s.push_back(s);
        tr.samples.push_back(std::move(next));
        break;
      }
      ds /= 2;
    }
  }
  if (1.0 - s < 1e-8) {
    const auto& last = tr.samples.back();
    const double scale = root_scale(last);
    for (std::size_t i = 0; i < last.size(); ++i)
      for (std::size_t j = i + 1; j < last.size(); ++j) {
        const double dist = std::abs(last[i] - last[j]);
        if (dist < opt.collision * scale) {
          // the merge point is a simple root of p'; Newton from the pair midpoint
          const Poly dp = derivative(p.branch_polynomial(t_end));
          const Poly ddp = derivative(dp);
          cplx z = 0.5 * (last[i] + last[j]);
          for (int it = 0; it < 8; ++it) {
            const cplx step = horner(dp, z) / horner(ddp, z);
            z -= step;
            if (std::abs(step) < 1e-16 * std::abs(z)) break;
          }
          if (std::abs(z - 0.5 * (last[i] + last[j])) > dist + 1e-8 * scale) z = 0.5 * (last[i] + last[j]);
          tr.collisions.push_back({tr.samples.size() - 1, int(i), int(j), z, dist});
        }
      }
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Matching paths

struct MatchingPath {
  CriticalPoint critical;
  std::vector<cplx> polyline;              // from endpoints[0] to endpoints[1]
  std::array<cplx, 2> endpoints;           // two branch points of the t = 0 fiber
  std::array<int, 2> labels{};             // their labels in `trace`
  cplx collision;
  std::array<std::vector<cplx>, 2> trajectories;  // pre-collision paths of the pair, t = 0 -> critical value
  std::array<cplx, 2> ramification_y;      // y of the ramification point above each endpoint
  Trajectory trace;
};

/// y-values where two sheets of the fiber over a branch point x meet:
/// y^c = -e B / (g A) and y^e = -g / (c B).
inline std::vector<cplx> ramification_candidates(const Potential& p, cplx x, cplx t) {
  const auto& nt = p.nt;
  const cplx A = p.A(x), B = p.B(x, t);
  const cplx yc = -double(nt.e) * B / (double(p.g()) * A), ye = -double(p.g()) / (double(nt.c) * B);
  const Bezout bz = extended_gcd(nt.c, nt.e);
  const cplx base = std::pow(ipow(yc, bz.x) * ipow(ye, bz.y), 1.0 / double(bz.g));
  std::vector<cplx> out;
  for (Int j = 0; j < bz.g; ++j) out.push_back(base * unit(double(j) / double(bz.g)));
  return out;
}

namespace detail {

/// Moves a curve along with the branch points from sample k to k-1, by the
/// inverse-square-distance weighted average of the branch point motions; the
/// origin and a weak far field stay fixed. Re-sampled to keep spacing below
/// a few percent of the distance to the nearest branch point.
inline std::vector<cplx> transport_arc(const Trajectory& tr, int i, int j, double max_len = 0.02) {
  const std::size_t M = tr.samples.size() - 1;
  std::vector<cplx> arc;
  for (int f = 0; f <= 4; ++f) arc.push_back(tr.samples[M][i] + (tr.samples[M][j] - tr.samples[M][i]) * (f / 4.0));
  for (std::size_t k = M; k > 0; --k) {
    const auto& B0 = tr.samples[k];
    const auto& B1 = tr.samples[k - 1];
    std::vector<cplx> moved;
    moved.reserve(arc.size());
    for (cplx x : arc) {
      double wsum = 1e-6;  // far field, zero motion
      cplx msum = 0;
      bool pinned = false;
      for (std::size_t b = 0; b <= B0.size(); ++b) {
        const cplx anchor = b < B0.size() ? B0[b] : cplx(0);
        const cplx motion = b < B0.size() ? B1[b] - B0[b] : cplx(0);
        const double dd = std::abs(x - anchor);
        if (dd < 1e-300) {
          moved.push_back(x + motion);
          pinned = true;
          break;
        }
        const double w = 1.0 / (dd * dd);
        wsum += w;
        msum += w * motion;
      }
      if (!pinned) moved.push_back(x + msum / wsum);
    }
    moved.front() = B1[i];
    moved.back() = B1[j];

    const double sep = std::abs(B1[i] - B1[j]);
    std::vector<cplx> refined{moved.front()};
    for (std::size_t q = 1; q < moved.size(); ++q) {
      const cplx a = moved[q - 1], b = moved[q];
      double dmin = std::min(std::abs(a), std::abs(b));
      for (cplx z : B1) dmin = std::min({dmin, std::abs(z - a), std::abs(z - b)});
      const double len = std::abs(b - a);
      const double lim = std::max(std::min(max_len, 0.3 * std::max(dmin, 0.05 * sep)), 1e-9);
      int n = len > lim ? int(std::ceil(len / lim)) : 1;
      n = std::min(n, 50);
      for (int f = 1; f < n; ++f) refined.push_back(a + (b - a) * (double(f) / n));
      refined.push_back(b);
    }
    std::vector<cplx> coarse{refined.front()};
    for (std::size_t q = 1; q + 1 < refined.size(); ++q)
      if (std::abs(refined[q] - coarse.back()) > 0.2 * max_len) coarse.push_back(refined[q]);
    coarse.push_back(refined.back());
    arc = std::move(coarse);
  }
  return arc;
}

}  // namespace detail

/// The matching path of a critical point: trace the branch points from t = 0 to
/// the critical value, find the pair that merges at the critical point, and
/// carry the collapsing segment back to t = 0 by the motion of the branch
/// points. The pair's raw trajectories are kept alongside.
inline MatchingPath matching_path(const Potential& p, const CriticalPoint& cp, const TraceOptions& opt = {}) {
  MatchingPath mp;
  mp.critical = cp;
  mp.trace = trace_branch_points(p, 0.0, cp.t, opt);
  const auto& tr = mp.trace;

  // the collision event nearest to the critical point's x
  const CollisionEvent* ev = nullptr;
  for (const auto& c : tr.collisions)
    if (!ev || std::abs(c.point - cp.x) < std::abs(ev->point - cp.x)) ev = &c;
  if (!ev || std::abs(ev->point - cp.x) > 1e-5 * std::max(1.0, std::abs(cp.x)))
    throw Error(ErrorCode::ContinuityLoss, "no merging branch pair at the critical point");
  int li = ev->i, lj = ev->j;
  auto rel_arg = [&](int l) { return std::arg(tr.samples.front()[l] / ev->point); };
  if (rel_arg(li) > rel_arg(lj)) std::swap(li, lj);
  mp.labels = {li, lj};
  mp.collision = ev->point;
  mp.endpoints = {tr.samples.front()[li], tr.samples.front()[lj]};
  mp.trajectories = {tr.path_of(li), tr.path_of(lj)};

  for (int side = 0; side < 2; ++side) {
    cplx yb = cp.y;
    const auto& path = mp.trajectories[side];
    for (std::size_t k = path.size(); k-- > 0;) {
      const auto cands = ramification_candidates(p, path[k], tr.t_at(k));
      yb = *std::min_element(cands.begin(), cands.end(),
                             [&](cplx u, cplx w) { return std::abs(u - yb) < std::abs(w - yb); });
    }
    mp.ramification_y[side] = yb;
  }
  mp.polyline = detail::transport_arc(tr, li, lj);
  return mp;
}

}  // namespace mdk
