#pragma once

// End-to-end check of the dimer/vanishing-cycle correspondence for a
// triangle: lift each matching path to a vanishing cycle on W^-1(0), project
// it to the torus, read off the dimer edges it passes through, and compare
// faces, intersections, nodes and the characteristic polygon.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mdk/coamoeba.hpp"
#include "mdk/dimer.hpp"
#include "mdk/lattice.hpp"
#include "mdk/parallel.hpp"
#include "mdk/potential.hpp"

namespace mdk {

struct VerifyOptions {
  TraceOptions trace;
  double lift_continuity = 0.25;  // sheet step < this * min separation of the fiber roots
  double max_arg_step = 0.004;    // torus units per accepted lifting step
  double min_lift_step = 1e-12;
  double crossing_tol = 1e-6;     // x-plane coincidence of shared endpoints
  double sheet_match = 1e-3;      // relative y agreement at an x-plane crossing
  double eps_band = 0.02;         // reported distance scale for face regions
};

namespace detail {
inline double circ(double u) { return u - std::round(u); }
inline double turns(cplx z) { return std::arg(z) / (2 * std::numbers::pi); }
inline std::size_t nearest(const std::vector<cplx>& r, cplx y) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.size(); ++i)
    if (std::abs(r[i] - y) < std::abs(r[best] - y)) best = i;
  return best;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Lifting

/// Vanishing cycle over a matching path in the t = 0 fiber: the two sheets
/// that meet above both endpoints, each followed along the whole path.
struct VanishingCycle {
  int index = 0;
  MatchingPath path;
  std::vector<cplx> x;       // x[0], x.back() are the path endpoints
  std::vector<cplx> sheet1;  // y over x; sheet1 and sheet2 agree at both ends
  std::vector<cplx> sheet2;
  double closing_error = 0;  // distance of the tracked sheets from the far ramification point
  int forced_steps = 0;
};

inline VanishingCycle lift_vanishing_cycle(const Potential& p, const MatchingPath& mp, const VerifyOptions& opt = {}) {
  const auto& arc = mp.polyline;
  const std::size_t n = arc.size();
  if (n < 2) throw Error(ErrorCode::SheetTrackingFailure, "matching path has fewer than two points");
  // cluster samples geometrically toward both ramification points, where y ~ sqrt(x - x0)
  static constexpr double head[] = {1e-6, 1e-4, 1e-2, 0.1, 0.5};
  std::vector<cplx> X;
  for (double f : head) X.push_back(arc[0] + (arc[1] - arc[0]) * f);
  for (std::size_t k = 1; k + 1 < n; ++k) X.push_back(arc[k]);
  for (int q = 4; q >= 0; --q) X.push_back(arc[n - 1] + (arc[n - 2] - arc[n - 1]) * head[q]);

  const cplx yb1 = mp.ramification_y[0], yb2 = mp.ramification_y[1];
  std::vector<cplx> cur = fiber_roots(p, X[0]);
  std::vector<std::size_t> order(cur.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t u, std::size_t w) { return std::abs(cur[u] - yb1) < std::abs(cur[w] - yb1); });

  VanishingCycle vc;
  vc.path = mp;
  vc.x = {arc[0], X[0]};
  vc.sheet1 = {yb1, cur[order[0]]};
  vc.sheet2 = {yb1, cur[order[1]]};
  for (std::size_t k = 1; k < X.size(); ++k) {
    const cplx x0 = X[k - 1], x1 = X[k];
    double s = 0, ds = 1;
    while (1.0 - s > 1e-15) {
      ds = std::min(ds, 1.0 - s);
      const cplx xn = x0 + (x1 - x0) * (s + ds);
      const auto r = fiber_roots(p, xn, 0.0, &cur);
      const std::size_t a1 = detail::nearest(r, vc.sheet1.back()), a2 = detail::nearest(r, vc.sheet2.back());
      const double sep = min_separation(cur);
      const double disp = std::max(std::abs(r[a1] - vc.sheet1.back()), std::abs(r[a2] - vc.sheet2.back()));
      const double dth = std::max({std::abs(detail::circ(detail::turns(xn) - detail::turns(vc.x.back()))),
                                   std::abs(detail::circ(detail::turns(r[a1]) - detail::turns(vc.sheet1.back()))),
                                   std::abs(detail::circ(detail::turns(r[a2]) - detail::turns(vc.sheet2.back())))});
      const bool ok = disp < opt.lift_continuity * sep && a1 != a2 && dth < opt.max_arg_step;
      if (ok || ds < opt.min_lift_step) {
        if (!ok) {
          if (a1 == a2) throw Error(ErrorCode::SheetTrackingFailure, "the two sheets collapsed onto one root");
          ++vc.forced_steps;
        }
        s += ds;
        vc.x.push_back(xn);
        vc.sheet1.push_back(r[a1]);
        vc.sheet2.push_back(r[a2]);
        cur = r;
        ds *= 2;
      } else {
        ds /= 2;
      }
    }
  }
  // both sheets must arrive at the pair of roots that meet above the far endpoint
  std::vector<std::size_t> far(cur.size());
  std::iota(far.begin(), far.end(), 0);
  std::sort(far.begin(), far.end(),
            [&](std::size_t u, std::size_t w) { return std::abs(cur[u] - yb2) < std::abs(cur[w] - yb2); });
  const std::set<std::size_t> got{detail::nearest(cur, vc.sheet1.back()), detail::nearest(cur, vc.sheet2.back())};
  if (got != std::set<std::size_t>{far[0], far[1]})
    throw Error(ErrorCode::SheetTrackingFailure, "sheets do not close up at the far ramification point");
  vc.closing_error = std::abs(vc.sheet1.back() - yb2) + std::abs(vc.sheet2.back() - yb2);
  vc.x.push_back(arc[n - 1]);
  vc.sheet1.push_back(yb2);
  vc.sheet2.push_back(yb2);
  return vc;
}

// ---------------------------------------------------------------------------
// Projection

struct TorusCurve {
  int source = 0;
  std::vector<std::array<double, 2>> points;  // unwrapped; the loop closes to points[0] + winding
  Vec2i winding;
  std::vector<cplx> x, y;  // the closed loop on the surface, same length as points

  std::vector<TorusPoint> reduced() const {
    std::vector<TorusPoint> out;
    for (const auto& q : points) out.push_back(TorusPoint::reduced(q[0], q[1]));
    return out;
  }
};

/// Arg projection of sheet1 forward followed by sheet2 backward.
inline TorusCurve project_cycle(const VanishingCycle& vc) {
  TorusCurve tc;
  tc.source = vc.index;
  const std::size_t n = vc.x.size();
  for (std::size_t k = 0; k < n; ++k) {
    tc.x.push_back(vc.x[k]);
    tc.y.push_back(vc.sheet1[k]);
  }
  for (std::size_t k = n - 1; k-- > 1;) {
    tc.x.push_back(vc.x[k]);
    tc.y.push_back(vc.sheet2[k]);
  }
  std::array<double, 2> th{detail::turns(tc.x[0]), detail::turns(tc.y[0])};
  tc.points.push_back(th);
  for (std::size_t k = 1; k < tc.x.size(); ++k) {
    th[0] += detail::circ(detail::turns(tc.x[k]) - detail::turns(tc.x[k - 1]));
    th[1] += detail::circ(detail::turns(tc.y[k]) - detail::turns(tc.y[k - 1]));
    tc.points.push_back(th);
  }
  const double w1 = th[0] + detail::circ(detail::turns(tc.x[0]) - detail::turns(tc.x.back())) - tc.points[0][0];
  const double w2 = th[1] + detail::circ(detail::turns(tc.y[0]) - detail::turns(tc.y.back())) - tc.points[0][1];
  tc.winding = {Int(std::llround(w1)), Int(std::llround(w2))};
  return tc;
}

inline TorusCurve translate(const TorusCurve& c, double d1, double d2) {
  TorusCurve out = c;
  for (auto& q : out.points) {
    q[0] += d1;
    q[1] += d2;
  }
  return out;
}

/// Max over samples of the torus distance; curves of different length are
/// compared by the symmetric discrete Hausdorff distance instead.
inline double curve_distance(const TorusCurve& a, const TorusCurve& b, bool* pointwise = nullptr) {
  const auto ra = a.reduced(), rb = b.reduced();
  double d = 0;
  if (ra.size() == rb.size()) {
    if (pointwise) *pointwise = true;
    for (std::size_t i = 0; i < ra.size(); ++i) d = std::max(d, torus_distance(ra[i], rb[i]));
    return d;
  }
  if (pointwise) *pointwise = false;
  auto one_side = [](const std::vector<TorusPoint>& u, const std::vector<TorusPoint>& w) {
    double m = 0;
    for (const auto& p : u) {
      double best = INFINITY;
      for (const auto& q : w) best = std::min(best, torus_distance(p, q));
      m = std::max(m, best);
    }
    return m;
  };
  return std::max(one_side(ra, rb), one_side(rb, ra));
}

// ---------------------------------------------------------------------------
// Edge walk

/// Node of the hexagonal dimer whose coamoeba triangle contains a torus point.
class TriangleClassifier {
 public:
  explicit TriangleClassifier(const NormalizedTriangle& nt) : psi_(nt.psi()), idx_(nt.psi()), n_(int(nt.N())) {}

  std::optional<int> node_of(double t1, double t2) const {
    const auto img = apply(psi_, TorusPoint{t1, t2});
    if (standard_solve(img[0], img[1]).m != Membership::Interior) return std::nullopt;
    const Vec2i m{Int(std::floor(img[0])), Int(std::floor(img[1]))};
    const bool plus = img[1] - std::floor(img[1]) > 0.5;
    return plus ? idx_(m) : n_ + idx_(m);
  }

 private:
  Mat2i psi_;
  CosetIndex idx_;
  int n_;
};

struct CycleWalk {
  struct Run {
    int node;
    std::size_t first, last;  // sample range
  };
  std::vector<Run> runs;
  std::vector<int> transitions;  // dimer edge crossed between consecutive runs (cyclically); -1 = jump
  int jumps = 0;
  std::vector<int> reduced;      // transitions with backtracking cancelled, cyclically
  std::set<int> visited_nodes;
};

inline std::vector<int> free_reduce(const std::vector<int>& w) {
  std::vector<int> out;
  for (int k : w) {
    if (!out.empty() && out.back() == k)
      out.pop_back();
    else
      out.push_back(k);
  }
  std::size_t lo = 0, hi = out.size();
  while (hi - lo > 1 && out[lo] == out[hi - 1]) {
    ++lo;
    --hi;
  }
  return {out.begin() + std::ptrdiff_t(lo), out.begin() + std::ptrdiff_t(hi)};
}

/// Runs of samples in the same coamoeba triangle; each change of triangle is
/// attributed to the edge through the nearest shared vertex point.
inline CycleWalk walk_curve(const TriangleClassifier& cls, const DimerModel& G, const TorusCurve& c) {
  CycleWalk w;
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto node = cls.node_of(c.points[i][0], c.points[i][1]);
    if (!node) continue;
    w.visited_nodes.insert(*node);
    if (!w.runs.empty() && w.runs.back().node == *node)
      w.runs.back().last = i;
    else
      w.runs.push_back({*node, i, i});
  }
  std::map<std::pair<int, int>, std::vector<int>> between;
  for (int k = 0; k < int(G.edges.size()); ++k) between[{G.edges[k].white, G.edges[k].black}].push_back(k);
  for (std::size_t r = 0; r < w.runs.size(); ++r) {
    const auto& r0 = w.runs[r];
    const auto& r1 = w.runs[(r + 1) % w.runs.size()];
    if (r0.node == r1.node) continue;
    const auto& pa = c.points[r0.last];
    const auto& pb = c.points[r1.first];
    const TorusPoint mid = TorusPoint::reduced(pa[0] + 0.5 * detail::circ(pb[0] - pa[0]),
                                               pa[1] + 0.5 * detail::circ(pb[1] - pa[1]));
    const int wn = G.nodes[r0.node].color == Color::White ? r0.node : r1.node;
    const int bn = wn == r0.node ? r1.node : r0.node;
    auto it = between.find({wn, bn});
    if (G.nodes[wn].color != Color::White || G.nodes[bn].color != Color::Black || it == between.end()) {
      w.transitions.push_back(-1);
      ++w.jumps;
      continue;
    }
    int best = it->second.front();
    for (int k : it->second)
      if (torus_distance(mid, TorusPoint::of(G.edges[k].vertex_point)) <
          torus_distance(mid, TorusPoint::of(G.edges[best].vertex_point)))
        best = k;
    w.transitions.push_back(best);
  }
  w.reduced = free_reduce(w.transitions);
  return w;
}

// ---------------------------------------------------------------------------
// Faces and intersections

/// True when the cyclic sequences agree up to rotation and reversal.
inline bool same_cycle(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  const std::size_t n = a.size();
  if (n == 0) return true;
  for (int dir : {1, -1})
    for (std::size_t s = 0; s < n; ++s) {
      bool eq = true;
      for (std::size_t i = 0; i < n && eq; ++i) {
        const std::size_t j = dir == 1 ? (s + i) % n : (s + n - i) % n;
        eq = a[i] == b[j];
      }
      if (eq) return true;
    }
  return false;
}

struct FaceAssignment {
  std::vector<int> face_of_curve;
  std::vector<int> curve_of_face;
  std::vector<bool> cyclic_order;  // walk runs around the face boundary in order
};

/// Each curve goes to the face whose boundary edges are exactly the edges
/// its walk crosses.
inline FaceAssignment cycle_face_bijection(const std::vector<CycleWalk>& walks, const DimerModel& G,
                                           const std::vector<Face>& fs) {
  if (walks.size() != fs.size())
    throw Error(ErrorCode::NotBijective,
                std::to_string(walks.size()) + " curves for " + std::to_string(fs.size()) + " faces");
  FaceAssignment fa;
  fa.curve_of_face.assign(fs.size(), -1);
  for (std::size_t i = 0; i < walks.size(); ++i) {
    const auto& w = walks[i];
    if (w.jumps > 0)
      throw Error(ErrorCode::NotBijective, "curve " + std::to_string(i) + " jumps between non-adjacent triangles");
    const std::set<int> es(w.reduced.begin(), w.reduced.end());
    int found = -1;
    for (std::size_t f = 0; f < fs.size(); ++f)
      if (es.size() == w.reduced.size() && fs[f].edge_set() == es) found = int(f);
    if (found < 0) throw Error(ErrorCode::NotBijective, "curve " + std::to_string(i) + " fits no face");
    if (fa.curve_of_face[found] >= 0)
      throw Error(ErrorCode::NotBijective, "curves " + std::to_string(fa.curve_of_face[found]) + " and " +
                                               std::to_string(i) + " claim face " + std::to_string(found));
    fa.curve_of_face[found] = int(i);
    fa.face_of_curve.push_back(found);
    fa.cyclic_order.push_back(same_cycle(w.reduced, fs[found].edges()));
  }
  (void)G;
  return fa;
}

using IntMatrixI = std::vector<std::vector<int>>;

struct SurfaceIntersection {
  int signed_count = 0;
  int raw_count = 0;
};

namespace detail {

struct SegHit {
  std::size_t i, j;
  double u, v;
};

inline std::vector<SegHit> segment_crossings(const std::vector<cplx>& P, const std::vector<cplx>& Q) {
  std::vector<SegHit> out;
  for (std::size_t i = 0; i + 1 < P.size(); ++i) {
    const cplx a = P[i], b = P[i + 1], r = b - a;
    const double xlo = std::min(a.real(), b.real()), xhi = std::max(a.real(), b.real());
    const double ylo = std::min(a.imag(), b.imag()), yhi = std::max(a.imag(), b.imag());
    for (std::size_t j = 0; j + 1 < Q.size(); ++j) {
      const cplx c = Q[j], d = Q[j + 1];
      if (std::max(c.real(), d.real()) < xlo || std::min(c.real(), d.real()) > xhi ||
          std::max(c.imag(), d.imag()) < ylo || std::min(c.imag(), d.imag()) > yhi)
        continue;
      const cplx s = d - c, qp = c - a;
      const double den = r.real() * s.imag() - r.imag() * s.real();
      if (den == 0) continue;
      const double u = (qp.real() * s.imag() - qp.imag() * s.real()) / den;
      const double v = (qp.real() * r.imag() - qp.imag() * r.real()) / den;
      if (u >= 0 && u < 1 && v >= 0 && v < 1) out.push_back({i, j, u, v});
    }
  }
  return out;
}

inline int sgn(double v) { return (v > 0) - (v < 0); }

}  // namespace detail

/// Intersection number of two lifted cycles, with the complex orientation of
/// the surface. Away from ramification points x is a local coordinate and a
/// crossing of the x-paths with matching y contributes sign Im(conj(v_i) v_j)
/// of the tangents (sheet2 is traversed backwards). A shared ramification
/// point is resolved in the y coordinate by the departing directions.
inline SurfaceIntersection surface_intersection(const VanishingCycle& ci, const VanishingCycle& cj,
                                                const VerifyOptions& opt = {}) {
  SurfaceIntersection out;
  struct End {
    cplx x, y, v;
  };
  auto ends = [](const VanishingCycle& c) {
    const std::size_t n = c.x.size();
    return std::array<End, 2>{End{c.x[0], c.sheet1[0], c.sheet1[1] - c.sheet1[0]},
                              End{c.x[n - 1], c.sheet1[n - 1], c.sheet2[n - 2] - c.sheet2[n - 1]}};
  };
  for (const auto& ei : ends(ci))
    for (const auto& ej : ends(cj))
      if (std::abs(ei.x - ej.x) < opt.crossing_tol * std::max(1.0, std::abs(ei.x)) &&
          std::abs(ei.y - ej.y) < 1e-6 * std::max(1.0, std::abs(ei.y))) {
        out.signed_count += detail::sgn((std::conj(ei.v) * ej.v).imag());
        ++out.raw_count;
      }
  const std::array<cplx, 4> endpoints{ci.x.front(), ci.x.back(), cj.x.front(), cj.x.back()};
  for (const auto& hit : detail::segment_crossings(ci.x, cj.x)) {
    const cplx x = ci.x[hit.i] + (ci.x[hit.i + 1] - ci.x[hit.i]) * hit.u;
    bool near_end = false;
    for (cplx e : endpoints) near_end = near_end || std::abs(x - e) < 1e-5;
    if (near_end) continue;
    const cplx di = ci.x[hit.i + 1] - ci.x[hit.i], dj = cj.x[hit.j + 1] - cj.x[hit.j];
    const std::array<std::pair<cplx, double>, 2> ys_i{
        std::pair{ci.sheet1[hit.i] + (ci.sheet1[hit.i + 1] - ci.sheet1[hit.i]) * hit.u, 1.0},
        std::pair{ci.sheet2[hit.i] + (ci.sheet2[hit.i + 1] - ci.sheet2[hit.i]) * hit.u, -1.0}};
    const std::array<std::pair<cplx, double>, 2> ys_j{
        std::pair{cj.sheet1[hit.j] + (cj.sheet1[hit.j + 1] - cj.sheet1[hit.j]) * hit.v, 1.0},
        std::pair{cj.sheet2[hit.j] + (cj.sheet2[hit.j + 1] - cj.sheet2[hit.j]) * hit.v, -1.0}};
    for (const auto& [yp, si] : ys_i)
      for (const auto& [yq, sj] : ys_j)
        if (std::abs(yp - yq) < opt.sheet_match * std::max(1.0, std::abs(yp))) {
          out.signed_count += detail::sgn((std::conj(si * di) * (sj * dj)).imag());
          ++out.raw_count;
        }
  }
  return out;
}

struct IntersectionData {
  IntMatrixI shared_edges;      // faces bij(i), bij(j): dimer edges in common
  IntMatrixI vertex_crossings;  // edges crossed by both projected walks
  IntMatrixI signed_arrows;     // quiver arrows bij(i) -> bij(j) minus bij(j) -> bij(i)
  IntMatrixI signed_surface;    // algebraic intersection of the lifted cycles
  IntMatrixI raw_surface;       // unsigned crossings of the numerical representatives (not minimal)
};

inline IntMatrixI shared_edge_counts(const DimerModel& G, const std::vector<Face>& fs, const FaceAssignment& fa) {
  const auto fod = face_of_dart(fs);
  const std::size_t n = fa.face_of_curve.size();
  IntMatrixI m(n, std::vector<int>(n, 0));
  for (int k = 0; k < int(G.edges.size()); ++k) {
    const int f1 = fod.at(Dart{k, G.edges[k].white}), f2 = fod.at(Dart{k, G.edges[k].black});
    if (f1 == f2) continue;
    const int i = fa.curve_of_face[f1], j = fa.curve_of_face[f2];
    ++m[i][j];
    ++m[j][i];
  }
  return m;
}

/// Combinatorial counts from the dimer against geometric counts from the
/// cycles; CountMismatch when they differ.
inline IntersectionData intersection_counts(const DimerModel& G, const std::vector<Face>& fs, const FaceAssignment& fa,
                                            const std::vector<CycleWalk>& walks,
                                            const std::vector<VanishingCycle>& cycles, const VerifyOptions& opt = {}) {
  const std::size_t n = fa.face_of_curve.size();
  IntersectionData d;
  d.shared_edges = shared_edge_counts(G, fs, fa);
  d.vertex_crossings.assign(n, std::vector<int>(n, 0));
  d.signed_arrows.assign(n, std::vector<int>(n, 0));
  d.signed_surface.assign(n, std::vector<int>(n, 0));
  d.raw_surface.assign(n, std::vector<int>(n, 0));

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::set<int> a(walks[i].reduced.begin(), walks[i].reduced.end());
      for (int k : std::set<int>(walks[j].reduced.begin(), walks[j].reduced.end())) d.vertex_crossings[i][j] += a.count(k);
    }
  const Quiver Q = quiver_with_potential(G);
  for (const auto& arr : Q.arrows) {
    if (arr.source == arr.target) continue;
    const int i = fa.curve_of_face[arr.source], j = fa.curve_of_face[arr.target];
    ++d.signed_arrows[i][j];
    --d.signed_arrows[j][i];
  }
  struct Pair {
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
  const auto si = parallel_map<SurfaceIntersection>(
      pairs.size(), [&](std::size_t k) { return surface_intersection(cycles[pairs[k].i], cycles[pairs[k].j], opt); });
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    d.signed_surface[i][j] = si[k].signed_count;
    d.signed_surface[j][i] = -si[k].signed_count;
    d.raw_surface[i][j] = d.raw_surface[j][i] = si[k].raw_count;
  }
  if (d.shared_edges != d.vertex_crossings)
    throw Error(ErrorCode::CountMismatch, "shared dimer edges differ from vertex crossings of the projected cycles");
  if (d.signed_arrows != d.signed_surface)
    throw Error(ErrorCode::CountMismatch, "signed arrow counts differ from algebraic intersection numbers");
  return d;
}

/// K0 moves the configuration rigidly: the curve of k0(theta) . cp is the
/// curve of cp translated by theta. Returns the largest discrepancy over the
/// group and all curves (pointwise when sample counts agree).
inline double k0_equivariance_error(const Potential& p, const std::vector<CriticalPoint>& cps,
                                    const std::vector<TorusCurve>& curves) {
  double worst = 0;
  for (const auto& th : k0_group(p.nt).elements())
    for (std::size_t i = 0; i < cps.size(); ++i) {
      const CriticalPoint img = k0_action(p, th, cps[i]);
      std::size_t j = 0;
      for (std::size_t k = 1; k < cps.size(); ++k)
        if (std::abs(cps[k].x - img.x) + std::abs(cps[k].y - img.y) <
            std::abs(cps[j].x - img.x) + std::abs(cps[j].y - img.y))
          j = k;
      worst = std::max(worst, curve_distance(translate(curves[i], th[0].to_double(), th[1].to_double()), curves[j]));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Report

struct Bullet {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ConjectureReport {
  LatticeTriangle input;
  std::optional<Normalization> normalization;
  bool ran = false;
  std::optional<ErrorCode> error;
  std::string error_message;
  std::vector<Bullet> bullets;
  bool overall = false;

  int N = 0;
  std::vector<int> face_of_curve;
  IntersectionData intersections;
  LatticePolygon polygon;
  int internal_matchings = 0;
  int internal_with_exact_polygon = 0;
  double max_closing_error = 0;
};

inline const std::array<const char*, 6>& bullet_names() {
  static const std::array<const char*, 6> names{
      "(i) vanishing cycles <-> faces", "(ii) edges <-> intersections",
      "(iii) nodes <-> triangles bounded by cycles", "(iv) node color <-> orientation",
      "(v) image graph is the consistent dimer G", "(vi) characteristic polygon of (G, D) = triangle"};
  return names;
}

/// Everything the report is derived from.
struct VerificationRun {
  std::optional<Normalization> normalization;
  Potential potential;
  std::vector<CriticalPoint> critical;
  std::vector<VanishingCycle> cycles;
  std::vector<TorusCurve> curves;
  DimerModel dimer;
  std::vector<Face> faces;
  std::vector<CycleWalk> walks;
};

/// Matching paths, vanishing cycles and their projections for every critical
/// point, in the order of critical_points.
inline std::vector<VanishingCycle> vanishing_cycles(const Potential& p, const std::vector<CriticalPoint>& cps,
                                                    const VerifyOptions& opt = {}) {
  return parallel_map<VanishingCycle>(cps.size(), [&](std::size_t i) {
    auto vc = lift_vanishing_cycle(p, matching_path(p, cps[i], opt.trace), opt);
    vc.index = int(i);
    return vc;
  });
}

namespace detail {

inline std::string join_ints(const std::vector<int>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

inline void fail_remaining(ConjectureReport& rep, std::size_t from, const std::string& why) {
  for (std::size_t b = from; b < 6; ++b) rep.bullets[b] = {bullet_names()[b], false, why};
}

}  // namespace detail

inline ConjectureReport verify_conjecture(const LatticeTriangle& t, const VerifyOptions& opt = {},
                                          std::optional<int> anchor = std::nullopt,
                                          VerificationRun* run_out = nullptr) {
  ConjectureReport rep;
  rep.input = t;
  rep.bullets.resize(6);
  for (std::size_t b = 0; b < 6; ++b) rep.bullets[b].name = bullet_names()[b];

  VerificationRun run;
  std::size_t stage = 0;  // bullet an exception is attributed to
  try {
    run.normalization = anchor ? normalize_with_anchor(t, *anchor) : normalize(t);
    rep.normalization = run.normalization;
    const auto& nt = run.normalization->nt;
    run.potential = build_potential(nt);
    rep.N = int(nt.N());
    rep.ran = true;

    // (i)
    run.critical = critical_points(run.potential);
    run.cycles = vanishing_cycles(run.potential, run.critical, opt);
    for (const auto& vc : run.cycles) {
      run.curves.push_back(project_cycle(vc));
      rep.max_closing_error = std::max(rep.max_closing_error, vc.closing_error);
    }
    run.dimer = build_hexagonal_dimer(nt);
    run.faces = faces(run.dimer);
    const TriangleClassifier cls(nt);
    for (const auto& c : run.curves) run.walks.push_back(walk_curve(cls, run.dimer, c));
    const FaceAssignment fa = cycle_face_bijection(run.walks, run.dimer, run.faces);
    rep.face_of_curve = fa.face_of_curve;
    int nonzero_winding = 0, in_order = 0;
    for (const auto& c : run.curves) nonzero_winding += c.winding != Vec2i{0, 0};
    for (bool b : fa.cyclic_order) in_order += b;
    rep.bullets[0].pass = nonzero_winding == 0;
    rep.bullets[0].detail = std::to_string(run.curves.size()) + " cycles -> faces [" +
                            detail::join_ints(fa.face_of_curve) + "]; " + std::to_string(in_order) +
                            " walk the boundary in order; " + std::to_string(nonzero_winding) +
                            " with nonzero torus winding";

    // (ii)
    stage = 1;
    rep.intersections = intersection_counts(run.dimer, run.faces, fa, run.walks, run.cycles, opt);
    int total = 0;
    for (const auto& row : rep.intersections.shared_edges)
      for (int v : row) total += v;
    rep.bullets[1] = {bullet_names()[1], true,
                      std::to_string(total / 2) + " shared edges = vertex crossings; signed intersection numbers = "
                                                  "signed arrow counts"};

    // (iii): every node is the triangle between consecutive edges of exactly
    // three walks, which are the walks of the faces around it, and each of
    // those curves passes through that triangle.
    stage = 2;
    const auto fod = face_of_dart(run.faces);
    std::vector<std::vector<int>> bounding(run.dimer.nodes.size());
    bool iii = true;
    std::string iii_detail;
    for (std::size_t i = 0; i < run.walks.size(); ++i) {
      const auto& w = run.walks[i].reduced;
      for (std::size_t k = 0; k < w.size(); ++k) {
        const auto& e1 = run.dimer.edges[w[k]];
        const auto& e2 = run.dimer.edges[w[(k + 1) % w.size()]];
        const int v = e1.white == e2.white ? e1.white : (e1.black == e2.black ? e1.black : -1);
        if (v < 0) {
          iii = false;
          iii_detail = "consecutive walk edges without a common node";
          continue;
        }
        bounding[v].push_back(int(i));
        if (!run.walks[i].visited_nodes.count(v)) {
          iii = false;
          iii_detail = "curve does not enter the triangle it bounds";
        }
      }
    }
    for (const auto& node : run.dimer.nodes) {
      std::vector<int> expect;
      for (int k : run.dimer.rotation[node.id]) expect.push_back(fa.curve_of_face[fod.at(Dart{k, node.id})]);
      auto got = bounding[node.id];
      std::sort(expect.begin(), expect.end());
      std::sort(got.begin(), got.end());
      if (got != expect) {
        iii = false;
        iii_detail = "node " + std::to_string(node.id) + " bounded by cycles [" + detail::join_ints(got) +
                     "], expected [" + detail::join_ints(expect) + "]";
      }
    }
    rep.bullets[2] = {bullet_names()[2], iii,
                      iii ? std::to_string(run.dimer.nodes.size()) + " triangles, each bounded by arcs of 3 cycles"
                          : iii_detail};

    // (iv)
    stage = 3;
    const auto tris = fundamental_triangles(nt);
    const Quiver Q = quiver_with_potential(run.dimer);
    bool iv = true;
    for (const auto& node : run.dimer.nodes) {
      const auto& tri = tris[node.id];
      iv = iv && mod1(tri.barycenter()) == node.exact_pos;
      iv = iv && tri.positive == (node.color == Color::White);
      iv = iv && Q.potential[node.id].sign == (tri.positive ? 1 : -1);
      iv = iv && locate_triangle(tris, node.pos) == tri.index;
    }
    rep.bullets[3] = {bullet_names()[3], iv,
                      "combinatorial only: white = positive coamoeba triangle = + potential term; A-infinity signs "
                      "not checked"};

    // (v)
    stage = 4;
    const ConsistencyReport cons = check_dimer(run.dimer);
    std::map<int, int> edge_use;
    for (const auto& w : run.walks)
      for (int k : std::set<int>(w.reduced.begin(), w.reduced.end())) ++edge_use[k];
    bool each_twice = int(edge_use.size()) == cons.E;
    for (const auto& [k, c] : edge_use) each_twice = each_twice && c == 2;
    const auto verts = nt.vertices();
    const bool zz = cons.zigzag_classes == boundary_classes({verts.begin(), verts.end()});
    const bool counts = cons.V == 2 * rep.N && cons.E == 3 * rep.N && cons.F == rep.N;
    rep.bullets[4] = {bullet_names()[4], cons.consistent && each_twice && zz && counts && iii,
                      "V=" + std::to_string(cons.V) + " E=" + std::to_string(cons.E) + " F=" + std::to_string(cons.F) +
                          (each_twice ? "; every edge crossed by exactly two cycles" : "; edge use mismatch") +
                          (zz ? "; zigzag classes = boundary edge vectors" : "; zigzag classes differ")};

    // (vi)
    stage = 5;
    const LatticePolygon delta = make_polygon({verts.begin(), verts.end()});
    const auto all = perfect_matchings(run.dimer);
    const auto internal = internal_matchings(run.dimer, delta, all);
    rep.internal_matchings = int(internal.size());
    for (const auto& D : internal)
      if (characteristic_polygon(run.dimer, D, all) == delta) ++rep.internal_with_exact_polygon;
    rep.polygon = delta;
    // back in the input coordinates
    const UnimodularMap inv = run.normalization->transform.inverse();
    std::vector<Vec2i> back;
    for (const Vec2i& v : delta.vertices) back.push_back(inv(v));
    const bool input_ok = make_polygon(back) == make_polygon({t.v.begin(), t.v.end()});
    rep.bullets[5] = {bullet_names()[5], rep.internal_with_exact_polygon > 0 && input_ok && delta.interior({0, 0}),
                      std::to_string(all.size()) + " matchings, " + std::to_string(internal.size()) + " internal, " +
                          std::to_string(rep.internal_with_exact_polygon) +
                          " with characteristic polygon equal to the triangle"};
  } catch (const Error& e) {
    rep.error = e.code();
    rep.error_message = e.what();
    detail::fail_remaining(rep, stage, std::string("not established: ") + e.what());
  }
  rep.overall = rep.ran && !rep.error;
  for (const auto& b : rep.bullets) rep.overall = rep.overall && b.pass;
  if (run_out) *run_out = std::move(run);
  return rep;
}

}  // namespace mdk
