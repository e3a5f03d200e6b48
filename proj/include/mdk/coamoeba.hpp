#pragma once

// Coamoeba of W^-1(0) on the torus R^2/Z^2. Multiplying W by x^d y^e gives
// X + Y + 1 with (X, Y) = (x^{a+d} y^e, x^{b+d} y^{c+e}), so the coamoeba is the
// preimage under psi = ((a+d, e), (b+d, c+e)) of the coamoeba of a line: two
// open triangles and three vertices.

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "mdk/lattice.hpp"
#include "mdk/potential.hpp"

namespace mdk {

struct TorusPoint {
  double t1 = 0, t2 = 0;  // rotation numbers in [0,1)

  static TorusPoint reduced(double a, double b) { return {a - std::floor(a), b - std::floor(b)}; }
  static TorusPoint of(const RotationPair& r) { return reduced(r[0].to_double(), r[1].to_double()); }
};

/// Torus distance (sup over coordinates of the circle distance).
inline double torus_distance(TorusPoint p, TorusPoint q) {
  auto circ = [](double u) {
    u = u - std::floor(u);
    return std::min(u, 1.0 - u);
  };
  return std::max(circ(p.t1 - q.t1), circ(p.t2 - q.t2));
}

inline TorusPoint arg_point(cplx x, cplx y) {
  return TorusPoint::reduced(std::arg(x) / (2 * std::numbers::pi), std::arg(y) / (2 * std::numbers::pi));
}

enum class Membership { Interior, Vertex, Exterior };

inline std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::Interior: return "Interior";
    case Membership::Vertex: return "Vertex";
    case Membership::Exterior: return "Exterior";
  }
  return "?";
}

/// Which part of the real line of X + Y + 1 = 0 (parametrized X = t) a vertex covers.
enum class RealPart { Positive, Middle, Negative };  // t > 0, -1 < t < 0, t < -1

inline std::string_view to_string(RealPart r) {
  switch (r) {
    case RealPart::Positive: return "t>0";
    case RealPart::Middle: return "-1<t<0";
    case RealPart::Negative: return "t<-1";
  }
  return "?";
}

inline const std::array<RotationPair, 3>& standard_vertices() {
  static const std::array<RotationPair, 3> v{{{Rational(0), Rational(1, 2)},
                                              {Rational(1, 2), Rational(1, 2)},
                                              {Rational(1, 2), Rational(0)}}};
  return v;  // indexed by RealPart
}

// The two standard triangles, corners listed so that corner i of the positive
// triangle and corner i of the negative one are the same torus point.
inline const std::array<RotationPair, 3>& positive_corners() {
  static const std::array<RotationPair, 3> v{{{Rational(0), Rational(1, 2)},
                                              {Rational(1, 2), Rational(1, 2)},
                                              {Rational(1, 2), Rational(1)}}};
  return v;
}
inline const std::array<RotationPair, 3>& negative_corners() {
  static const std::array<RotationPair, 3> v{{{Rational(1), Rational(1, 2)},
                                              {Rational(1, 2), Rational(1, 2)},
                                              {Rational(1, 2), Rational(0)}}};
  return v;
}
inline RealPart corner_part(int corner) {
  static constexpr RealPart parts[3] = {RealPart::Positive, RealPart::Middle, RealPart::Negative};
  return parts[corner];
}

struct LineSolve {
  Membership m = Membership::Exterior;
  double r1 = 0, r2 = 0, det = 0;
};

/// Decides whether r1 e^{2 pi i t1} + r2 e^{2 pi i t2} = -1 has a transverse
/// solution with r1, r2 > 0; the three real-line vertices are checked first.
inline LineSolve standard_solve(double t1, double t2, double det_tol = 1e-12, double vertex_tol = 1e-12) {
  const TorusPoint pt = TorusPoint::reduced(t1, t2);
  for (const auto& v : standard_vertices())
    if (torus_distance(pt, TorusPoint::of(v)) < vertex_tol) return {Membership::Vertex, 0, 0, 0};
  const cplx e1 = unit(pt.t1), e2 = unit(pt.t2);
  const double det = e1.real() * e2.imag() - e2.real() * e1.imag();
  if (std::abs(det) < det_tol) return {Membership::Exterior, 0, 0, det};
  // Cramer on [[Re e1, Re e2], [Im e1, Im e2]] (r1, r2) = (-1, 0)
  const double r1 = -e2.imag() / det, r2 = e1.imag() / det;
  return {r1 > 0 && r2 > 0 ? Membership::Interior : Membership::Exterior, r1, r2, det};
}

inline Membership standard_membership(TorusPoint pt, double det_tol = 1e-12) {
  return standard_solve(pt.t1, pt.t2, det_tol).m;
}

/// Exact classification for rational points.
inline Membership standard_membership(const RotationPair& pt) {
  const RotationPair r = mod1(pt);
  for (const auto& v : standard_vertices())
    if (mod1(v) == r) return Membership::Vertex;
  return standard_membership(TorusPoint::of(r));
}

inline std::array<double, 2> apply(const Mat2i& M, TorusPoint p) {
  return {double(M.m[0][0]) * p.t1 + double(M.m[0][1]) * p.t2, double(M.m[1][0]) * p.t1 + double(M.m[1][1]) * p.t2};
}

inline RotationPair apply(const Mat2i& M, const RotationPair& p) {
  return {Rational(M.m[0][0]) * p[0] + Rational(M.m[0][1]) * p[1],
          Rational(M.m[1][0]) * p[0] + Rational(M.m[1][1]) * p[1]};
}

/// psi^-1 on rotation numbers, exact.
inline RotationPair apply_inverse(const Mat2i& M, const RotationPair& p) {
  const Int det = M.det();
  const Mat2i adj = Mat2i::rows(M.m[1][1], -M.m[0][1], -M.m[1][0], M.m[0][0]);
  const RotationPair q = apply(adj, p);
  return {q[0] / Rational(det), q[1] / Rational(det)};
}

inline Membership coamoeba_membership(const NormalizedTriangle& nt, TorusPoint pt, double det_tol = 1e-12) {
  const auto img = apply(nt.psi(), pt);
  return standard_solve(img[0], img[1], det_tol).m;
}

// ---------------------------------------------------------------------------
// Fundamental triangles

/// Representatives of Z^2 / M Z^2, smallest lexicographic in [0, |det|)^2.
inline std::vector<Vec2i> coset_representatives(const Mat2i& M) {
  const Int n = int_abs(M.det());
  std::map<RotationPair, Vec2i> seen;
  for (Int i = 0; i < n; ++i)
    for (Int j = 0; j < n; ++j) {
      const RotationPair key = mod1(apply_inverse(M, {Rational(i), Rational(j)}));
      seen.try_emplace(key, Vec2i{i, j});
    }
  std::vector<Vec2i> reps;
  for (const auto& kv : seen) reps.push_back(kv.second);
  std::sort(reps.begin(), reps.end());
  return reps;
}

/// Index of the coset of m among coset_representatives(M).
class CosetIndex {
 public:
  explicit CosetIndex(const Mat2i& M) : M_(M), reps_(coset_representatives(M)) {
    for (std::size_t k = 0; k < reps_.size(); ++k) index_[key(reps_[k])] = int(k);
  }
  int operator()(Vec2i m) const { return index_.at(key(m)); }
  const std::vector<Vec2i>& reps() const { return reps_; }

 private:
  RotationPair key(Vec2i m) const { return mod1(apply_inverse(M_, {Rational(m.x), Rational(m.y)})); }
  Mat2i M_;
  std::vector<Vec2i> reps_;
  std::map<RotationPair, int> index_;
};

struct TorusTriangle {
  std::array<RotationPair, 3> v;  // a coherent lift: psi^-1(corner + m); corner order as in the standard triangle
  bool positive = true;
  Vec2i m;
  int index = 0;

  RotationPair barycenter() const {
    return {(v[0][0] + v[1][0] + v[2][0]) / Rational(3), (v[0][1] + v[1][1] + v[2][1]) / Rational(3)};
  }
  Rational area() const {
    const Rational s = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[1][1] - v[0][1]) * (v[2][0] - v[0][0]);
    const Rational half = s / Rational(2);
    return half < Rational(0) ? -half : half;
  }
};

/// 2N triangles: index k < N is psi^-1(T+ + m_k), index N + k is psi^-1(T- + m_k).
inline std::vector<TorusTriangle> fundamental_triangles(const Mat2i& psi) {
  const auto reps = coset_representatives(psi);
  std::vector<TorusTriangle> out;
  for (int sign = 0; sign < 2; ++sign)
    for (std::size_t k = 0; k < reps.size(); ++k) {
      const auto& corners = sign == 0 ? positive_corners() : negative_corners();
      TorusTriangle tri;
      tri.positive = sign == 0;
      tri.m = reps[k];
      tri.index = int(out.size());
      for (int c = 0; c < 3; ++c)
        tri.v[c] = apply_inverse(psi, {corners[c][0] + Rational(reps[k].x), corners[c][1] + Rational(reps[k].y)});
      out.push_back(tri);
    }
  return out;
}

inline std::vector<TorusTriangle> fundamental_triangles(const NormalizedTriangle& nt) {
  return fundamental_triangles(nt.psi());
}

/// Which fundamental triangle contains pt (open), by the sign of the
/// three edge functions on every integer translate. Independent of the
/// line-coamoeba solve; used to cross-check it.
inline std::optional<int> locate_triangle(const std::vector<TorusTriangle>& tris, TorusPoint pt, double band = 0) {
  for (const auto& tri : tris) {
    std::array<double, 6> c{};
    for (int i = 0; i < 3; ++i) {
      c[2 * i] = tri.v[i][0].to_double();
      c[2 * i + 1] = tri.v[i][1].to_double();
    }
    const double sgn = (c[2] - c[0]) * (c[5] - c[1]) - (c[3] - c[1]) * (c[4] - c[0]) > 0 ? 1.0 : -1.0;
    const double lo1 = std::min({c[0], c[2], c[4]}), lo2 = std::min({c[1], c[3], c[5]});
    for (int s1 = -1; s1 <= 1; ++s1)
      for (int s2 = -1; s2 <= 1; ++s2) {
        const double px = pt.t1 + std::floor(lo1) + s1, py = pt.t2 + std::floor(lo2) + s2;
        bool inside = true;
        for (int i = 0; i < 3 && inside; ++i) {
          const int j = (i + 1) % 3;
          const double e = sgn * ((c[2 * j] - c[2 * i]) * (py - c[2 * i + 1]) - (c[2 * j + 1] - c[2 * i + 1]) * (px - c[2 * i]));
          inside = e > band;
        }
        if (inside) return tri.index;
      }
  }
  return std::nullopt;
}

struct VertexPoint {
  RotationPair pos;  // in [0,1)^2
  RealPart part;
};

/// The 3N vertex points psi^-1(standard vertex + m).
inline std::vector<VertexPoint> vertex_points(const NormalizedTriangle& nt) {
  std::vector<VertexPoint> out;
  const auto reps = coset_representatives(nt.psi());
  for (int part = 0; part < 3; ++part)
    for (const auto& m : reps) {
      const auto& v = standard_vertices()[part];
      out.push_back({mod1(apply_inverse(nt.psi(), {v[0] + Rational(m.x), v[1] + Rational(m.y)})), RealPart(part)});
    }
  return out;
}

/// Membership defined by the explicit triangles and vertex points.
inline Membership triangle_membership(const std::vector<TorusTriangle>& tris,
                                      const std::vector<VertexPoint>& verts, TorusPoint pt, double vertex_tol = 1e-12) {
  for (const auto& v : verts)
    if (torus_distance(pt, TorusPoint::of(v.pos)) < vertex_tol) return Membership::Vertex;
  return locate_triangle(tris, pt) ? Membership::Interior : Membership::Exterior;
}

// ---------------------------------------------------------------------------
// Rays in the x-plane

struct Ray {
  cplx base;          // start point
  double arg = 0;     // argument along the ray
  double r_start = 0; // radial interval [r_start, infinity)
  RealPart part;
  RotationPair vertex;  // standard vertex it covers
};

/// Along X = t real the curve has x^N = t^{c+e} / (-1-t)^e, but when the
/// vertices span a proper sublattice only some of those N arguments carry a
/// vertex preimage (each then carrying several). So the arguments are read
/// off the preimages themselves: one ray per vertex point, at arg 2 pi theta1.
/// For t < -1 the modulus is bounded below by the branch radius, attained at
/// the branch points.
inline std::vector<Ray> vertex_rays(const Potential& p, const BranchSet& at_zero) {
  const auto& nt = p.nt;
  const double rb = branch_radius_t0(nt);
  std::vector<Ray> rays;
  for (const auto& vp : vertex_points(nt)) {
    const double arg = 2 * std::numbers::pi * vp.pos[0].to_double();
    Ray r{0.0, arg, 0.0, vp.part, standard_vertices()[int(vp.part)]};
    if (vp.part == RealPart::Negative) {
      r.r_start = rb;
      const cplx dir = std::polar(1.0, arg);
      r.base = *std::min_element(at_zero.roots.begin(), at_zero.roots.end(),
                                 [&](cplx u, cplx w) { return std::abs(u - rb * dir) < std::abs(w - rb * dir); });
    }
    rays.push_back(r);
  }
  return rays;
}

// ---------------------------------------------------------------------------
// Sampling W^-1(0)

inline std::vector<cplx> fiber_roots(const Potential& p, cplx x, cplx t = 0.0, const std::vector<cplx>* warm = nullptr) {
  return find_roots(p.fiber_polynomial(x, t), RootOptions{}, warm).roots;
}

struct FiberSample {
  cplx x, y;
  TorusPoint arg;
  Membership membership;
  double margin;  // min(r1, r2, |det|) of the line solve; small means near a triangle boundary
};

/// Seeded random points of W^-1(0): x log-uniform in modulus [0.2, 5] and
/// uniform in argument, every y root of the fiber polynomial over it.
inline std::vector<FiberSample> sample_fiber(const Potential& p, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lr(std::log(0.2), std::log(5.0)), ar(0.0, 2 * std::numbers::pi);
  std::vector<FiberSample> out;
  while (int(out.size()) < count) {
    const cplx x = std::polar(std::exp(lr(rng)), ar(rng));
    for (cplx y : fiber_roots(p, x)) {
      if (int(out.size()) >= count) break;
      const TorusPoint th = arg_point(x, y);
      const auto img = apply(p.nt.psi(), th);
      const LineSolve ls = standard_solve(img[0], img[1]);
      out.push_back({x, y, th, ls.m, std::min({ls.r1, ls.r2, std::abs(ls.det)})});
    }
  }
  return out;
}

}  // namespace mdk
