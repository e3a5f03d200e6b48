#pragma once

// Exact lattice geometry of triangles containing the origin: validation,
// unimodular normal form, Smith normal form, toric weights and the torsion
// groups K2 and K0.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdk/error.hpp"
#include "mdk/exact.hpp"

namespace mdk {

struct Vec2i {
  Int x = 0;
  Int y = 0;

  friend Vec2i operator+(Vec2i a, Vec2i b) { return {checked_add(a.x, b.x), checked_add(a.y, b.y)}; }
  friend Vec2i operator-(Vec2i a, Vec2i b) { return {checked_sub(a.x, b.x), checked_sub(a.y, b.y)}; }
  friend Vec2i operator-(Vec2i a) { return {checked_sub(0, a.x), checked_sub(0, a.y)}; }
  friend Vec2i operator*(Int k, Vec2i a) { return {checked_mul(k, a.x), checked_mul(k, a.y)}; }
  friend bool operator==(const Vec2i&, const Vec2i&) = default;
  friend auto operator<=>(const Vec2i&, const Vec2i&) = default;
};

inline Int cross(Vec2i u, Vec2i v) { return checked_sub(checked_mul(u.x, v.y), checked_mul(u.y, v.x)); }

/// 2x2 integer matrix, row-major.
struct Mat2i {
  std::array<std::array<Int, 2>, 2> m{{{1, 0}, {0, 1}}};

  static Mat2i identity() { return {}; }
  static Mat2i rows(Int a, Int b, Int c, Int d) { return Mat2i{{{{a, b}, {c, d}}}}; }

  Int det() const { return checked_sub(checked_mul(m[0][0], m[1][1]), checked_mul(m[0][1], m[1][0])); }
  Mat2i transpose() const { return rows(m[0][0], m[1][0], m[0][1], m[1][1]); }

  Vec2i operator()(Vec2i v) const {
    return {checked_add(checked_mul(m[0][0], v.x), checked_mul(m[0][1], v.y)),
            checked_add(checked_mul(m[1][0], v.x), checked_mul(m[1][1], v.y))};
  }
  friend Mat2i operator*(const Mat2i& a, const Mat2i& b) {
    Mat2i r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        r.m[i][j] = checked_add(checked_mul(a.m[i][0], b.m[0][j]), checked_mul(a.m[i][1], b.m[1][j]));
    return r;
  }
  friend bool operator==(const Mat2i&, const Mat2i&) = default;
};

/// Determinant exactly +1.
class UnimodularMap {
 public:
  UnimodularMap() = default;
  explicit UnimodularMap(const Mat2i& m) : m_(m) {
    if (m.det() != 1) throw Error(ErrorCode::Degenerate, "unimodular map must have determinant +1");
  }
  const Mat2i& matrix() const { return m_; }
  Vec2i operator()(Vec2i v) const { return m_(v); }
  /// Exact inverse (adjugate, since det = 1).
  UnimodularMap inverse() const {
    return UnimodularMap(Mat2i::rows(m_.m[1][1], -m_.m[0][1], -m_.m[1][0], m_.m[0][0]));
  }
  friend bool operator==(const UnimodularMap&, const UnimodularMap&) = default;

 private:
  Mat2i m_;
};

/// A lattice triangle with the origin strictly inside, vertices counterclockwise.
struct LatticeTriangle {
  std::array<Vec2i, 3> v;

  Int twice_area() const { return cross(v[0], v[1]) + cross(v[1], v[2]) + cross(v[2], v[0]); }
};

/// Validates three lattice points. The first vertex keeps its position; the
/// other two are swapped if needed to make the order counterclockwise.
inline LatticeTriangle validate_triangle(Vec2i v1, Vec2i v2, Vec2i v3) {
  Int area2 = cross(v2 - v1, v3 - v1);
  if (area2 == 0) throw Error(ErrorCode::Degenerate, "vertices are collinear or repeated");
  if (area2 < 0) std::swap(v2, v3);
  LatticeTriangle t{{v1, v2, v3}};
  for (int i = 0; i < 3; ++i) {
    if (cross(t.v[i], t.v[(i + 1) % 3]) <= 0)
      throw Error(ErrorCode::OriginNotInterior, "origin is on the boundary or outside the triangle");
  }
  return t;
}

/// The normal form Conv{(a,0), (b,c), (-d,-e)} with a,c,d,e >= 1 and 0 <= b < c.
struct NormalizedTriangle {
  Int a = 1, b = 0, c = 1, d = 1, e = 1;

  Int g() const { return checked_add(c, e); }
  Int h() const { return checked_sub(checked_mul(c, d), checked_mul(b, e)); }
  Int N() const { return checked_add(checked_mul(a, g()), h()); }

  std::array<Vec2i, 3> vertices() const { return {Vec2i{a, 0}, Vec2i{b, c}, Vec2i{-d, -e}}; }
  LatticeTriangle triangle() const { return LatticeTriangle{vertices()}; }

  /// Index of the sublattice spanned by the vertices, gcd(ac, ae, h).
  Int lattice_index() const { return gcd(gcd(checked_mul(a, c), checked_mul(a, e)), h()); }

  /// ((a+d, e), (b+d, c+e)): exponents of x^{a+d}y^e and x^{b+d}y^{c+e}.
  Mat2i psi() const { return Mat2i::rows(a + d, e, b + d, c + e); }
  /// ((a+d, b+d), (e, c+e)) = psi transposed.
  Mat2i phi0() const { return psi().transpose(); }

  auto tuple() const { return std::make_tuple(a, b, c, d, e); }
  friend bool operator==(const NormalizedTriangle& x, const NormalizedTriangle& y) { return x.tuple() == y.tuple(); }

  std::string str() const {
    return "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + "," + std::to_string(d) +
           "," + std::to_string(e) + ")";
  }
};

inline bool is_coprime(const NormalizedTriangle& nt) { return gcd(nt.a, nt.h()) == 1; }

inline NormalizedTriangle make_normalized(Int a, Int b, Int c, Int d, Int e) {
  if (a < 1 || c < 1 || d < 1 || e < 1 || b < 0 || b >= c)
    throw Error(ErrorCode::Degenerate, "normal form requires a,c,d,e >= 1 and 0 <= b < c");
  NormalizedTriangle nt{a, b, c, d, e};
  if (nt.h() < 1) throw Error(ErrorCode::OriginNotInterior, "h = cd - be must be positive");
  return nt;
}

struct Normalization {
  NormalizedTriangle nt;
  UnimodularMap transform;  // transform(input vertex) lands on the normal form vertices
  int anchor = 0;           // index (in validated CCW order) of the vertex sent to (a, 0)
};

inline constexpr const char* kCoverReductionNote =
    "gcd(a,h) = k != 1 for every vertex choice; reduce to the coprime case via the k-fold cover x -> x^k "
    "of the x-plane (not implemented)";

/// Normal form with the vertex t.v[anchor] sent to (a,0). Does not check gcd(a,h).
inline Normalization normalize_with_anchor(const LatticeTriangle& t, int anchor) {
  const Vec2i v1 = t.v[anchor % 3], v2 = t.v[(anchor + 1) % 3], v3 = t.v[(anchor + 2) % 3];
  const Int a = gcd(v1.x, v1.y);
  const Vec2i dir{v1.x / a, v1.y / a};
  const Bezout bz = extended_gcd(dir.x, dir.y);
  // rows (p, q) and (-y', x'): sends dir to (1, 0), det = p x' + q y' = 1
  const Mat2i rot = Mat2i::rows(bz.x, bz.y, -dir.y, dir.x);
  const Vec2i w2 = rot(v2);
  const Int c = w2.y;
  const Int k = -floor_div(w2.x, c);
  const Mat2i transform = Mat2i::rows(1, k, 0, 1) * rot;
  const Vec2i n2 = transform(v2), n3 = transform(v3);
  Normalization out{NormalizedTriangle{a, n2.x, n2.y, -n3.x, -n3.y}, UnimodularMap(transform), anchor % 3};
  return out;
}

/// Canonical normal form: among the three cyclic vertex choices with
/// gcd(a,h) = 1, the lexicographically smallest (a,b,c,d,e); ties keep the
/// earliest anchor.
inline Normalization normalize(const LatticeTriangle& t) {
  std::optional<Normalization> best;
  for (int i = 0; i < 3; ++i) {
    Normalization cand = normalize_with_anchor(t, i);
    if (!is_coprime(cand.nt)) continue;
    if (!best || cand.nt.tuple() < best->nt.tuple()) best = cand;
  }
  if (!best) throw Error(ErrorCode::NonCoprime, kCoverReductionNote);
  return *best;
}

// ---------------------------------------------------------------------------
// Smith normal form

using IntMatrix = std::vector<std::vector<Int>>;

inline IntMatrix identity_matrix(std::size_t n) {
  IntMatrix id(n, std::vector<Int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) id[i][i] = 1;
  return id;
}

inline IntMatrix matmul(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix r(a.size(), std::vector<Int>(b.empty() ? 0 : b[0].size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < r[i].size(); ++j) r[i][j] = checked_add(r[i][j], checked_mul(a[i][k], b[k][j]));
  return r;
}

inline IntMatrix to_matrix(const Mat2i& m) { return {{m.m[0][0], m.m[0][1]}, {m.m[1][0], m.m[1][1]}}; }

struct SmithForm {
  IntMatrix U, D, V;  // U * M * V = D

  std::vector<Int> diagonal() const {
    std::vector<Int> out;
    for (std::size_t i = 0; i < D.size() && i < (D.empty() ? 0 : D[0].size()); ++i) out.push_back(D[i][i]);
    return out;
  }
};

/// U M V = D with D diagonal, non-negative, d_i | d_{i+1}; U and V unimodular.
inline SmithForm smith_normal_form(const IntMatrix& M) {
  const std::size_t rows = M.size();
  const std::size_t cols = rows ? M[0].size() : 0;
  IntMatrix A = M, U = identity_matrix(rows), V = identity_matrix(cols);

  auto row_op = [&](std::size_t dst, std::size_t src, Int q) {  // row_dst -= q row_src
    for (std::size_t j = 0; j < cols; ++j) A[dst][j] = checked_sub(A[dst][j], checked_mul(q, A[src][j]));
    for (std::size_t j = 0; j < rows; ++j) U[dst][j] = checked_sub(U[dst][j], checked_mul(q, U[src][j]));
  };
  auto col_op = [&](std::size_t dst, std::size_t src, Int q) {  // col_dst -= q col_src
    for (std::size_t i = 0; i < rows; ++i) A[i][dst] = checked_sub(A[i][dst], checked_mul(q, A[i][src]));
    for (std::size_t i = 0; i < cols; ++i) V[i][dst] = checked_sub(V[i][dst], checked_mul(q, V[i][src]));
  };

  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    while (true) {
      std::optional<std::pair<std::size_t, std::size_t>> pivot;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (A[i][j] != 0 && (!pivot || int_abs(A[i][j]) < int_abs(A[pivot->first][pivot->second])))
            pivot = {i, j};
      if (!pivot) break;
      std::swap(A[t], A[pivot->first]);
      std::swap(U[t], U[pivot->first]);
      for (std::size_t i = 0; i < rows; ++i) std::swap(A[i][t], A[i][pivot->second]);
      for (std::size_t i = 0; i < cols; ++i) std::swap(V[i][t], V[i][pivot->second]);

      for (std::size_t i = t + 1; i < rows; ++i) row_op(i, t, A[i][t] / A[t][t]);
      for (std::size_t j = t + 1; j < cols; ++j) col_op(j, t, A[t][j] / A[t][t]);

      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) clean = clean && A[i][t] == 0;
      for (std::size_t j = t + 1; j < cols; ++j) clean = clean && A[t][j] == 0;
      if (!clean) continue;

      std::optional<std::size_t> bad_row;
      for (std::size_t i = t + 1; i < rows && !bad_row; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (A[i][j] % A[t][t] != 0) {
            bad_row = i;
            break;
          }
      if (!bad_row) break;
      row_op(t, *bad_row, -1);
    }
    if (A[t][t] < 0) {
      for (auto& x : A[t]) x = checked_sub(0, x);
      for (auto& x : U[t]) x = checked_sub(0, x);
    }
  }
  return {U, A, V};
}

// ---------------------------------------------------------------------------
// Finite abelian groups of torus points

using RotationPair = std::array<Rational, 2>;

inline RotationPair mod1(const RotationPair& p) { return {p[0].mod1(), p[1].mod1()}; }

/// Finite subgroup of (C^x)^2 presented by invariant factors d_1 | d_2 | ...
/// (each >= 2) and one generator per factor, written as rotation numbers
/// (theta_alpha, theta_beta) in [0,1)^2, i.e. (alpha, beta) = exp(2 pi i theta).
struct FiniteAbelianGroup {
  std::vector<Int> invariant_factors;
  std::vector<RotationPair> generators;

  Int order() const {
    Int o = 1;
    for (Int d : invariant_factors) o = checked_mul(o, d);
    return o;
  }

  /// All elements, enumerated in mixed radix over the generators.
  std::vector<RotationPair> elements() const {
    std::vector<RotationPair> out{{Rational(0), Rational(0)}};
    for (std::size_t i = 0; i < generators.size(); ++i) {
      std::vector<RotationPair> next;
      for (const auto& base : out)
        for (Int k = 0; k < invariant_factors[i]; ++k)
          next.push_back(mod1({base[0] + Rational(k) * generators[i][0], base[1] + Rational(k) * generators[i][1]}));
      out = std::move(next);
    }
    return out;
  }
};

/// Order of a rotation pair in (Q/Z)^2.
inline Int rotation_order(const RotationPair& p) {
  const RotationPair r = mod1(p);
  return std::lcm(r[0].den(), r[1].den());
}

/// {theta in (Q/Z)^2 : M theta in Z^2} for a nonsingular integer matrix M,
/// i.e. the kernel of M (x) C^x acting on rotation numbers. Its order is |det M|.
inline FiniteAbelianGroup kernel_group(const Mat2i& M) {
  if (M.det() == 0) throw Error(ErrorCode::Degenerate, "kernel group of a singular matrix is infinite");
  const SmithForm s = smith_normal_form(to_matrix(M));
  FiniteAbelianGroup grp;
  for (std::size_t i = 0; i < 2; ++i) {
    const Int d = s.D[i][i];
    if (d < 2) continue;
    grp.invariant_factors.push_back(d);
    grp.generators.push_back(mod1({Rational(s.V[0][i], d), Rational(s.V[1][i], d)}));
  }
  return grp;
}

/// True when M theta is integral.
inline bool annihilates(const Mat2i& M, const RotationPair& th) {
  const Rational r0 = Rational(M.m[0][0]) * th[0] + Rational(M.m[0][1]) * th[1];
  const Rational r1 = Rational(M.m[1][0]) * th[0] + Rational(M.m[1][1]) * th[1];
  return r0.is_integer() && r1.is_integer();
}

/// K0: the pairs (alpha, beta) with alpha^{a+d} beta^e = alpha^{b+d} beta^{c+e} = 1.
/// These are exactly the diagonal rescalings (x,y) -> (alpha x, beta y) under
/// which W picks up a common factor, W(alpha x, beta y) = alpha^a W(x, y).
inline FiniteAbelianGroup k0_group(const NormalizedTriangle& nt) { return kernel_group(nt.psi()); }

// ---------------------------------------------------------------------------
// Toric stack data

struct StackData {
  std::array<Int, 3> weights{};  // primitive positive kernel generator of e_i -> v_i
  bool surjective = true;
  Int image_index = 1;  // [Z^2 : image of phi]
  Int gcd_abc = 1;      // gcd of the weights
  FiniteAbelianGroup k2;
};

inline StackData stack_weights(const LatticeTriangle& t) {
  StackData out;
  const std::array<Int, 3> raw{cross(t.v[1], t.v[2]), cross(t.v[2], t.v[0]), cross(t.v[0], t.v[1])};
  const Int k = gcd(gcd(raw[0], raw[1]), raw[2]);
  for (int i = 0; i < 3; ++i) out.weights[i] = raw[i] / k;
  out.gcd_abc = gcd(gcd(out.weights[0], out.weights[1]), out.weights[2]);

  IntMatrix phi{{t.v[0].x, t.v[1].x, t.v[2].x}, {t.v[0].y, t.v[1].y, t.v[2].y}};
  const SmithForm s = smith_normal_form(phi);
  out.image_index = checked_mul(s.D[0][0], s.D[1][1]);
  out.surjective = out.image_index == 1;
  // Im(phi) has basis U^{-1} diag(d1, d2); in that basis the inclusion's
  // kernel on rotation numbers is (1/d1) Z x (1/d2) Z.
  for (std::size_t i = 0; i < 2; ++i) {
    const Int d = s.D[i][i];
    if (d < 2) continue;
    out.k2.invariant_factors.push_back(d);
    RotationPair gen{Rational(0), Rational(0)};
    gen[i] = Rational(1, d);
    out.k2.generators.push_back(gen);
  }
  return out;
}

/// Weighted projective plane P(a,b,c) with arbitrary positive weights: the
/// common factor d and the reduced weights. For d != 1 the mirror is a
/// disjoint union of d copies of the mirror of the reduced plane.
struct WeightedPlane {
  std::array<Int, 3> weights{};
  Int d = 1;
  std::array<Int, 3> reduced{};
};

inline WeightedPlane weighted_plane(Int a, Int b, Int c) {
  if (a < 1 || b < 1 || c < 1) throw Error(ErrorCode::Degenerate, "weights must be positive");
  WeightedPlane w{{a, b, c}, gcd(gcd(a, b), c), {}};
  for (int i = 0; i < 3; ++i) w.reduced[i] = w.weights[i] / w.d;
  return w;
}

/// Primitive boundary directions of a counterclockwise lattice polygon with
/// the lattice length of the edges carrying them, summed per direction.
inline std::map<Vec2i, Int> boundary_edge_vectors(const std::vector<Vec2i>& polygon) {
  std::map<Vec2i, Int> out;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2i dv = polygon[(i + 1) % polygon.size()] - polygon[i];
    const Int len = gcd(dv.x, dv.y);
    if (len == 0) continue;
    out[Vec2i{dv.x / len, dv.y / len}] += len;
  }
  return out;
}

}  // namespace mdk
