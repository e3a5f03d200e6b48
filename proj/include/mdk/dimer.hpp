#pragma once

// Bipartite graphs on the torus: the hexagonal dimer dual to the coamoeba
// triangles, faces and zigzag paths from the rotation system, perfect
// matchings, height changes, characteristic polygons and the quiver with
// potential.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mdk/coamoeba.hpp"
#include "mdk/lattice.hpp"

namespace mdk {

enum class Color { White, Black };

inline std::string_view to_string(Color c) { return c == Color::White ? "white" : "black"; }

struct DimerNode {
  int id = 0;
  Color color = Color::White;
  TorusPoint pos;
  RotationPair exact_pos{Rational(0), Rational(0)};
};

/// Edge from a white node to a black node. With nodes drawn at their
/// representatives in [0,1)^2, the black end of the edge sits at
/// black.pos + offset when the white end sits at white.pos.
struct DimerEdge {
  int white = 0, black = 0;
  Vec2i offset;
  RotationPair vertex_point{Rational(0), Rational(0)};  // coamoeba vertex the edge passes through
};

struct DimerModel {
  std::vector<DimerNode> nodes;
  std::vector<DimerEdge> edges;
  std::vector<std::vector<int>> rotation;  // counterclockwise edge order per node; empty = no embedding

  int other(int e, int v) const { return edges[e].white == v ? edges[e].black : edges[e].white; }
  bool embedded() const { return !rotation.empty(); }
  int count(Color c) const {
    return int(std::count_if(nodes.begin(), nodes.end(), [&](const DimerNode& n) { return n.color == c; }));
  }
};

/// A directed edge: `edge` traversed starting at node `from`.
struct Dart {
  int edge = 0, from = 0;
  friend auto operator<=>(const Dart&, const Dart&) = default;
};

struct Face {
  std::vector<Dart> darts;  // boundary, in traversal order

  std::vector<int> edges() const {
    std::vector<int> out;
    for (const auto& d : darts) out.push_back(d.edge);
    return out;
  }
  std::set<int> edge_set() const {
    std::set<int> s;
    for (const auto& d : darts) s.insert(d.edge);
    return s;
  }
  std::vector<int> nodes() const {
    std::vector<int> out;
    for (const auto& d : darts) out.push_back(d.from);
    return out;
  }
};

namespace detail {
inline int position(const std::vector<int>& v, int x) {
  return int(std::find(v.begin(), v.end(), x) - v.begin());
}
inline int cyc(int i, int n) { return ((i % n) + n) % n; }
}  // namespace detail

/// Faces traced by: arrive at u along e, leave along the edge before e in
/// u's counterclockwise order.
inline std::vector<Face> faces(const DimerModel& G) {
  if (!G.embedded()) throw Error(ErrorCode::InvalidGraph, "faces need a rotation system");
  std::set<Dart> seen;
  std::vector<Face> out;
  for (int k = 0; k < int(G.edges.size()); ++k)
    for (int v0 : {G.edges[k].white, G.edges[k].black}) {
      Dart d{k, v0};
      if (seen.count(d)) continue;
      Face f;
      while (!seen.count(d)) {
        seen.insert(d);
        f.darts.push_back(d);
        const int u = G.other(d.edge, d.from);
        const auto& r = G.rotation[u];
        d = Dart{r[detail::cyc(detail::position(r, d.edge) - 1, int(r.size()))], u};
      }
      out.push_back(std::move(f));
    }
  return out;
}

inline std::map<Dart, int> face_of_dart(const std::vector<Face>& fs) {
  std::map<Dart, int> m;
  for (int i = 0; i < int(fs.size()); ++i)
    for (const auto& d : fs[i].darts) m[d] = i;
  return m;
}

// ---------------------------------------------------------------------------
// Construction

/// J(m1, m2) = (m2, -m1): turns a homology class of the torus of arguments
/// into the dual lattice where the Newton polygon lives.
inline Vec2i dual_class(Vec2i m) { return {m.y, -m.x}; }

/// Honeycomb dual to the 2|det|-triangle pullback of the line coamoeba by psi:
/// white node k at the barycenter of psi^-1(T+ + m_k), black node k at
/// psi^-1(T- + m_k); the corner i of white m is shared with black
/// m + delta_i, delta = (-1,0), (0,0), (0,1).
inline DimerModel hexagonal_dimer(const Mat2i& psi) {
  const CosetIndex idx(psi);
  const auto& reps = idx.reps();
  const int n = int(reps.size());
  const RotationPair bp{Rational(1, 3), Rational(2, 3)}, bm{Rational(2, 3), Rational(1, 3)};
  static const Vec2i delta[3] = {{-1, 0}, {0, 0}, {0, 1}};

  auto lift = [&](const RotationPair& base, Vec2i m) {
    return apply_inverse(psi, {base[0] + Rational(m.x), base[1] + Rational(m.y)});
  };
  DimerModel G;
  for (int color = 0; color < 2; ++color)
    for (int k = 0; k < n; ++k) {
      const RotationPair pos = mod1(lift(color == 0 ? bp : bm, reps[k]));
      G.nodes.push_back({int(G.nodes.size()), color == 0 ? Color::White : Color::Black, TorusPoint::of(pos), pos});
    }
  G.rotation.assign(G.nodes.size(), {});
  std::vector<std::array<int, 3>> black_corner(n);
  for (int w = 0; w < n; ++w)
    for (int ci = 0; ci < 3; ++ci) {
      const Vec2i mb = reps[w] + delta[ci];
      const int b = n + idx(mb);
      const RotationPair wl = lift(bp, reps[w]), bl = lift(bm, mb);
      const RotationPair& wr = G.nodes[w].exact_pos;
      const RotationPair& br = G.nodes[b].exact_pos;
      const Rational o1 = wr[0] + bl[0] - wl[0] - br[0], o2 = wr[1] + bl[1] - wl[1] - br[1];
      if (!o1.is_integer() || !o2.is_integer()) throw Error(ErrorCode::InvalidGraph, "non-integral edge offset");
      const auto& corner = positive_corners()[ci];
      const RotationPair vp = mod1(lift(corner, reps[w]));
      G.edges.push_back({w, b, Vec2i{o1.num(), o2.num()}, vp});
      G.rotation[w].push_back(int(G.edges.size()) - 1);
      black_corner[b - n][ci] = int(G.edges.size()) - 1;
    }
  // Corner directions 0,1,2 are counterclockwise around both standard
  // triangles' barycenters, and psi^-1 preserves orientation.
  for (int b = 0; b < n; ++b) G.rotation[n + b] = {black_corner[b][0], black_corner[b][1], black_corner[b][2]};
  return G;
}

inline DimerModel build_hexagonal_dimer(const NormalizedTriangle& nt) { return hexagonal_dimer(nt.psi()); }

/// Two nodes, three edges: the one-hexagon torus.
inline DimerModel single_hexagon_dimer() { return hexagonal_dimer(Mat2i::identity()); }

// ---------------------------------------------------------------------------
// Consistency

struct Zigzag {
  std::vector<Dart> darts;
  Vec2i homology;  // dual class (after J)
};

/// Zigzag paths: turn maximally right at black nodes and maximally left at
/// white ones.
inline std::vector<Zigzag> zigzag_paths(const DimerModel& G) {
  if (!G.embedded()) throw Error(ErrorCode::InvalidGraph, "zigzags need a rotation system");
  std::set<Dart> seen;
  std::vector<Zigzag> out;
  for (int k0 = 0; k0 < int(G.edges.size()); ++k0) {
    Dart d{k0, G.edges[k0].white};
    if (seen.count(d)) continue;
    Zigzag z;
    Vec2i cls{0, 0};
    while (!seen.count(d)) {
      seen.insert(d);
      z.darts.push_back(d);
      const auto& e = G.edges[d.edge];
      const bool from_white = d.from == e.white;
      cls = from_white ? cls + e.offset : cls - e.offset;
      const int u = from_white ? e.black : e.white;
      const auto& r = G.rotation[u];
      const int pos = detail::position(r, d.edge);
      d = Dart{r[detail::cyc(from_white ? pos - 1 : pos + 1, int(r.size()))], u};
    }
    z.homology = dual_class(cls);
    out.push_back(std::move(z));
  }
  return out;
}

struct ConsistencyReport {
  int V = 0, E = 0, F = 0;
  bool bipartite = true;
  bool euler_zero = true;
  bool zigzags_ok = true;
  bool consistent = true;
  std::vector<Vec2i> zigzag_classes;
  std::vector<int> face_sizes;
  std::string detail;
};

inline ConsistencyReport check_dimer(const DimerModel& G) {
  ConsistencyReport rep;
  rep.V = int(G.nodes.size());
  rep.E = int(G.edges.size());
  if (rep.V % 2 != 0) throw Error(ErrorCode::InvalidGraph, "odd node count");
  if (G.count(Color::White) != G.count(Color::Black)) throw Error(ErrorCode::InvalidGraph, "unequal color classes");
  for (const auto& e : G.edges)
    if (e.white < 0 || e.black < 0 || e.white >= rep.V || e.black >= rep.V ||
        G.nodes[e.white].color != Color::White || G.nodes[e.black].color != Color::Black)
      throw Error(ErrorCode::InvalidGraph, "edge does not join white to black");
  if (!G.embedded() || G.rotation.size() != G.nodes.size())
    throw Error(ErrorCode::InvalidGraph, "missing rotation system");
  for (int v = 0; v < rep.V; ++v) {
    std::vector<int> inc;
    for (int k = 0; k < rep.E; ++k)
      if (G.edges[k].white == v || G.edges[k].black == v) inc.push_back(k);
    std::vector<int> r = G.rotation[v];
    std::sort(r.begin(), r.end());
    if (r != inc) throw Error(ErrorCode::InvalidGraph, "rotation at node " + std::to_string(v) + " is not its edge set");
  }

  const auto fs = faces(G);
  rep.F = int(fs.size());
  for (const auto& f : fs) rep.face_sizes.push_back(int(f.darts.size()));
  rep.euler_zero = rep.V - rep.E + rep.F == 0;

  for (const auto& z : zigzag_paths(G)) {
    rep.zigzag_classes.push_back(z.homology);
    std::set<int> used;
    for (const auto& d : z.darts)
      if (!used.insert(d.edge).second) {
        rep.zigzags_ok = false;
        rep.detail += "zigzag traverses an edge twice; ";
      }
    if (z.homology == Vec2i{0, 0}) {
      rep.zigzags_ok = false;
      rep.detail += "null-homologous zigzag; ";
    }
  }
  std::sort(rep.zigzag_classes.begin(), rep.zigzag_classes.end());
  if (!rep.euler_zero) rep.detail += "V - E + F != 0; ";
  rep.consistent = rep.bipartite && rep.euler_zero && rep.zigzags_ok;
  return rep;
}

/// Primitive edge directions of a counterclockwise polygon with lattice-length
/// multiplicity, as a sorted list.
inline std::vector<Vec2i> boundary_classes(const std::vector<Vec2i>& polygon) {
  std::vector<Vec2i> out;
  for (const auto& [dir, len] : boundary_edge_vectors(polygon))
    for (Int i = 0; i < len; ++i) out.push_back(dir);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Perfect matchings

struct PerfectMatching {
  std::vector<int> edges;  // sorted edge ids
  friend bool operator==(const PerfectMatching&, const PerfectMatching&) = default;
};

/// All perfect matchings, by backtracking on the lowest uncovered node.
inline std::vector<PerfectMatching> perfect_matchings(const DimerModel& G) {
  const int n = int(G.nodes.size());
  std::vector<std::vector<int>> adj(n);
  for (int k = 0; k < int(G.edges.size()); ++k) {
    adj[G.edges[k].white].push_back(k);
    adj[G.edges[k].black].push_back(k);
  }
  std::vector<PerfectMatching> out;
  std::vector<char> covered(n, 0);
  std::vector<int> cur;
  auto rec = [&](auto&& self) -> void {
    int v = 0;
    while (v < n && covered[v]) ++v;
    if (v == n) {
      PerfectMatching m{cur};
      std::sort(m.edges.begin(), m.edges.end());
      out.push_back(std::move(m));
      return;
    }
    for (int k : adj[v]) {
      const int u = G.other(k, v);
      if (covered[u] || u == v) continue;
      covered[v] = covered[u] = 1;
      cur.push_back(k);
      self(self);
      cur.pop_back();
      covered[v] = covered[u] = 0;
    }
  };
  if (n > 0) rec(rec);
  if (out.empty()) throw Error(ErrorCode::NoMatching, "graph has no perfect matching");
  return out;
}

/// Independent count: #PM(G) = #PM(G - e) + #PM(G with both ends of e removed),
/// memoized on (remaining nodes, remaining edges). Up to 64 nodes and edges.
inline std::uint64_t count_matchings_by_deletion(const DimerModel& G) {
  const int n = int(G.nodes.size()), m = int(G.edges.size());
  if (n > 64 || m > 64) throw Error(ErrorCode::InvalidGraph, "deletion oracle supports at most 64 nodes and edges");
  using Key = std::pair<std::uint64_t, std::uint64_t>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return std::hash<std::uint64_t>()(k.first * 0x9E3779B97F4A7C15ULL ^ k.second); }
  };
  std::unordered_map<Key, std::uint64_t, KeyHash> memo;
  auto bit = [](int i) { return std::uint64_t(1) << i; };
  auto rec = [&](auto&& self, std::uint64_t nodes, std::uint64_t edges) -> std::uint64_t {
    if (nodes == 0) return 1;
    const Key key{nodes, edges};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    // the live node of least live degree
    int best_deg = 1 << 30, pick = -1;
    for (int v = 0; v < n; ++v) {
      if (!(nodes & bit(v))) continue;
      int deg = 0, some = -1;
      for (int k = 0; k < m; ++k)
        if ((edges & bit(k)) && (G.edges[k].white == v || G.edges[k].black == v)) {
          ++deg;
          some = k;
        }
      if (deg < best_deg) {
        best_deg = deg;
        pick = some;
      }
    }
    std::uint64_t r = 0;
    if (best_deg > 0) {
      const auto& e = G.edges[pick];
      std::uint64_t rest = edges & ~bit(pick);
      for (int k = 0; k < m; ++k)
        if (G.edges[k].white == e.white || G.edges[k].black == e.black) rest &= ~bit(k);
      r = self(self, nodes, edges & ~bit(pick)) + self(self, nodes & ~bit(e.white) & ~bit(e.black), rest);
    }
    memo[key] = r;
    return r;
  };
  std::uint64_t all_nodes = n == 64 ? ~std::uint64_t(0) : bit(n) - 1, all_edges = m == 64 ? ~std::uint64_t(0) : bit(m) - 1;
  return rec(rec, all_nodes, all_edges);
}

// ---------------------------------------------------------------------------
// Heights and characteristic polygons

/// h(M) = J(sum of offsets over M - sum over ref).
inline Vec2i height_change(const DimerModel& G, const PerfectMatching& M, const PerfectMatching& ref) {
  Vec2i s{0, 0};
  for (int k : M.edges) s = s + G.edges[k].offset;
  for (int k : ref.edges) s = s - G.edges[k].offset;
  return dual_class(s);
}

struct LatticePolygon {
  std::vector<Vec2i> vertices;  // counterclockwise, no repeated or collinear points, starting at the smallest

  friend bool operator==(const LatticePolygon&, const LatticePolygon&) = default;

  /// Strictly inside.
  bool interior(Vec2i p) const {
    if (vertices.size() < 3) return false;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const Vec2i a = vertices[i], b = vertices[(i + 1) % vertices.size()];
      if (cross(b - a, p - a) <= 0) return false;
    }
    return true;
  }
  LatticePolygon translated(Vec2i t) const {
    LatticePolygon q = *this;
    for (auto& v : q.vertices) v = v + t;
    return q;
  }
};

/// Andrew's monotone chain, collinear points dropped.
inline LatticePolygon convex_hull(std::vector<Vec2i> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return {pts};
  std::vector<Vec2i> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return {h};
}

/// Canonical vertex order for a polygon given counterclockwise.
inline LatticePolygon make_polygon(const std::vector<Vec2i>& ccw) { return convex_hull(ccw); }

inline LatticePolygon characteristic_polygon(const DimerModel& G, const PerfectMatching& ref,
                                             const std::vector<PerfectMatching>& all) {
  std::vector<Vec2i> hs;
  for (const auto& M : all) hs.push_back(height_change(G, M, ref));
  return convex_hull(hs);
}

inline LatticePolygon characteristic_polygon(const DimerModel& G, const PerfectMatching& ref) {
  return characteristic_polygon(G, ref, perfect_matchings(G));
}

/// Height changes relative to `ref`, with multiplicity.
inline std::map<Vec2i, int> height_multiplicities(const DimerModel& G, const PerfectMatching& ref,
                                                  const std::vector<PerfectMatching>& all) {
  std::map<Vec2i, int> out;
  for (const auto& M : all) ++out[height_change(G, M, ref)];
  return out;
}

/// Matchings at interior lattice points of the characteristic polygon, which
/// must be a translate of delta.
inline std::vector<PerfectMatching> internal_matchings(const DimerModel& G, const LatticePolygon& delta,
                                                       const std::vector<PerfectMatching>& all) {
  if (all.empty()) throw Error(ErrorCode::NoneFound, "no perfect matchings");
  const LatticePolygon hull = characteristic_polygon(G, all.front(), all);
  const LatticePolygon target = make_polygon(delta.vertices);
  if (hull.vertices.size() != target.vertices.size() || hull.vertices.empty() ||
      hull.translated(target.vertices[0] - hull.vertices[0]) != target)
    throw Error(ErrorCode::NoneFound, "characteristic polygon is not a translate of the triangle");
  std::vector<PerfectMatching> out;
  for (const auto& M : all)
    if (hull.interior(height_change(G, M, all.front()))) out.push_back(M);
  if (out.empty()) throw Error(ErrorCode::NoneFound, "no matching at an interior lattice point");
  return out;
}

inline std::vector<PerfectMatching> internal_matchings(const DimerModel& G, const LatticePolygon& delta) {
  return internal_matchings(G, delta, perfect_matchings(G));
}

// ---------------------------------------------------------------------------
// Quiver with potential

struct Arrow {
  int edge = 0;
  int source = 0, target = 0;  // faces
};

struct PotentialTerm {
  int node = 0;
  int sign = 1;  // +1 white, -1 black
  std::vector<int> arrows;  // a composable cycle
};

struct Quiver {
  int vertex_count = 0;
  std::vector<Arrow> arrows;  // arrows[k] belongs to edge k
  std::vector<PotentialTerm> potential;
};

/// Vertices are faces. The arrow of an edge goes from the face on the side
/// of the dart leaving the white end to the face of the dart leaving the
/// black end. Each node contributes the cycle of its arrows, signed by color.
inline Quiver quiver_with_potential(const DimerModel& G) {
  const auto fs = faces(G);
  const auto fod = face_of_dart(fs);
  Quiver Q;
  Q.vertex_count = int(fs.size());
  for (int k = 0; k < int(G.edges.size()); ++k)
    Q.arrows.push_back({k, fod.at(Dart{k, G.edges[k].white}), fod.at(Dart{k, G.edges[k].black})});
  for (const auto& node : G.nodes) {
    std::vector<int> cyc = G.rotation[node.id];
    auto composable = [&](const std::vector<int>& c) {
      for (std::size_t i = 0; i < c.size(); ++i)
        if (Q.arrows[c[i]].target != Q.arrows[c[(i + 1) % c.size()]].source) return false;
      return true;
    };
    if (!composable(cyc)) std::reverse(cyc.begin(), cyc.end());
    if (!composable(cyc)) throw Error(ErrorCode::InvalidGraph, "node cycle is not composable");
    Q.potential.push_back({node.id, node.color == Color::White ? 1 : -1, cyc});
  }
  return Q;
}

}  // namespace mdk
