#pragma once

// JSON views of every stage. Key order is fixed (ordered_json) and doubles
// print round-trip exact, so equal inputs give byte-identical output.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mdk/coamoeba.hpp"
#include "mdk/dimer.hpp"
#include "mdk/lattice.hpp"
#include "mdk/potential.hpp"
#include "mdk/verify.hpp"

namespace mdk {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Input

/// "[[x1,y1],[x2,y2],[x3,y3]]", inline or as the contents of a file.
/// Malformed text throws std::invalid_argument; a degenerate or
/// non-interior triangle throws Error from validate_triangle.
inline LatticeTriangle parse_triangle(const std::string& text_or_path) {
  std::string text = text_or_path;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw std::invalid_argument("empty triangle");
  if (text[first] != '[') {
    std::ifstream in(text_or_path);
    if (!in) throw std::invalid_argument("cannot read triangle file '" + text_or_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("triangle is not valid JSON: ") + e.what());
  }
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("triangle must be an array of three [x,y] pairs");
  std::array<Vec2i, 3> v;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& p = j[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
      throw std::invalid_argument("triangle vertices must be integer pairs");
    v[i] = {p[0].get<Int>(), p[1].get<Int>()};
  }
  return validate_triangle(v[0], v[1], v[2]);
}

// ---------------------------------------------------------------------------
// Leaves

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }
inline json to_json(Vec2i v) { return json::array({v.x, v.y}); }
inline json to_json(const Rational& r) { return r.str(); }
inline json to_json(const RotationPair& r) { return json::array({r[0].str(), r[1].str()}); }
inline json to_json(TorusPoint p) { return json::array({p.t1, p.t2}); }

inline json to_json(const Mat2i& m) {
  return json::array({json::array({m.m[0][0], m.m[0][1]}), json::array({m.m[1][0], m.m[1][1]})});
}

inline json to_json(const std::vector<cplx>& zs) {
  json a = json::array();
  for (cplx z : zs) a.push_back(to_json(z));
  return a;
}

inline json to_json(const LatticeTriangle& t) {
  return json::array({to_json(t.v[0]), to_json(t.v[1]), to_json(t.v[2])});
}

inline json to_json(const LatticePolygon& p) {
  json a = json::array();
  for (const auto& v : p.vertices) a.push_back(to_json(v));
  return a;
}

inline json to_json(const FiniteAbelianGroup& G) {
  json gens = json::array();
  for (const auto& g : G.generators) gens.push_back(to_json(g));
  return {{"invariant_factors", G.invariant_factors}, {"generators", gens}, {"order", G.order()}};
}

template <class T>
json int_matrix(const std::vector<std::vector<T>>& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(row);
  return a;
}

// ---------------------------------------------------------------------------
// Stages

inline json to_json(const NormalizedTriangle& nt) {
  return {{"a", nt.a},  {"b", nt.b},  {"c", nt.c},  {"d", nt.d},
          {"e", nt.e},  {"g", nt.g()}, {"h", nt.h()}, {"N", nt.N()},
          {"vertices", to_json(nt.triangle())}, {"lattice_index", nt.lattice_index()}};
}

inline json to_json(const Normalization& n) {
  return {{"normal_form", to_json(n.nt)},
          {"transform", to_json(n.transform.matrix())},
          {"anchor", n.anchor},
          {"psi", to_json(n.nt.psi())},
          {"phi0", to_json(n.nt.phi0())},
          {"K0", to_json(k0_group(n.nt))}};
}

inline json to_json(const StackData& s) {
  return {{"weights", s.weights},
          {"surjective", s.surjective},
          {"image_index", s.image_index},
          {"gcd_abc", s.gcd_abc},
          {"K2", to_json(s.k2)}};
}

inline json critvals_json(const Potential& p) {
  json vals = json::array();
  for (const auto& v : critical_values(p))
    vals.push_back({{"t", to_json(v.t)}, {"index", v.index}, {"r", v.r}, {"multiplicity", v.multiplicity}});
  json pts = json::array();
  for (const auto& cp : critical_points(p))
    pts.push_back({{"x", to_json(cp.x)}, {"y", to_json(cp.y)}, {"t", to_json(cp.t)}, {"value_index", cp.value_index}});
  return {{"normal_form", to_json(p.nt)},
          {"count", vals.size()},
          {"t0", critical_t0(p.nt)},
          {"log_C", log_closed_form_constant(p.nt)},
          {"values", vals},
          {"points", pts}};
}

/// Per-root trajectories (arrays of [re, im]) and the collisions met.
inline json to_json(const Trajectory& tr) {
  json paths = json::array();
  for (std::size_t l = 0; l < tr.root_count(); ++l) paths.push_back(to_json(tr.path_of(int(l))));
  json cols = json::array();
  for (const auto& c : tr.collisions)
    cols.push_back({{"step", c.step}, {"i", c.i}, {"j", c.j}, {"point", to_json(c.point)}, {"distance", c.distance}});
  return {{"t_start", to_json(tr.t_start)}, {"t_end", to_json(tr.t_end)}, {"s", tr.s},
          {"trajectories", paths},         {"collisions", cols}};
}

inline json to_json(const MatchingPath& mp) {
  return {{"critical", {{"x", to_json(mp.critical.x)}, {"y", to_json(mp.critical.y)}, {"t", to_json(mp.critical.t)}}},
          {"endpoints", json::array({to_json(mp.endpoints[0]), to_json(mp.endpoints[1])})},
          {"collision", to_json(mp.collision)},
          {"polyline", to_json(mp.polyline)},
          {"ramification_y", json::array({to_json(mp.ramification_y[0]), to_json(mp.ramification_y[1])})}};
}

inline json to_json(const TorusTriangle& t) {
  json v = json::array();
  for (const auto& c : t.v) v.push_back(json::array({c[0].to_double(), c[1].to_double()}));
  return {{"index", t.index}, {"positive", t.positive}, {"m", to_json(t.m)}, {"vertices", v}};
}

inline json to_json(const TorusCurve& c) {
  json pts = json::array();
  for (const auto& q : c.points) pts.push_back(json::array({q[0], q[1]}));
  return {{"source", c.source}, {"winding", to_json(c.winding)}, {"points", pts}};
}

inline json to_json(const DimerModel& G) {
  json nodes = json::array(), edges = json::array();
  for (const auto& n : G.nodes)
    nodes.push_back({{"id", n.id}, {"color", std::string(to_string(n.color))}, {"pos", to_json(n.pos)}});
  for (const auto& e : G.edges)
    edges.push_back({{"a", e.white}, {"b", e.black}, {"offset", to_json(e.offset)}});
  return {{"nodes", nodes}, {"edges", edges}};
}

inline json to_json(const ConsistencyReport& r) {
  json zz = json::array();
  for (const auto& z : r.zigzag_classes) zz.push_back(to_json(z));
  return {{"V", r.V},       {"E", r.E},
          {"F", r.F},       {"euler_zero", r.euler_zero},
          {"bipartite", r.bipartite}, {"zigzags_ok", r.zigzags_ok},
          {"consistent", r.consistent}, {"zigzag_classes", zz},
          {"face_sizes", r.face_sizes}};
}

inline json to_json(const ConjectureReport& r) {
  json bullets = json::array();
  for (const auto& b : r.bullets) bullets.push_back({{"name", b.name}, {"pass", b.pass}, {"detail", b.detail}});
  json out = {{"input", to_json(r.input)}, {"bullets", bullets}, {"overall", r.overall}};
  if (r.normalization) out["normal_form"] = to_json(r.normalization->nt);
  if (r.error) out["error"] = {{"code", std::string(to_string(*r.error))}, {"message", r.error_message}};
  if (r.ran && !r.intersections.shared_edges.empty()) {
    out["face_of_cycle"] = r.face_of_curve;
    out["intersections"] = {{"shared_edges", int_matrix(r.intersections.shared_edges)},
                            {"vertex_crossings", int_matrix(r.intersections.vertex_crossings)},
                            {"signed_arrows", int_matrix(r.intersections.signed_arrows)},
                            {"signed_surface", int_matrix(r.intersections.signed_surface)},
                            {"raw_surface", int_matrix(r.intersections.raw_surface)}};
  }
  if (!r.polygon.vertices.empty()) out["characteristic_polygon"] = to_json(r.polygon);
  out["internal_matchings"] = r.internal_matchings;
  out["internal_with_exact_polygon"] = r.internal_with_exact_polygon;
  return out;
}

/// One line per bullet.
inline std::string text_summary(const ConjectureReport& r) {
  std::ostringstream os;
  os << "triangle " << to_json(r.input).dump();
  if (r.normalization) os << "  normal form " << r.normalization->nt.str();
  os << "\n";
  for (const auto& b : r.bullets) os << (b.pass ? "  PASS  " : "  FAIL  ") << b.name << ": " << b.detail << "\n";
  if (r.error) os << "  error: " << r.error_message << "\n";
  os << (r.overall ? "overall PASS" : "overall FAIL") << "\n";
  return os.str();
}

}  // namespace mdk
