#pragma once

// Deterministic SVG figures. Torus pictures map [0,1)^2 onto a 512 px square
// (theta2 up); x-plane pictures fit the data bounding box plus a 10% margin.
// Every number is printed with 9 significant digits.

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mdk/coamoeba.hpp"
#include "mdk/dimer.hpp"
#include "mdk/potential.hpp"
#include "mdk/verify.hpp"

namespace mdk::svg {

inline constexpr double kTorusSize = 512;

inline std::string num(double v) {
  if (v == 0) v = 0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

class Document {
 public:
  Document(double w, double h) : w_(w), h_(h) {}

  std::ostringstream& body() { return os_; }

  std::string str() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w_) << "\" height=\"" << num(h_)
        << "\" viewBox=\"0 0 " << num(w_) << " " << num(h_) << "\">\n"
        << os_.str() << "</svg>\n";
    return out.str();
  }

 private:
  double w_, h_;
  std::ostringstream os_;
};

namespace detail {

struct Frame {
  double x0, y0, scale, height;
  double px(double x) const { return (x - x0) * scale; }
  double py(double y) const { return height - (y - y0) * scale; }
};

inline std::string points_attr(const std::vector<std::array<double, 2>>& pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s += ' ';
    s += num(pts[i][0]) + "," + num(pts[i][1]);
  }
  return s;
}

inline void torus_frame(Document& doc, const char* clip_id) {
  doc.body() << "<defs><clipPath id=\"" << clip_id << "\"><rect x=\"0\" y=\"0\" width=\"" << num(kTorusSize)
             << "\" height=\"" << num(kTorusSize) << "\"/></clipPath></defs>\n"
             << "<rect class=\"domain\" x=\"0\" y=\"0\" width=\"" << num(kTorusSize) << "\" height=\""
             << num(kTorusSize) << "\" fill=\"white\" stroke=\"black\"/>\n";
}

inline std::array<double, 2> torus_px(double t1, double t2) { return {t1 * kTorusSize, (1 - t2) * kTorusSize}; }

// Splits a curve on [0,1)^2 wherever it wraps around.
inline std::vector<std::vector<std::array<double, 2>>> wrapped_pieces(const std::vector<TorusPoint>& pts) {
  std::vector<std::vector<std::array<double, 2>>> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == 0 || std::abs(pts[i].t1 - pts[i - 1].t1) > 0.5 || std::abs(pts[i].t2 - pts[i - 1].t2) > 0.5)
      out.emplace_back();
    out.back().push_back(torus_px(pts[i].t1, pts[i].t2));
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Branch-point trajectories in the x-plane; the colliding pair is drawn in
/// red and each collision gets a marker.
inline std::string render_trajectories(const Trajectory& tr) {
  double lo_x = INFINITY, hi_x = -INFINITY, lo_y = INFINITY, hi_y = -INFINITY;
  for (const auto& smp : tr.samples)
    for (cplx z : smp) {
      lo_x = std::min(lo_x, z.real());
      hi_x = std::max(hi_x, z.real());
      lo_y = std::min(lo_y, z.imag());
      hi_y = std::max(hi_y, z.imag());
    }
  if (!std::isfinite(lo_x)) lo_x = lo_y = -1, hi_x = hi_y = 1;
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double mx = 0.1 * (hi_x - lo_x > 0 ? hi_x - lo_x : span), my = 0.1 * (hi_y - lo_y > 0 ? hi_y - lo_y : span);
  lo_x -= mx, hi_x += mx, lo_y -= my, hi_y += my;
  const double scale = kTorusSize / std::max(hi_x - lo_x, hi_y - lo_y);
  const double W = (hi_x - lo_x) * scale, H = (hi_y - lo_y) * scale;
  const detail::Frame f{lo_x, lo_y, scale, H};

  Document doc(W, H);
  auto& os = doc.body();
  os << "<rect x=\"0\" y=\"0\" width=\"" << num(W) << "\" height=\"" << num(H) << "\" fill=\"white\"/>\n";
  if (lo_y < 0 && hi_y > 0)
    os << "<line class=\"axis\" x1=\"0\" y1=\"" << num(f.py(0)) << "\" x2=\"" << num(W) << "\" y2=\"" << num(f.py(0))
       << "\" stroke=\"#999\" stroke-width=\"0.5\"/>\n";
  if (lo_x < 0 && hi_x > 0)
    os << "<line class=\"axis\" x1=\"" << num(f.px(0)) << "\" y1=\"0\" x2=\"" << num(f.px(0)) << "\" y2=\"" << num(H)
       << "\" stroke=\"#999\" stroke-width=\"0.5\"/>\n";

  std::vector<bool> hot(tr.root_count(), false);
  for (const auto& c : tr.collisions) hot[c.i] = hot[c.j] = true;
  for (std::size_t l = 0; l < tr.root_count(); ++l) {
    std::vector<std::array<double, 2>> pts;
    for (cplx z : tr.path_of(int(l))) pts.push_back({f.px(z.real()), f.py(z.imag())});
    os << "<polyline class=\"trajectory\" data-root=\"" << l << "\" fill=\"none\" stroke=\""
       << (hot[l] ? "#c00" : "#246") << "\" stroke-width=\"1.2\" points=\"" << detail::points_attr(pts) << "\"/>\n";
    os << "<circle class=\"start\" cx=\"" << num(pts.front()[0]) << "\" cy=\"" << num(pts.front()[1])
       << "\" r=\"2.5\" fill=\"#246\"/>\n";
  }
  for (const auto& c : tr.collisions)
    os << "<circle class=\"collision\" cx=\"" << num(f.px(c.point.real())) << "\" cy=\"" << num(f.py(c.point.imag()))
       << "\" r=\"5\" fill=\"none\" stroke=\"#c00\" stroke-width=\"1.5\" data-x=\"" << num(c.point.real())
       << "\" data-y=\"" << num(c.point.imag()) << "\"/>\n";
  return doc.str();
}

/// The 2N coamoeba triangles on the torus (positive shaded dark), with
/// optional projected cycles on top.
inline std::string render_coamoeba(const NormalizedTriangle& nt, const std::vector<TorusCurve>& curves = {}) {
  Document doc(kTorusSize, kTorusSize);
  auto& os = doc.body();
  detail::torus_frame(doc, "torus");
  os << "<g clip-path=\"url(#torus)\">\n";
  for (const auto& tri : fundamental_triangles(nt)) {
    os << "<g class=\"triangle\" data-index=\"" << tri.index << "\" fill=\"" << (tri.positive ? "#8aa" : "#dcb")
       << "\" stroke=\"#333\" stroke-width=\"0.5\">\n";
    double lo1 = INFINITY, lo2 = INFINITY;
    for (const auto& v : tri.v) lo1 = std::min(lo1, v[0].to_double()), lo2 = std::min(lo2, v[1].to_double());
    // every integer translate that meets the unit square
    for (int s1 = -2; s1 <= 1; ++s1)
      for (int s2 = -2; s2 <= 1; ++s2) {
        const double d1 = s1 - std::floor(lo1), d2 = s2 - std::floor(lo2);
        std::vector<std::array<double, 2>> pts;
        double a1 = INFINITY, b1 = -INFINITY, a2 = INFINITY, b2 = -INFINITY;
        for (const auto& v : tri.v) {
          const double u = v[0].to_double() + d1, w = v[1].to_double() + d2;
          a1 = std::min(a1, u), b1 = std::max(b1, u), a2 = std::min(a2, w), b2 = std::max(b2, w);
          pts.push_back(detail::torus_px(u, w));
        }
        if (b1 <= 0 || a1 >= 1 || b2 <= 0 || a2 >= 1) continue;
        os << "<polygon points=\"" << detail::points_attr(pts) << "\"/>\n";
      }
    os << "</g>\n";
  }
  for (const auto& c : curves)
    for (const auto& piece : detail::wrapped_pieces(c.reduced()))
      os << "<polyline class=\"cycle\" data-source=\"" << c.source
         << "\" fill=\"none\" stroke=\"#c00\" stroke-width=\"1.5\" points=\"" << detail::points_attr(piece) << "\"/>\n";
  os << "</g>\n";
  return doc.str();
}

/// The dimer on the torus; edges of `matching` drawn bold.
inline std::string render_dimer(const DimerModel& G, const std::optional<PerfectMatching>& matching = std::nullopt) {
  Document doc(kTorusSize, kTorusSize);
  auto& os = doc.body();
  detail::torus_frame(doc, "torus");
  std::vector<bool> bold(G.edges.size(), false);
  if (matching)
    for (int k : matching->edges) bold[k] = true;
  os << "<g clip-path=\"url(#torus)\">\n";
  for (std::size_t k = 0; k < G.edges.size(); ++k) {
    const auto& e = G.edges[k];
    const TorusPoint w = G.nodes[e.white].pos, b = G.nodes[e.black].pos;
    const double b1 = b.t1 + double(e.offset.x), b2 = b.t2 + double(e.offset.y);
    // drawn from both ends so the wrapped part shows as well
    for (const auto& [o1, o2] : {std::pair{0.0, 0.0}, std::pair{-double(e.offset.x), -double(e.offset.y)}}) {
      const auto p = detail::torus_px(w.t1 + o1, w.t2 + o2), q = detail::torus_px(b1 + o1, b2 + o2);
      os << "<line class=\"" << (bold[k] ? "edge matched" : "edge") << "\" data-edge=\"" << k << "\" x1=\""
         << num(p[0]) << "\" y1=\"" << num(p[1]) << "\" x2=\"" << num(q[0]) << "\" y2=\"" << num(q[1])
         << "\" stroke=\"black\" stroke-width=\"" << (bold[k] ? "5" : "1") << "\"/>\n";
      if (e.offset == Vec2i{0, 0}) break;
    }
  }
  for (const auto& n : G.nodes) {
    const auto p = detail::torus_px(n.pos.t1, n.pos.t2);
    os << "<circle class=\"node " << to_string(n.color) << "\" data-id=\"" << n.id << "\" cx=\"" << num(p[0])
       << "\" cy=\"" << num(p[1]) << "\" r=\"6\" fill=\"" << (n.color == Color::White ? "white" : "black")
       << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  }
  os << "</g>\n";
  return doc.str();
}

}  // namespace mdk::svg
