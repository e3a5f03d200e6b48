// Acceptance run over the five reference triangles: one PASS/FAIL line per
// criterion, exit status 0 only if every line passes.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "mdk/mdk.hpp"
#include "../suite.hpp"

using namespace mdk;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double wrap(double a) { return std::remainder(a, 2 * pi); }

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& why) {
    if (!ok && pass) detail = why;
    pass = pass && ok;
  }
};

// The canonical forms plus the anchored (3,0,1,2,2) of the N = 11 triangle.
std::vector<NormalizedTriangle> forms() {
  std::vector<NormalizedTriangle> out;
  for (const auto& c : cases::suite()) out.push_back(normalize(c.t).nt);
  out.push_back(normalize_with_anchor(cases::suite()[3].t, 0).nt);
  return out;
}

// Newton on (x W_x, y W_y) in log coordinates from seeded starts.
std::vector<cplx> gradient_oracle_values(const Potential& p) {
  const auto& nt = p.nt;
  const auto ex = nt.vertices();
  const std::array<double, 3> cx{double(nt.a), double(nt.b), -double(nt.d)};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(-pi, pi), lr(-0.7, 0.7);
  std::vector<std::pair<cplx, cplx>> found;
  for (int s = 0; s < 20000 && Int(found.size()) < p.N(); ++s) {
    cplx u{lr(rng), ang(rng)}, v{lr(rng), ang(rng)};
    bool ok = false;
    for (int it = 0; it < 100 && !ok; ++it) {
      std::array<cplx, 3> X;
      for (int k = 0; k < 3; ++k) X[k] = std::exp(double(ex[k].x) * u + double(ex[k].y) * v);
      const cplx F1 = cx[0] * X[0] + cx[1] * X[1] + cx[2] * X[2], F2 = double(nt.c) * X[1] - double(nt.e) * X[2];
      cplx J11 = 0, J12 = 0;
      for (int k = 0; k < 3; ++k) J11 += cx[k] * double(ex[k].x) * X[k], J12 += cx[k] * double(ex[k].y) * X[k];
      const cplx J21 = double(nt.c) * double(ex[1].x) * X[1] - double(nt.e) * double(ex[2].x) * X[2];
      const cplx J22 = double(nt.c) * double(ex[1].y) * X[1] - double(nt.e) * double(ex[2].y) * X[2];
      const cplx det = J11 * J22 - J12 * J21;
      if (std::abs(det) < 1e-300) break;
      const cplx du = (F1 * J22 - F2 * J12) / det, dv = (J11 * F2 - J21 * F1) / det;
      u -= du, v -= dv;
      if (std::abs(u.real()) > 20 || std::abs(v.real()) > 20) break;
      ok = std::abs(du) + std::abs(dv) < 1e-15;
    }
    if (!ok) continue;
    const cplx x = std::exp(u), y = std::exp(v);
    bool dup = false;
    for (const auto& [x0, y0] : found) dup = dup || std::abs(x - x0) + std::abs(y - y0) < 1e-8;
    if (!dup) found.push_back({x, y});
  }
  std::vector<cplx> out;
  for (const auto& [x, y] : found) out.push_back(p(x, y));
  return out;
}

// Greedy nearest pairing; returns the worst relative gap or inf on a size mismatch.
double multiset_gap(const std::vector<cplx>& a, const std::vector<cplx>& b, double scale) {
  if (a.size() != b.size()) return INFINITY;
  std::vector<bool> used(b.size(), false);
  double worst = 0;
  for (cplx z : a) {
    std::size_t best = b.size();
    for (std::size_t i = 0; i < b.size(); ++i)
      if (!used[i] && (best == b.size() || std::abs(b[i] - z) < std::abs(b[best] - z))) best = i;
    used[best] = true;
    worst = std::max(worst, std::abs(b[best] - z) / scale);
  }
  return worst;
}

Outcome critical_values_check() {
  Outcome o;
  double worst = 0, slowest = 0;
  for (const auto& nt : forms()) {
    const auto t0 = Clock::now();
    const auto p = build_potential(nt);
    const auto vals = critical_values(p);
    slowest = std::max(slowest, seconds_since(t0));
    o.require(Int(vals.size()) == nt.N(), nt.str() + ": wrong count");
    std::vector<cplx> closed;
    for (const auto& v : vals) closed.push_back(v.t);
    const double gap = multiset_gap(closed, gradient_oracle_values(p), critical_t0(nt));
    worst = std::max(worst, gap);
    o.require(gap < 1e-9, nt.str() + ": closed form vs oracle " + fmt(gap));
  }
  const double t0 = critical_t0(make_normalized(1, 0, 1, 1, 1));
  o.require(std::abs(t0 - 3.0) < 1e-12, "P2 t0 = " + fmt(t0));
  o.require(slowest < 1.0, "slow: " + fmt(slowest) + " s");
  if (o.pass)
    o.detail = "count = N on all forms; max rel gap to gradient oracle " + fmt(worst) + "; P2 t0 - 3 = " +
               fmt(t0 - 3.0) + "; max " + fmt(slowest) + " s";
  return o;
}

Outcome branch_arguments_check() {
  Outcome o;
  double worst = 0;
  for (const auto& nt : forms()) {
    const auto bs = branch_points(build_potential(nt), 0.0);
    o.require(Int(bs.roots.size()) == nt.N(), nt.str() + ": root count");
    std::set<int> hit;
    for (cplx z : bs.roots) {
      // arg = (g + 2n) pi / N for an integer n
      const double n = (std::arg(z) * double(nt.N()) / pi - double(nt.g())) / 2;
      const int k = int(std::lround(n));
      const double err = std::abs(wrap(std::arg(z) - (double(nt.g()) + 2 * k) * pi / double(nt.N())));
      worst = std::max(worst, err);
      hit.insert(int(((k % nt.N()) + nt.N()) % nt.N()));
    }
    o.require(Int(hit.size()) == nt.N(), nt.str() + ": arguments repeat");
  }
  o.require(worst < 1e-9, "max argument error " + fmt(worst));
  const auto nt332 = make_normalized(3, 0, 1, 2, 2);
  o.require(nt332.g() == 3 && nt332.h() == 2 && branch_points(build_potential(nt332), 0.0).roots.size() == 11,
            "(3,3,2) does not have 11 roots");
  if (o.pass) o.detail = "max |arg - (g+2n)pi/N| = " + fmt(worst) + "; (a,g,h) = (3,3,2): 11 roots at (3+2n)pi/11";
  return o;
}

Outcome collision_check() {
  Outcome o;
  double worst_arg = 0, worst_x = 0;
  for (const auto& nt : forms()) {
    const auto p = build_potential(nt);
    const double t0 = critical_t0(nt), N = double(nt.N()), g = double(nt.g());
    const Trajectory tr = trace_branch_points(p, 0.0, t0);
    o.require(tr.collisions.size() == 1, nt.str() + ": " + std::to_string(tr.collisions.size()) + " collisions");
    if (tr.collisions.size() != 1) continue;
    const auto& c = tr.collisions[0];
    const double ai = std::arg(tr.samples.front()[c.i]), aj = std::arg(tr.samples.front()[c.j]);
    worst_arg = std::max({worst_arg, std::abs(std::min(ai, aj) + g * pi / N), std::abs(std::max(ai, aj) - g * pi / N)});
    worst_x = std::max(worst_x, std::abs(ipow(c.point, nt.a) - double(nt.h()) / N * t0));
  }
  o.require(worst_arg < 1e-8, "pair arguments off by " + fmt(worst_arg));
  o.require(worst_x < 1e-8, "x^a off by " + fmt(worst_x));
  if (o.pass)
    o.detail = "one collision per form; pair args = +-g pi/N within " + fmt(worst_arg) + "; |x^a - (h/N) t0| <= " +
               fmt(worst_x);
  return o;
}

Outcome k0_check() {
  Outcome o;
  for (const auto& nt : forms()) {
    const auto p = build_potential(nt);
    const auto G = k0_group(nt);
    o.require(G.order() == nt.N(), nt.str() + ": |K0| = " + std::to_string(G.order()));
    const auto vals = critical_values(p);
    const double r = critical_t0(nt);
    std::vector<cplx> orbit;
    for (const auto& th : G.elements()) orbit.push_back(k0_multiplier(nt, th) * r);
    std::vector<cplx> target;
    for (const auto& v : vals) target.push_back(v.t);
    const double gap = multiset_gap(orbit, target, r);
    o.require(gap < 1e-9, nt.str() + ": orbit gap " + fmt(gap));
  }
  if (o.pass) o.detail = "|K0| = N and the orbit of t0 is the critical set on every form";
  return o;
}

Outcome coamoeba_check() {
  Outcome o;
  double slowest = 0;
  for (const auto& nt : forms()) {
    const auto t0 = Clock::now();
    const auto p = build_potential(nt);
    int bad = 0;
    for (const auto& s : sample_fiber(p, 1000, 2024)) bad += s.membership == Membership::Exterior;
    o.require(bad == 0, nt.str() + ": " + std::to_string(bad) + " fiber points outside");
    const auto tris = fundamental_triangles(nt);
    const auto verts = vertex_points(nt);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0, 1);
    int agree = 0;
    for (int i = 0; i < 10000; ++i) {
      const TorusPoint pt{u(rng), u(rng)};
      agree += coamoeba_membership(nt, pt) == triangle_membership(tris, verts, pt);
    }
    o.require(agree == 10000, nt.str() + ": " + std::to_string(agree) + "/10000 agree");
    slowest = std::max(slowest, seconds_since(t0));
  }
  o.require(slowest < 5.0, "slow: " + fmt(slowest) + " s");
  if (o.pass) o.detail = "1000/1000 fiber points Interior/Vertex, 10000/10000 agree; max " + fmt(slowest) + " s";
  return o;
}

Outcome dimer_check() {
  Outcome o;
  for (const auto& nt : forms()) {
    const DimerModel G = build_hexagonal_dimer(nt);
    const auto r = check_dimer(G);
    const int N = int(nt.N());
    o.require(r.V == 2 * N && r.E == 3 * N && r.F == N && r.V - r.E + r.F == 0, nt.str() + ": V/E/F");
    const auto v = nt.vertices();
    o.require(r.zigzag_classes == boundary_classes({v.begin(), v.end()}), nt.str() + ": zigzag classes");
    const auto all = perfect_matchings(G);
    o.require(all.size() == count_matchings_by_deletion(G), nt.str() + ": matching count vs deletion oracle");
  }
  const auto p2 = make_normalized(1, 0, 1, 1, 1);
  const DimerModel G = build_hexagonal_dimer(p2);
  const auto v = p2.vertices();
  const auto n_all = perfect_matchings(G).size(), n_int = internal_matchings(G, make_polygon({v.begin(), v.end()})).size();
  o.require(n_all == 6 && n_int == 3, "P2: " + std::to_string(n_all) + " matchings, " + std::to_string(n_int) + " internal");
  if (o.pass) o.detail = "V=2N E=3N F=N, zigzags = boundary vectors, counts = deletion oracle; P2: 6 matchings, 3 internal";
  return o;
}

Outcome theorem_check() {
  Outcome o;
  double slowest = 0;
  for (const auto& nt : forms()) {
    const auto t0 = Clock::now();
    const DimerModel G = build_hexagonal_dimer(nt);
    const auto v = nt.vertices();
    const auto delta = make_polygon({v.begin(), v.end()});
    const auto all = perfect_matchings(G);
    bool found = false;
    for (const auto& D : internal_matchings(G, delta, all)) {
      const auto poly = characteristic_polygon(G, D, all);
      found = found || (poly == delta && poly.interior({0, 0}));
    }
    slowest = std::max(slowest, seconds_since(t0));
    o.require(found, nt.str() + ": no internal matching with polygon = triangle");
  }
  o.require(slowest < 10.0, "slow: " + fmt(slowest) + " s");
  if (o.pass) o.detail = "internal D with characteristic polygon = triangle on every form; max " + fmt(slowest) + " s";
  return o;
}

Outcome conjecture_check() {
  Outcome o;
  for (const auto& c : cases::suite()) {
    const auto rep = verify_conjecture(c.t);
    std::string failed;
    for (const auto& b : rep.bullets)
      if (!b.pass) failed = b.name + ": " + b.detail;
    o.require(rep.overall, c.name + " fails " + (failed.empty() ? rep.error_message : failed));
    if (!rep.ran) continue;
    o.require(rep.intersections.shared_edges == rep.intersections.vertex_crossings, c.name + ": vertex crossings");
    o.require(rep.intersections.signed_arrows == rep.intersections.signed_surface, c.name + ": signed intersections");
    if (c.name == "P2")
      for (int i = 0; i < 3; ++i)
        o.require(rep.intersections.shared_edges[i][(i + 1) % 3] == 3, "P2 consecutive count != 3");
  }
  const auto anchored = verify_conjecture(cases::suite()[3].t, {}, 0);
  o.require(anchored.overall, "(3,0,1,2,2) fails");
  if (o.pass) o.detail = "all six bullets on the suite and on (3,0,1,2,2); intersection matrices exact; P2 consecutive 3";
  return o;
}

int run_cli(const std::string& args, const std::filesystem::path& out) {
  const std::string cmd = "'" + std::string(MDK_CLI_PATH) + "' " + args + " >'" + out.string() + "' 2>/dev/null";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::size_t occurrences(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

Outcome figures_check() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / ("mdk_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const int c1 = run_cli("render --stage trace --triangle '[[3,0],[0,1],[-2,-2]]' --anchor 0", dir / "trace.svg");
  const std::string trace = read(dir / "trace.svg");
  o.require(c1 == 0, "render trace exit " + std::to_string(c1));
  o.require(occurrences(trace, "class=\"trajectory\"") == 11, "trace figure lacks 11 trajectories");
  o.require(occurrences(trace, "class=\"collision\"") == 1, "trace figure lacks one collision marker");
  // the marker sits on the positive real axis
  const auto pos = trace.find("class=\"collision\"");
  if (pos != std::string::npos) {
    const auto xs = trace.find("data-x=\"", pos) + 8, ys = trace.find("data-y=\"", pos) + 8;
    const double x = std::stod(trace.substr(xs)), y = std::stod(trace.substr(ys));
    o.require(x > 0 && std::abs(y) < 1e-9, "collision at (" + fmt(x) + ", " + fmt(y) + ")");
  }
  const int c2 = run_cli("render --stage coamoeba --triangle '[[1,0],[0,1],[-1,-1]]'", dir / "coamoeba.svg");
  const std::string co = read(dir / "coamoeba.svg");
  o.require(c2 == 0 && occurrences(co, "class=\"triangle\"") == 6, "P2 coamoeba figure lacks 6 triangles");
  std::filesystem::remove_all(dir);
  if (o.pass) o.detail = "(3,3,2): 11 trajectories, one collision on the positive real axis; P2 coamoeba: 6 triangles";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"critical values", critical_values_check},   {"branch arguments", branch_arguments_check},
      {"collision", collision_check},               {"K0 action", k0_check},
      {"coamoeba consistency", coamoeba_check},     {"dimer structure", dimer_check},
      {"characteristic polygon", theorem_check},    {"conjecture bullets", conjecture_check},
      {"figures", figures_check}};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return all ? 0 : 1;
}
