#pragma once

// Command-line front end. Every subcommand prints one JSON document to the
// output stream; figures go to files (or to stdout for `render`).
// Exit status: 0 ok, 1 domain error, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdk/mdk.hpp"

namespace mdk::cli {

struct RunConfig {
  std::string triangle;
  double tol_root = 1e-10;
  double tol_step = 0.02;
  double eps_band = 0.02;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool svg = false;
  std::optional<int> anchor;
  // trace
  int index = 0;
  std::string t_end;
  // render
  std::string stage = "trace";
  // coamoeba
  int samples = 1000;
};

inline cplx parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) return {std::stod(s), 0.0};
  return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

namespace detail {

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void emit_file(const RunConfig& cfg, const std::string& name, const std::string& content) {
  const std::filesystem::path dir = cfg.out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(cfg.out_dir);
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  f << content;
}

inline TraceOptions trace_options(const RunConfig& cfg) {
  TraceOptions t;
  t.root.tol = cfg.tol_root;
  t.max_step = cfg.tol_step;
  return t;
}

inline VerifyOptions verify_options(const RunConfig& cfg) {
  VerifyOptions v;
  v.trace = trace_options(cfg);
  v.eps_band = cfg.eps_band;
  return v;
}

inline Normalization normalization(const RunConfig& cfg, const LatticeTriangle& t) {
  return cfg.anchor ? normalize_with_anchor(t, *cfg.anchor) : normalize(t);
}

struct TraceData {
  Potential p;
  Trajectory tr;
  std::optional<MatchingPath> mp;
};

inline TraceData trace_data(const RunConfig& cfg, const Potential& p) {
  const auto opt = trace_options(cfg);
  const auto cps = critical_points(p);
  if (!cfg.t_end.empty()) return {p, trace_branch_points(p, 0.0, parse_complex(cfg.t_end), opt), std::nullopt};
  const auto it = std::find_if(cps.begin(), cps.end(), [&](const CriticalPoint& c) { return c.value_index == cfg.index; });
  if (it == cps.end())
    throw Usage("--index must be a critical value index in [0, " + std::to_string(p.N()) + ")");
  MatchingPath mp = matching_path(p, *it, opt);
  Trajectory tr = mp.trace;
  return {p, std::move(tr), std::move(mp)};
}

inline json coamoeba_json(const RunConfig& cfg, const Potential& p) {
  json tris = json::array();
  for (const auto& t : fundamental_triangles(p.nt)) tris.push_back(to_json(t));
  json verts = json::array();
  for (const auto& v : vertex_points(p.nt))
    verts.push_back({{"pos", to_json(v.pos)}, {"part", std::string(to_string(v.part))}});
  json rays = json::array();
  for (const auto& r : vertex_rays(p, branch_points(p, 0.0)))
    rays.push_back({{"base", to_json(r.base)},
                    {"arg", r.arg},
                    {"r_start", r.r_start},
                    {"part", std::string(to_string(r.part))},
                    {"vertex", to_json(r.vertex)}});
  std::map<std::string, int> counts;
  double min_margin = INFINITY;
  for (const auto& s : sample_fiber(p, cfg.samples, cfg.seed)) {
    ++counts[std::string(to_string(s.membership))];
    if (s.membership == Membership::Interior) min_margin = std::min(min_margin, s.margin);
  }
  json c = json::object();
  for (const auto& [k, v] : counts) c[k] = v;
  return {{"normal_form", to_json(p.nt)},
          {"triangles", tris},
          {"vertex_points", verts},
          {"rays", rays},
          {"samples", {{"seed", cfg.seed}, {"count", cfg.samples}, {"membership", c},
                       {"min_interior_margin", std::isfinite(min_margin) ? json(min_margin) : json(nullptr)}}}};
}

inline std::optional<PerfectMatching> first_internal(const DimerModel& G, const NormalizedTriangle& nt) {
  const auto v = nt.vertices();
  const auto all = perfect_matchings(G);
  const auto delta = make_polygon({v.begin(), v.end()});
  for (const auto& D : internal_matchings(G, delta, all))
    if (characteristic_polygon(G, D, all) == delta) return D;
  return std::nullopt;
}

inline json dimer_json(const NormalizedTriangle& nt) {
  const DimerModel G = build_hexagonal_dimer(nt);
  const auto cons = check_dimer(G);
  const auto all = perfect_matchings(G);
  const auto v = nt.vertices();
  const auto delta = make_polygon({v.begin(), v.end()});
  const auto internal = internal_matchings(G, delta, all);
  json out = to_json(G);
  out["consistency"] = to_json(cons);
  json fs = json::array();
  for (const auto& f : faces(G)) fs.push_back(f.edges());
  out["faces"] = fs;
  out["perfect_matchings"] = all.size();
  out["deletion_count"] = count_matchings_by_deletion(G);
  out["internal_matchings"] = internal.size();
  if (const auto D = first_internal(G, nt)) {
    out["reference_matching"] = D->edges;
    out["characteristic_polygon"] = to_json(characteristic_polygon(G, *D, all));
    json hm = json::array();
    for (const auto& [h, m] : height_multiplicities(G, *D, all)) hm.push_back({{"height", to_json(h)}, {"count", m}});
    out["height_multiplicities"] = hm;
  }
  const Quiver Q = quiver_with_potential(G);
  json arrows = json::array();
  for (const auto& a : Q.arrows) arrows.push_back({{"edge", a.edge}, {"source", a.source}, {"target", a.target}});
  json terms = json::array();
  for (const auto& t : Q.potential) terms.push_back({{"node", t.node}, {"sign", t.sign}, {"arrows", t.arrows}});
  out["quiver"] = {{"vertices", Q.vertex_count}, {"arrows", arrows}, {"potential", terms}};
  return out;
}

}  // namespace detail

/// argv[0] is the program name.
inline int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Mirror symmetry for triangles: Lefschetz fibrations, coamoebas and dimer models", "mdk"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub, bool with_triangle = true) {
    if (with_triangle) sub->add_option("--triangle", cfg.triangle, "[[x1,y1],[x2,y2],[x3,y3]] or a file holding it");
    sub->add_option("--tol-root", cfg.tol_root, "root convergence tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--tol-step", cfg.tol_step, "maximum continuation step")->check(CLI::PositiveNumber);
    sub->add_option("--eps-band", cfg.eps_band, "face band width on the torus")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "seed for random sampling");
    sub->add_option("--out", cfg.out_dir, "directory for written files");
    sub->add_flag("--svg", cfg.svg, "also write an SVG figure");
    sub->add_option("--anchor", cfg.anchor, "vertex (0-2, counterclockwise order) sent to (a,0)")->check(CLI::Range(0, 2));
  };
  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"normalize", "stack", "critvals", "trace", "coamoeba", "dimer", "verify", "render"}) {
    static const std::map<std::string, std::string> help{
        {"normalize", "normal form (a,b,c,d,e) and the unimodular map to it"},
        {"stack", "weights and the group K2 of the toric stack"},
        {"critvals", "critical values and points of the superpotential"},
        {"trace", "branch points over a path from t = 0"},
        {"coamoeba", "coamoeba triangles, vertex points, rays and a sampling check"},
        {"dimer", "hexagonal dimer, matchings and characteristic polygon"},
        {"verify", "full correspondence check"},
        {"render", "SVG of one stage to stdout"}};
    subs[name] = app.add_subcommand(name, help.at(name));
    common(subs[name]);
  }
  subs["trace"]->add_option("--index", cfg.index, "critical value index whose matching path is traced");
  subs["trace"]->add_option("--t-end", cfg.t_end, "trace to this t instead (re or re,im)");
  subs["coamoeba"]->add_option("--samples", cfg.samples, "random fiber points")->check(CLI::PositiveNumber);
  subs["render"]->add_option("--stage", cfg.stage, "trace | coamoeba | dimer | verify")
      ->check(CLI::IsMember({"trace", "coamoeba", "dimer", "verify"}));
  subs["render"]->add_option("--index", cfg.index, "critical value index for the trace stage");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  CLI::App* sub = app.get_subcommands().front();
  const std::string cmd = sub->get_name();
  if (cfg.triangle.empty()) {
    err << "error: --triangle is required\n" << sub->help();
    return 2;
  }

  auto emit = [&](const json& j) {
    const std::string text = j.dump(2) + "\n";
    out << text;
    if (!cfg.out_dir.empty()) detail::emit_file(cfg, cmd + ".json", text);
  };

  try {
    const LatticeTriangle t = parse_triangle(cfg.triangle);
    if (cmd == "stack") {
      emit(to_json(stack_weights(t)));
      return 0;
    }
    const Normalization n = detail::normalization(cfg, t);
    if (cmd == "normalize") {
      json j = {{"input", to_json(t)}};
      j.update(to_json(n));
      emit(j);
      return 0;
    }
    const Potential p = build_potential(n.nt);
    if (cmd == "critvals") {
      emit(critvals_json(p));
    } else if (cmd == "trace") {
      const auto d = detail::trace_data(cfg, p);
      json j = {{"normal_form", to_json(n.nt)}, {"trace", to_json(d.tr)}};
      if (d.mp) j["matching_path"] = to_json(*d.mp);
      emit(j);
      if (cfg.svg) detail::emit_file(cfg, "trace.svg", svg::render_trajectories(d.tr));
    } else if (cmd == "coamoeba") {
      emit(detail::coamoeba_json(cfg, p));
      if (cfg.svg) detail::emit_file(cfg, "coamoeba.svg", svg::render_coamoeba(n.nt));
    } else if (cmd == "dimer") {
      emit(detail::dimer_json(n.nt));
      if (cfg.svg) {
        const DimerModel G = build_hexagonal_dimer(n.nt);
        detail::emit_file(cfg, "dimer.svg", svg::render_dimer(G, detail::first_internal(G, n.nt)));
      }
    } else if (cmd == "verify") {
      VerificationRun run;
      const ConjectureReport rep = verify_conjecture(t, detail::verify_options(cfg), cfg.anchor, &run);
      emit(to_json(rep));
      err << text_summary(rep);
      if (cfg.svg && run.normalization) detail::emit_file(cfg, "verify.svg", svg::render_coamoeba(n.nt, run.curves));
      return rep.overall ? 0 : 1;
    } else if (cmd == "render") {
      std::string doc;
      if (cfg.stage == "trace") {
        doc = svg::render_trajectories(detail::trace_data(cfg, p).tr);
      } else if (cfg.stage == "coamoeba") {
        doc = svg::render_coamoeba(n.nt);
      } else if (cfg.stage == "dimer") {
        const DimerModel G = build_hexagonal_dimer(n.nt);
        doc = svg::render_dimer(G, detail::first_internal(G, n.nt));
      } else {
        VerificationRun run;
        verify_conjecture(t, detail::verify_options(cfg), cfg.anchor, &run);
        doc = svg::render_coamoeba(n.nt, run.curves);
      }
      out << doc;
      if (!cfg.out_dir.empty()) detail::emit_file(cfg, cfg.stage + ".svg", doc);
    }
    return 0;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const detail::Usage& e) {
    err << "error: " << e.what() << "\n" << sub->help();
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n" << sub->help();
    return 2;
  }
}

}  // namespace mdk::cli
