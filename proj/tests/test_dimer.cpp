#include <gtest/gtest.h>

#include <chrono>
#include <functional>
#include <map>

#include "mdk/dimer.hpp"
#include "mdk/svg.hpp"
#include "suite.hpp"

using namespace mdk;

namespace {

// Perfect matchings counted independently: assign whites in order to unused blacks.
std::uint64_t count_by_assignment(const DimerModel& G) {
  std::vector<int> whites;
  for (const auto& n : G.nodes)
    if (n.color == Color::White) whites.push_back(n.id);
  std::map<std::pair<std::size_t, std::uint64_t>, std::uint64_t> memo;
  std::function<std::uint64_t(std::size_t, std::uint64_t)> go = [&](std::size_t i, std::uint64_t used) -> std::uint64_t {
    if (i == whites.size()) return 1;
    if (auto it = memo.find({i, used}); it != memo.end()) return it->second;
    std::uint64_t total = 0;
    for (const auto& e : G.edges)
      if (e.white == whites[i] && !(used >> e.black & 1)) total += go(i + 1, used | (std::uint64_t(1) << e.black));
    memo[{i, used}] = total;
    return total;
  };
  return go(0, 0);
}

LatticePolygon delta_of(const NormalizedTriangle& nt) {
  const auto v = nt.vertices();
  return make_polygon({v.begin(), v.end()});
}

}  // namespace

TEST(Dimer, Counts) {
  for (const auto& nt : cases::suite_forms()) {
    SCOPED_TRACE(nt.str());
    const DimerModel G = build_hexagonal_dimer(nt);
    const auto r = check_dimer(G);
    const int N = int(nt.N());
    EXPECT_EQ(r.V, 2 * N);
    EXPECT_EQ(r.E, 3 * N);
    EXPECT_EQ(r.F, N);
    EXPECT_EQ(r.V - r.E + r.F, 0);
    EXPECT_TRUE(r.euler_zero);
    EXPECT_TRUE(r.bipartite);
    EXPECT_TRUE(r.consistent) << r.detail;
    EXPECT_EQ(G.count(Color::White), N);
    for (int s : r.face_sizes) EXPECT_EQ(s, 6);
  }
}

TEST(Dimer, ZigzagsAreBoundaryEdgeVectors) {
  for (const auto& nt : cases::suite_forms()) {
    SCOPED_TRACE(nt.str());
    const DimerModel G = build_hexagonal_dimer(nt);
    const auto v = nt.vertices();
    const auto bc = boundary_classes({v.begin(), v.end()});
    EXPECT_EQ(check_dimer(G).zigzag_classes, bc);
    // multiset size = boundary lattice length
    std::size_t len = 0;
    for (const auto& [dir, l] : boundary_edge_vectors({v.begin(), v.end()})) len += std::size_t(l);
    EXPECT_EQ(bc.size(), len);
    // every edge lies on exactly two zigzags, once in each direction
    std::map<int, int> uses;
    for (const auto& z : zigzag_paths(G))
      for (const auto& d : z.darts) ++uses[d.edge];
    for (int k = 0; k < int(G.edges.size()); ++k) EXPECT_EQ(uses[k], 2);
  }
}

TEST(Dimer, MatchingCountsAgreeWithOracles) {
  const std::map<std::string, std::size_t> known{{"(1,0,1,1,1)", 6}};
  for (const auto& nt : cases::suite_forms()) {
    SCOPED_TRACE(nt.str());
    const DimerModel G = build_hexagonal_dimer(nt);
    const auto all = perfect_matchings(G);
    EXPECT_EQ(all.size(), count_matchings_by_deletion(G));
    EXPECT_EQ(all.size(), count_by_assignment(G));
    if (auto it = known.find(nt.str()); it != known.end()) {
      EXPECT_EQ(all.size(), it->second);
    }
    for (const auto& M : all) {
      std::vector<int> cover(G.nodes.size(), 0);
      for (int k : M.edges) ++cover[G.edges[k].white], ++cover[G.edges[k].black];
      for (int c : cover) EXPECT_EQ(c, 1);
    }
  }
}

TEST(Dimer, ProjectivePlaneInternalMatchings) {
  const auto nt = make_normalized(1, 0, 1, 1, 1);
  const DimerModel G = build_hexagonal_dimer(nt);
  const auto all = perfect_matchings(G);
  ASSERT_EQ(all.size(), 6u);
  EXPECT_EQ(internal_matchings(G, delta_of(nt), all).size(), 3u);
  // multiplicity 1 at the corners, 3 at the interior point
  const auto hm = height_multiplicities(G, all.front(), all);
  std::vector<int> mult;
  for (const auto& [h, m] : hm) mult.push_back(m);
  std::sort(mult.begin(), mult.end());
  EXPECT_EQ(mult, (std::vector<int>{1, 1, 1, 3}));
}

TEST(Theorem, CharacteristicPolygonIsTheTriangle) {
  for (const auto& nt : cases::suite_forms()) {
    SCOPED_TRACE(nt.str());
    const auto t0 = std::chrono::steady_clock::now();
    const DimerModel G = build_hexagonal_dimer(nt);
    const auto all = perfect_matchings(G);
    const auto delta = delta_of(nt);
    const auto internal = internal_matchings(G, delta, all);
    int exact = 0;
    for (const auto& D : internal) {
      const auto poly = characteristic_polygon(G, D, all);
      if (poly == delta) {
        ++exact;
        EXPECT_TRUE(poly.interior({0, 0}));
      } else {
        // every other reference gives a translate
        EXPECT_EQ(poly.translated(delta.vertices[0] - poly.vertices[0]), delta);
      }
    }
    EXPECT_GT(exact, 0);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LT(secs, 10.0);
  }
}

TEST(Dimer, HeightChangeBasics) {
  const DimerModel G = build_hexagonal_dimer(make_normalized(1, 0, 1, 1, 2));
  const auto all = perfect_matchings(G);
  for (const auto& M : all) {
    EXPECT_EQ(height_change(G, M, M), (Vec2i{0, 0}));
    for (const auto& M2 : all) EXPECT_EQ(height_change(G, M, M2), -height_change(G, M2, M));
  }
}

TEST(Dimer, SingleHexagon) {
  const DimerModel G = single_hexagon_dimer();
  const auto r = check_dimer(G);
  EXPECT_EQ(r.V, 2);
  EXPECT_EQ(r.E, 3);
  EXPECT_EQ(r.F, 1);
  EXPECT_EQ(perfect_matchings(G).size(), 3u);
}

TEST(Dimer, InvalidGraphsRejected) {
  DimerModel G = build_hexagonal_dimer(make_normalized(1, 0, 1, 1, 1));
  DimerModel odd = G;
  odd.nodes.pop_back();
  EXPECT_THROW(check_dimer(odd), Error);
  DimerModel bad = G;
  bad.edges[0].black = bad.edges[0].white;
  try {
    check_dimer(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidGraph);
  }
  DimerModel bare = G;
  bare.rotation.clear();
  EXPECT_THROW(check_dimer(bare), Error);
}

TEST(Dimer, NoMatching) {
  DimerModel G = build_hexagonal_dimer(make_normalized(1, 0, 1, 1, 1));
  // drop every edge at white node 0
  std::vector<DimerEdge> keep;
  for (const auto& e : G.edges)
    if (e.white != 0) keep.push_back(e);
  G.edges = keep;
  G.rotation.clear();
  try {
    perfect_matchings(G);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoMatching);
  }
}

TEST(Quiver, ArrowsAndPotential) {
  for (const auto& nt : cases::suite_forms()) {
    const DimerModel G = build_hexagonal_dimer(nt);
    const Quiver Q = quiver_with_potential(G);
    EXPECT_EQ(Q.vertex_count, int(nt.N()));
    EXPECT_EQ(Int(Q.arrows.size()), 3 * nt.N());
    ASSERT_EQ(Int(Q.potential.size()), 2 * nt.N());
    // each arrow occurs once in a positive and once in a negative term
    std::vector<int> plus(Q.arrows.size(), 0), minus(Q.arrows.size(), 0);
    for (const auto& t : Q.potential)
      for (int a : t.arrows) (t.sign > 0 ? plus : minus)[a]++;
    for (std::size_t k = 0; k < Q.arrows.size(); ++k) {
      EXPECT_EQ(plus[k], 1);
      EXPECT_EQ(minus[k], 1);
    }
    // balanced at every vertex (toric quivers are anomaly free)
    std::vector<int> in(Q.vertex_count, 0), out(Q.vertex_count, 0);
    for (const auto& a : Q.arrows) ++out[a.source], ++in[a.target];
    EXPECT_EQ(in, out);
  }
}

TEST(Figure, DimerHighlightsMatching) {
  const auto nt = make_normalized(1, 0, 1, 1, 1);
  const DimerModel G = build_hexagonal_dimer(nt);
  const auto D = internal_matchings(G, delta_of(nt)).front();
  const std::string doc = svg::render_dimer(G, D);
  std::set<std::string> bold;
  for (auto pos = doc.find("class=\"edge matched\" data-edge=\""); pos != std::string::npos;
       pos = doc.find("class=\"edge matched\" data-edge=\"", pos + 1)) {
    const auto s = pos + std::string("class=\"edge matched\" data-edge=\"").size();
    bold.insert(doc.substr(s, doc.find('"', s) - s));
  }
  EXPECT_EQ(bold.size(), 3u);
  std::size_t nodes = 0;
  for (auto pos = doc.find("class=\"node "); pos != std::string::npos; pos = doc.find("class=\"node ", pos + 1)) ++nodes;
  EXPECT_EQ(nodes, 6u);
}
