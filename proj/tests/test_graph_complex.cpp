#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "kcsi/chain.hpp"
#include "kcsi/cocycle.hpp"
#include "kcsi/enumerate.hpp"
#include "kcsi/faces.hpp"
#include "kcsi/graph.hpp"
#include "kcsi/linalg.hpp"

using namespace kcsi;

namespace {
Graph G(const char* text) { return Graph::parse(text); }
}  // namespace

TEST_CASE("graph text round trip and degree") {
  const Graph g = G("i=5 f=0 edges=13,14,25");
  CHECK(g.to_string() == "i=5 f=0 edges=13,14,25");
  CHECK(g.degree() == 1);
  CHECK(G("i=4 f=1 edges=11,25,35,45").degree() == 1);
  CHECK(Graph().degree() == 0);
  CHECK(G("i=3 f=2 edges=14,15,24,35,45").valence(4) == 3);
  CHECK(G("i=1 f=0 edges=11").edge_ends(1) == 2);
  CHECK_THROWS_AS(G("i=2 f=0 edges=13"), GraphError);
  CHECK_THROWS_AS(G("nonsense"), GraphError);
}

TEST_CASE("canonicalize") {
  const Graph g = G("i=3 f=0 edges=12,23");
  auto c = canonicalize(g);
  REQUIRE(c);
  CHECK(c->graph == g);
  CHECK(c->sign == 1);

  // One edge reversed: the orientation datum flips.
  c = canonicalize(Graph(3, 0, {{2, 1}, {2, 3}}));
  REQUIRE(c);
  CHECK(c->graph == g);
  CHECK(c->sign == -1);

  // Swapping the two free vertices is an odd automorphism.
  CHECK_FALSE(canonicalize(Graph(2, 2, {{1, 3}, {1, 4}, {2, 3}, {2, 4}})));
  // Parallel edges and free loops are zero.
  CHECK_FALSE(canonicalize(Graph(2, 0, {{1, 2}, {1, 2}})));
  CHECK_FALSE(canonicalize(Graph(1, 1, {{1, 2}, {2, 2}})));
}

TEST_CASE("free relabeling sign agrees with permutation_sign") {
  // b is a with free labels 4 and 5 swapped (edge directions carried
  // along), so b = -a.
  const Graph a = G("i=3 f=2 edges=14,15,24,35,45");
  const Graph b(3, 2, {{1, 5}, {1, 4}, {2, 5}, {3, 4}, {5, 4}});
  const auto ca = canonicalize(a), cb = canonicalize(b);
  REQUIRE(ca);
  REQUIRE(cb);
  CHECK(ca->graph == cb->graph);
  CHECK(ca->sign == -cb->sign);
  CHECK(permutation_sign({2, 1}) == -1);
  CHECK(permutation_sign({1, 2, 3}) == 1);
  CHECK(permutation_sign({3, 1, 2}) == 1);
}

TEST_CASE("delta on small graphs") {
  CHECK(delta(GraphChain()).empty());
  const GraphChain d = delta(G("i=3 f=0 edges=12,23"));
  CHECK(d.size() == 2);
  CHECK(abs(d.coefficient(G("i=2 f=0 edges=11,12"))) == 1);
  CHECK(abs(d.coefficient(G("i=2 f=0 edges=12,22"))) == 1);
  CHECK(delta(d).empty());
  for (const auto& [g, c] : d.terms()) CHECK(g.degree() == 2);
}

TEST_CASE("delta squares to zero on a sample of degree-0 and degree-1 graphs") {
  for (int deg : {0, 1}) {
    for (const Graph& g : enumerate_graphs(4, 1, deg)) {
      const GraphChain d = delta(g);
      for (const auto& [h, c] : d.terms()) {
        CHECK(h.degree() == g.degree() + 1);
        CHECK(h.order() == g.order());
      }
      CHECK(delta(d).empty());
    }
  }
}

TEST_CASE("enumerate_graphs") {
  const auto empty = enumerate_graphs(0, 0, 0);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].is_empty());
  // Degree 1 with two interval vertices: only the tangent loop; the chord 12
  // has degree 0.
  const auto two = enumerate_graphs(2, 0, 1);
  REQUIRE(two.size() == 1);
  CHECK(two[0] == G("i=1 f=0 edges=11"));
  CHECK(enumerate_graphs(2, 0, 0) == std::vector<Graph>{Graph(), G("i=2 f=0 edges=12")});

  const auto basis = enumerate_graphs(5, 1, 1);
  CHECK(basis.size() == 69);  // regression constant
  CHECK(enumerate_graphs(5, 1, 0).size() == 16);
  bool any_trivalent = false, any_non = false;
  for (const Graph& g : enumerate_graphs(5, 1, 0)) any_trivalent = any_trivalent || is_trivalent(g);
  for (const Graph& g : basis) {
    any_non = any_non || is_nontrivalent(g);
    CHECK(g.degree() == 1);
    CHECK(g.is_canonical());
  }
  CHECK(any_trivalent);
  CHECK(any_non);
  CHECK(std::set<Graph>(basis.begin(), basis.end()).size() == basis.size());
  CHECK_THROWS_AS(enumerate_graphs(9, 9, 1), CapExceeded);
}

TEST_CASE("coproduct") {
  const GraphTensor unit = coproduct(Graph());
  REQUIRE(unit.terms().size() == 1);
  CHECK(unit.terms().begin()->first == std::make_pair(Graph(), Graph()));

  // Chord 13 straddles every interior cut point.
  const Graph g = G("i=3 f=0 edges=13,22");
  GraphTensor expect;
  expect.add(Graph(), g, 1);
  expect.add(g, Graph(), 1);
  CHECK(coproduct(g) == expect);

  // Two loops separate.
  const GraphTensor two = coproduct(G("i=2 f=0 edges=11,22"));
  CHECK(two.terms().size() == 3);
  CHECK(two.terms().count({G("i=1 f=0 edges=11"), G("i=1 f=0 edges=11")}) == 1);
}

TEST_CASE("coassociativity on a product graph") {
  const GraphTensor t = coproduct(G("i=4 f=0 edges=11,22,34"));
  CHECK(coproduct_left(t) == coproduct_right(t));
}

TEST_CASE("exact linear algebra") {
  SparseMatrix m;
  m.cols = 3;
  m.rows = {{{0, 1}, {1, 1}}, {{1, 1}, {2, 1}}};
  const auto k = kernel(m);
  REQUIRE(k.size() == 1);
  // (1, -1, 1) up to scale.
  const SparseVector& v = k[0];
  REQUIRE(v.size() == 3);
  CHECK(v[0].second == -v[1].second);
  CHECK(v[1].second == -v[2].second);
  const auto x = solve(m, {{0, 2}, {1, 3}});
  REQUIRE(x);
  SparseMatrix twice{1, {{{0, 1}}, {{0, 1}}}};
  CHECK_FALSE(solve(twice, {{0, 1}, {1, 2}}).has_value());
}

TEST_CASE("cocycle_kernel") {
  // A closed graph spans the kernel of its own span. Contracting the arc
  // would put two loops on one vertex, which is zero.
  const Graph closed = G("i=2 f=0 edges=11,22");
  REQUIRE(delta(closed).empty());
  const auto k1 = cocycle_kernel({closed});
  REQUIRE(k1.size() == 1);
  CHECK(k1[0].size() == 1);

  const Graph open = G("i=3 f=0 edges=12,23");
  REQUIRE_FALSE(delta(open).empty());
  CHECK(cocycle_kernel({open}).empty());
  CHECK_THROWS_AS(cocycle_kernel({}), std::invalid_argument);
}

TEST_CASE("enumerate_faces and classify_face") {
  const auto two = enumerate_faces(G("i=2 f=0 edges=12"));
  REQUIRE(two.size() == 1);
  CHECK(two[0].subset == std::vector<int>{1, 2});
  CHECK(classify_face(two[0]).status == FaceStatus::Principal);

  const Graph four = G("i=4 f=0 edges=13,24");
  for (const FaceSpec& f : enumerate_faces(four)) CHECK(f.subset != std::vector<int>{1, 3});
  CHECK_THROWS_AS(classify_face({four, {1, 3}}), FaceError);

  // Brute force over subsets: size >= 2, interval labels consecutive.
  const Graph g = G("i=5 f=1 edges=16,26,36,45");
  int count = 0;
  for (int mask = 0; mask < 64; ++mask) {
    std::vector<int> sub;
    for (int v = 1; v <= 6; ++v) {
      if (mask >> (v - 1) & 1) sub.push_back(v);
    }
    if (sub.size() < 2) continue;
    std::vector<int> iv;
    for (int v : sub) {
      if (v <= 5) iv.push_back(v);
    }
    bool ok = true;
    for (std::size_t j = 1; j < iv.size(); ++j) ok = ok && iv[j] == iv[j - 1] + 1;
    count += ok;
  }
  CHECK(static_cast<int>(enumerate_faces(g).size()) == count);

  const Graph ex = G("i=3 f=2 edges=14,15,24,35,45");
  const FaceVerdict v = classify_face({ex, {1, 4, 5}});
  CHECK(v.status == FaceStatus::Vanishes);
  CHECK(v.rule == FaceRule::LowValence);

  // A 4-valent free vertex: every face containing it with its neighbours
  // has positive pushforward degree.
  const Graph quad = G("i=4 f=1 edges=15,25,35,45");
  const FaceVerdict big = classify_face({quad, {1, 2, 3, 4, 5}});
  CHECK(big.status == FaceStatus::Vanishes);
  CHECK(big.rule == FaceRule::HighValence);
  CHECK(big.pushforward_degree > 0);
}

TEST_CASE("solved cocycle") {
  const CocycleSolution sol = solve_cocycle(5, 4);
  REQUIRE(sol.found);
  CHECK(delta(sol.representative).empty());
  CHECK(sol.representative.coefficient(normalization_graph()) == 1);
  CHECK(has_nontrivalent_term(sol.representative));
  CHECK_FALSE(find_primitive(sol.representative).has_value());
  for (const auto& [g, c] : sol.representative.terms()) CHECK(faces_all_vanish(g));

  // The cache round-trips and refuses another code version.
  const std::string text = cocycle_to_json(sol);
  CHECK(cocycle_from_json(text) == sol.representative);
  std::string other = text;
  other.replace(other.find(kCodeVersion), std::string(kCodeVersion).size(), "0.0.0");
  CHECK_THROWS_AS(cocycle_from_json(other), std::runtime_error);

  // Small bounds give a valid empty report.
  const CocycleSolution small = solve_cocycle(2, 0);
  CHECK_FALSE(small.found);
  CHECK(small.representative.empty());
}
