#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kcsi/diagram.hpp"
#include "kcsi/invariants.hpp"
#include "kcsi/standard_knots.hpp"

using namespace kcsi;

namespace {
LongKnotDiagram D(const char* text) { return LongKnotDiagram::parse(text); }
const LongKnotDiagram kTrefoil = D("o1+ u2+ o3+ u1+ o2+ u3+");
}  // namespace

TEST_CASE("classify_pair") {
  CHECK(classify_pair(kTrefoil, 1, 2) == PairPattern::Interleaved_13_24);
  const LongKnotDiagram granny = connect_sum(kTrefoil, kTrefoil);
  CHECK(classify_pair(granny, 1, 4) == PairPattern::Nested_12_34);
  CHECK(classify_pair(D("o1+ o2+ u2+ u1+"), 1, 2) == PairPattern::Side_14_23);
  for (int a : granny.ids()) {
    for (int b : granny.ids()) {
      if (a != b) CHECK(classify_pair(granny, a, b) == classify_pair(granny, b, a));
    }
  }
  CHECK_THROWS_AS(classify_pair(kTrefoil, 2, 2), DiagramError);
}

TEST_CASE("Conway polynomial") {
  CHECK(conway(LongKnotDiagram()).to_string() == "1");
  CHECK(conway(kTrefoil).to_string() == "1 + z^2");
  CHECK(conway(project_to_diagram(standard_knot("figure8"))).to_string() == "1 - z^2");
  const ConwayPolynomial g = conway(connect_sum(kTrefoil, kTrefoil));
  CHECK(g == ConwayPolynomial{{1, 0, 2, 0, 1}});
  // A single kink is trivial either way.
  CHECK(conway(D("o1+ u1+")).to_string() == "1");
  CHECK(conway(D("u1- o1-")).to_string() == "1");
  CHECK_THROWS_AS(conway(torus_2n_diagram(7), 5), SkeinCapExceeded);
}

TEST_CASE("v2 oracle and pair count") {
  CHECK(v2_oracle(LongKnotDiagram()) == 0);
  CHECK(v2_oracle(kTrefoil) == 1);
  CHECK(v2_oracle(connect_sum(kTrefoil, kTrefoil)) == 2);
  CHECK(v2_oracle(project_to_diagram(standard_knot("figure8"))) == -1);
  CHECK(v2_oracle(torus_2n_diagram(5)) == 3);
  CHECK(v2_pair_count(LongKnotDiagram()) == 0);
  CHECK(v2_pair_count(kTrefoil) == 1);
  CHECK(pair_sub_patterns().size() == 4);
  for (const LongKnotDiagram& d : diagram_corpus(5)) CHECK(v2_pair_count(d) == v2_oracle(d));
}

TEST_CASE("finite differences") {
  const DiagramInvariant v2 = [](const LongKnotDiagram& d) { return v2_oracle(d); };
  const DiagramInvariant constant = [](const LongKnotDiagram&) { return std::int64_t{7}; };
  const DiagramInvariant crossings = [](const LongKnotDiagram& d) {
    std::int64_t n = 0;
    for (int id : d.ids()) n += d.sign(id) > 0;
    return n * n * n;
  };
  CHECK(second_difference(kTrefoil, 1, 2, constant) == 0);
  int interleaved = 0, other = 0;
  for (const LongKnotDiagram& d : diagram_corpus(5)) {
    const auto ids = d.ids();
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        const bool inter = classify_pair(d, ids[a], ids[b]) == PairPattern::Interleaved_13_24;
        CHECK(second_difference(d, ids[a], ids[b], v2) == (inter ? 1 : 0));
        (inter ? interleaved : other)++;
        for (std::size_t c = b + 1; c < ids.size(); ++c) CHECK(third_difference(d, ids[a], ids[b], ids[c], v2) == 0);
      }
    }
  }
  CHECK(interleaved > 0);
  CHECK(other > 0);
  // The cube of the positive-crossing count has order 3.
  CHECK(third_difference(kTrefoil, 1, 2, 3, crossings) != 0);
  CHECK_THROWS_AS(third_difference(kTrefoil, 1, 1, 2, v2), DiagramError);
  CHECK_THROWS_AS(second_difference(kTrefoil, 1, 9, v2), DiagramError);
}
