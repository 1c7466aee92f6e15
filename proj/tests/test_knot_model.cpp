#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kcsi/diagram.hpp"
#include "kcsi/invariants.hpp"
#include "kcsi/knot.hpp"
#include "kcsi/knot_io.hpp"
#include "kcsi/standard_knots.hpp"

using namespace kcsi;

namespace {

constexpr double kPi = std::numbers::pi;

double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

std::vector<int> sign_sequence(const LongKnotDiagram& d) {
  std::vector<int> out;
  for (const Visit& v : d.visits()) out.push_back(v.sign);
  return out;
}

}  // namespace

TEST_CASE("unknot is the straight line") {
  const ParametricLongKnot k = standard_knot("unknot");
  for (double t : {-3.0, -1.0, -0.3, 0.0, 0.7, 1.0, 2.5}) {
    CHECK(distance(k.position(t), {t, 0, 0}) < 1e-14);
    CHECK(distance(k.derivative(t), {1, 0, 0}) < 1e-14);
  }
  CHECK(project_to_diagram(k).empty());
}

TEST_CASE("spline derivatives match finite differences") {
  const ParametricLongKnot k = standard_knot("trefoil_plus", 0.3);
  const double h = 1e-6;
  for (double t : {-0.8, -0.31, 0.05, 0.42, 0.77}) {
    const Vec3 fd = (1 / (2 * h)) * (k.position(t + h) - k.position(t - h));
    CHECK(distance(fd, k.derivative(t)) < 1e-5 * (1 + norm(fd)));
    const Vec3 fd2 = (1 / (2 * h)) * (k.derivative(t + h) - k.derivative(t - h));
    CHECK(distance(fd2, k.second_derivative(t)) < 1e-3 * (1 + norm(fd2)));
  }
  // Clamped ends.
  CHECK(distance(k.position(1.0), {1, 0, 0}) < 1e-12);
  CHECK(distance(k.derivative(-1.0), {1, 0, 0}) < 1e-9);
  CHECK_NOTHROW(k.validate());
}

TEST_CASE("standard knots project to the expected diagrams") {
  const LongKnotDiagram t = project_to_diagram(standard_knot("trefoil_plus"));
  CHECK(t.num_crossings() == 3);
  for (int id : t.ids()) CHECK(t.sign(id) == 1);

  const LongKnotDiagram tm = project_to_diagram(standard_knot("trefoil_minus"));
  CHECK(tm.writhe() == -3);

  const LongKnotDiagram f = project_to_diagram(standard_knot("figure8"));
  CHECK(f.num_crossings() == 4);
  for (std::size_t j = 1; j < f.visits().size(); ++j) CHECK(f.visits()[j].over != f.visits()[j - 1].over);
  CHECK(f.writhe() == 0);

  CHECK(project_to_diagram(standard_knot("granny")).num_crossings() == 6);
  CHECK(project_to_diagram(standard_knot("unknot_descending")).num_crossings() == 3);
  CHECK_THROWS_AS(standard_knot("nope"), KnotError);
}

TEST_CASE("projection is stable under a small perturbation") {
  const ParametricLongKnot k = standard_knot("trefoil_plus");
  std::vector<Vec3> pts = k.points();
  for (std::size_t j = 1; j + 1 < pts.size(); ++j) {
    const double u = static_cast<double>(j);
    pts[j] += Vec3{1e-4 * std::sin(3 * u), 1e-4 * std::cos(5 * u), 1e-5 * std::sin(7 * u)};
  }
  const ParametricLongKnot p(k.params(), pts, k.height());
  CHECK(normalize_ids(project_to_diagram(p)) == normalize_ids(project_to_diagram(k)));
}

TEST_CASE("rotation about the axis") {
  const ParametricLongKnot k = standard_knot("trefoil_plus", 0.3);
  const ParametricLongKnot r0 = rotate_about_axis(k, 0);
  const ParametricLongKnot r2 = rotate_about_axis(k, 2 * kPi);
  for (double t : {-0.9, -0.2, 0.3, 0.8}) {
    CHECK(distance(r0.position(t), k.position(t)) < 1e-14);
    CHECK(distance(r2.position(t), k.position(t)) < 1e-12);
    const Vec3 p = k.position(t), q = rotate_about_axis(k, kPi).position(t);
    CHECK(distance(q, {p.x, -p.y, -p.z}) < 1e-12);
  }
  // Mirror in y and swap of over/under: the signs survive.
  const LongKnotDiagram d = project_to_diagram(k);
  const LongKnotDiagram dpi = project_to_diagram(rotate_about_axis(k, kPi));
  CHECK(sign_sequence(dpi) == sign_sequence(d));
}

TEST_CASE("crossing change") {
  const LongKnotDiagram t = LongKnotDiagram::parse("o1+ u2+ o3+ u1+ o2+ u3+");
  for (int id : t.ids()) {
    const LongKnotDiagram c = crossing_change(t, id);
    CHECK(crossing_change(c, id) == t);
    CHECK(c.writhe() == t.writhe() - 2);
    CHECK(conway(c) == ConwayPolynomial{{1}});
  }
  CHECK(with_sign(t, 1, 1) == t);
  CHECK(with_sign(t, 1, -1) == crossing_change(t, 1));
}

TEST_CASE("connect sum") {
  const LongKnotDiagram t = LongKnotDiagram::parse("o1+ u2+ o3+ u1+ o2+ u3+");
  const LongKnotDiagram f = project_to_diagram(standard_knot("figure8"));
  CHECK(connect_sum(t, LongKnotDiagram()) == t);
  CHECK(connect_sum(LongKnotDiagram(), t) == t);
  const LongKnotDiagram tt = connect_sum(t, t);
  CHECK(tt.num_crossings() == 6);
  CHECK(v2_oracle(tt) == 2);
  CHECK(connect_sum(connect_sum(t, f), t).visits() == connect_sum(t, connect_sum(f, t)).visits());
}

TEST_CASE("Gauss code text") {
  const LongKnotDiagram t = LongKnotDiagram::parse("o1+ u2+ o3+ u1+ o2+ u3+");
  CHECK(t.to_string() == "o1+ u2+ o3+ u1+ o2+ u3+");
  CHECK_THROWS_AS(LongKnotDiagram::parse("o1+ o1+"), DiagramError);
  CHECK_THROWS_AS(LongKnotDiagram::parse("o1+ u1-"), DiagramError);
  CHECK_THROWS_AS(LongKnotDiagram::parse("o1+"), DiagramError);
}

TEST_CASE("knot files") {
  const ParametricLongKnot k = standard_knot("figure8", 0.2);
  const KnotInput in = parse_knot_text(knot_to_text(k), "f8");
  REQUIRE(in.curve);
  CHECK(normalize_ids(in.diagram) == normalize_ids(project_to_diagram(k)));

  const KnotInput g = parse_knot_text("kcsi-knot 1\n# comment\ngauss: o1+ u2+ o3+ u1+ o2+ u3+\n");
  CHECK_FALSE(g.curve);
  CHECK(g.diagram.num_crossings() == 3);
  CHECK(parse_knot_text(diagram_to_text(g.diagram)).diagram == g.diagram);

  CHECK_THROWS_AS(parse_knot_text("gauss: o1+ u1+\n"), KnotParseError);
  CHECK_THROWS_AS(parse_knot_text("kcsi-knot 1\n"), KnotParseError);
  CHECK_THROWS_AS(parse_knot_text("kcsi-knot 1\ngauss: o1+ u1+\npoints: [[0,0,0]]\n"), KnotParseError);
  CHECK_THROWS_AS(load_knot("/nonexistent/knot.txt"), KnotParseError);
  CHECK(load_knot("trefoil_plus").diagram.writhe() == 3);
}
