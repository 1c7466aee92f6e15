#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kcsi/chain.hpp"
#include "kcsi/cocycle.hpp"
#include "kcsi/integration.hpp"
#include "kcsi/standard_knots.hpp"

using namespace kcsi;

namespace {

constexpr double kPi = std::numbers::pi;

Graph G(const char* text) { return Graph::parse(text); }

// Unit tangent of the rotated knot.
Vec3 tangent(const ParametricLongKnot& k, double s, double x) { return rotate_x(normalized(k.derivative(x)), s); }

}  // namespace

TEST_CASE("volume forms") {
  const SphereVolumeForm u = SphereVolumeForm::uniform();
  CHECK(u.total_mass() == doctest::Approx(1).epsilon(1e-6));
  CHECK(u.density({0, 0, 1}) == doctest::Approx(1 / (4 * kPi)));
  const SphereVolumeForm b = SphereVolumeForm::parse("bump:0.3");
  CHECK(b.mode() == SphereVolumeForm::Mode::PolarBump);
  CHECK(b.total_mass() == doctest::Approx(1).epsilon(1e-6));
  CHECK(b.density({1, 0, 0}) == 0);
  CHECK(b.density({0, 0, -1}) == doctest::Approx(b.density({0, 0, 1})));
  const Vec3 v = normalized(Vec3{0.1, 0.05, 1});
  CHECK(b.density(-v) == doctest::Approx(b.density(v)));
  CHECK_THROWS_AS(SphereVolumeForm::parse("bump:x"), std::invalid_argument);
  CHECK_THROWS_AS(SphereVolumeForm::parse("gaussian"), std::invalid_argument);
}

TEST_CASE("gauss_map") {
  const ParametricLongKnot line;
  ConfigurationPoint cp;
  cp.s = 0.7;
  cp.x = {-0.5, 0.5};
  const Vec3 chord = gauss_map(line, cp, 2, {1, 2});
  CHECK(norm(chord - Vec3{1, 0, 0}) < 1e-14);

  const ParametricLongKnot k = standard_knot("trefoil_plus", 0.3);
  cp.x = {1.5, 2.0};
  CHECK(norm(gauss_map(k, cp, 2, {1, 1}) - Vec3{1, 0, 0}) < 1e-12);

  ConfigurationPoint up;
  up.s = 0;
  up.x = {0.2};
  up.y = {Vec3{0.2, 0, 1.5}};
  CHECK(norm(gauss_map(line, up, 1, {1, 2}) - Vec3{0, 0, 1}) < 1e-14);

  ConfigurationPoint clash;
  clash.x = {0.2};
  clash.y = {Vec3{0.2, 0, 0}};
  CHECK_THROWS_AS(gauss_map(line, clash, 1, {1, 2}), IntegrationError);
}

TEST_CASE("integrand of the loop graph matches finite differences") {
  // For {11} the fiber is (s, x) and the form is rho(u) u.(u_s x u_x).
  const ParametricLongKnot k = standard_knot("trefoil_plus", 0.3);
  const Graph loop = G("i=1 f=0 edges=11");
  const SphereVolumeForm vol = SphereVolumeForm::uniform();
  const double h = 1e-6;
  for (auto [s, x] : {std::pair{0.3, -0.4}, {2.1, 0.15}, {4.0, 0.6}}) {
    const Vec3 u = tangent(k, s, x);
    const Vec3 us = (1 / (2 * h)) * (tangent(k, s + h, x) - tangent(k, s - h, x));
    const Vec3 ux = (1 / (2 * h)) * (tangent(k, s, x + h) - tangent(k, s, x - h));
    const double expect = vol.density(u) * dot(u, cross(us, ux));
    ConfigurationPoint cp;
    cp.s = s;
    cp.x = {x};
    const double got = integrand(k, loop, cp, vol);
    CHECK(std::abs(got - kPairingSign * expect) < 1e-4 * (1 + std::abs(expect)));
  }
}

TEST_CASE("integrand vanishing cases") {
  // Outside the bump support.
  const ParametricLongKnot k = standard_knot("trefoil_plus", 0.3);
  const SphereVolumeForm bump = SphereVolumeForm::polar_bump(0.3);
  ConfigurationPoint cp;
  cp.s = 0;
  cp.x = {-1.5, -0.4, 0.1, 0.5, 1.3};
  CHECK(integrand(k, normalization_graph(), cp, bump) == 0);

  // Chords of the straight line all point along (1,0,0).
  const ParametricLongKnot line;
  cp.s = 1.1;
  cp.x = {-0.7, -0.2, 0.1, 0.4, 0.9};
  CHECK(integrand(line, normalization_graph(), cp, SphereVolumeForm::uniform()) == 0);

  // A triangle makes three coplanar Gauss images.
  const Graph tri = G("i=3 f=2 edges=14,15,24,35,45");
  CHECK(has_triangle(tri));
  CHECK_FALSE(has_triangle(normalization_graph()));
  ConfigurationPoint ct;
  ct.s = 0.4;
  ct.x = {-0.5, 0.1, 0.6};
  ct.y = {Vec3{0.1, 0.3, 0.2}, Vec3{-0.2, -0.1, 0.4}};
  CHECK(std::abs(integrand(k, tri, ct, SphereVolumeForm::uniform())) < 1e-12);

  ConfigurationPoint bad;
  bad.x = {0.1};
  CHECK_THROWS_AS(integrand(k, normalization_graph(), bad, bump), IntegrationError);
  CHECK_THROWS_AS(integrand(k, G("i=2 f=0 edges=12"), bad, bump), IntegrationError);
}

TEST_CASE("face witnesses") {
  const ParametricLongKnot k = standard_knot("trefoil_plus", 0.3);
  const SphereVolumeForm vol = SphereVolumeForm::uniform();
  const Graph ex = G("i=3 f=2 edges=14,15,24,35,45");
  const WitnessReport r = face_symmetry_witness(k, {ex, {1, 4, 5}}, vol, 200);
  CHECK(r.rule == FaceRule::LowValence);
  CHECK(r.used == 200);
  CHECK(r.max_violation < 1e-8);
  CHECK(r.expected_sign == -1);

  // A free-only component of the collapsing subgraph slides freely.
  const Graph tr = G("i=3 f=4 edges=12,34,45,46,47,56,57,67");
  const WitnessReport t = face_symmetry_witness(k, {tr, {1, 2, 4, 5, 6, 7}}, vol, 50);
  CHECK(t.rule == FaceRule::Translation);
  CHECK(t.max_violation < 1e-8);

  // Tripod on the line: coplanar Gauss images.
  const WitnessReport c = face_symmetry_witness(k, {G("i=3 f=1 edges=14,24,34"), {1, 2, 3, 4}}, vol, 50);
  CHECK(c.rule == FaceRule::Codimension);
  CHECK(c.max_violation < 1e-8);

  CHECK_THROWS_AS(face_symmetry_witness(k, {ex, {1, 2}}, vol, 10), FaceError);
}

TEST_CASE("pair_gramain is deterministic and thread independent") {
  const ParametricLongKnot k = standard_knot("trefoil_plus", 0.3);
  GraphChain c;
  c.add(normalization_graph(), 1);
  SamplerConfig cfg;
  cfg.samples = 20000;
  cfg.seed = 5;
  cfg.threads = 1;
  const MCEstimate a = pair_gramain(k, c, SphereVolumeForm::uniform(), cfg);
  cfg.threads = 3;
  const MCEstimate b = pair_gramain(k, c, SphereVolumeForm::uniform(), cfg);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  CHECK(a.samples == 20000);
  CHECK(std::isfinite(a.value));
  cfg.seed = 6;
  CHECK(pair_gramain(k, c, SphereVolumeForm::uniform(), cfg).value != a.value);
}

TEST_CASE("planar unknot pairs to exactly zero") {
  GraphChain c;
  c.add(normalization_graph(), 1);
  c.add(G("i=4 f=1 edges=11,25,35,45"), -2);
  SamplerConfig cfg;
  cfg.samples = 5000;
  const MCEstimate e = pair_gramain(ParametricLongKnot(), c, SphereVolumeForm::uniform(), cfg);
  CHECK(e.value == 0);
}
