#include "kcsi/standard_knots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "kcsi/diagram.hpp"

namespace kcsi {

namespace {

using P2 = std::array<double, 2>;
using ClosedCurve = std::function<P2(double)>;

constexpr double kPi = std::numbers::pi;

// Spacing between consecutive loops, in units of the loop height.
constexpr double kSpacing = 0.35;
// The removed bottom arc reaches this height above the lowest point.
constexpr double kCutHeight = 0.12;
constexpr int kSmoothingPasses = 400;

void append_semicircle(std::vector<P2>& path, P2 centre, double radius, double from, double to) {
  constexpr int steps = 48;
  for (int k = 1; k <= steps; ++k) {
    const double a = from + (to - from) * k / steps;
    path.push_back({centre[0] + radius * std::cos(a), centre[1] + radius * std::sin(a)});
  }
}

// Opens a closed curve at its lowest point and splices it onto the axis
// with two hooks. The path continues from its last point (on the axis).
void append_loop(std::vector<P2>& path, const ClosedCurve& curve) {
  constexpr int m = 1200;
  std::vector<P2> pts(m);
  for (int k = 0; k < m; ++k) pts[k] = curve(2 * kPi * k / m);
  auto lowest = [&] {
    return static_cast<int>(std::min_element(pts.begin(), pts.end(), [](const P2& a, const P2& b) { return a[1] < b[1]; }) -
                            pts.begin());
  };
  int kb = lowest();
  // Traverse so that the curve heads left at the bottom.
  if (pts[(kb + 1) % m][0] > pts[(kb + m - 1) % m][0]) {
    std::reverse(pts.begin(), pts.end());
    kb = lowest();
  }
  double ymin = pts[kb][1], ymax = ymin;
  for (const P2& p : pts) ymax = std::max(ymax, p[1]);
  const double scale = 1.0 / (ymax - ymin);
  const P2 base = pts[kb];
  for (P2& p : pts) p = {(p[0] - base[0]) * scale, (p[1] - base[1]) * scale};

  // Remove the shallow bottom arc; the hooks fit into the opening.
  int first = kb;
  while (pts[first % m][1] < kCutHeight) ++first;
  int last = kb + m;
  while (pts[last % m][1] < kCutHeight) --last;
  const double gap = std::min(-pts[first % m][0], pts[last % m][0]);
  const double lift = std::min(0.2, gap);
  const double hook = 0.7 * gap;
  for (P2& p : pts) p[1] += lift;

  double xmin = 0, xmax = 0;
  for (int k = first; k <= last; ++k) {
    xmin = std::min(xmin, pts[k % m][0]);
    xmax = std::max(xmax, pts[k % m][0]);
  }
  const double origin = path.back()[0] + kSpacing - xmin;
  const double c = origin - hook;
  const double c2 = origin + hook;
  const double r = lift / 2;

  path.push_back({c, 0});
  append_semicircle(path, {c, r}, r, -kPi / 2, kPi / 2);
  for (int k = first; k <= last; ++k) path.push_back({pts[k % m][0] + origin, pts[k % m][1]});
  path.push_back({c2, lift});
  append_semicircle(path, {c2, r}, r, kPi / 2, 3 * kPi / 2);
  path.push_back({origin + xmax + kSpacing, 0});
}

ParametricLongKnot flat_knot(const std::vector<ClosedCurve>& loops, std::vector<double>& params_out,
                             std::vector<Vec3>& points_out) {
  std::vector<P2> path{{0, 0}};
  for (const auto& loop : loops) append_loop(path, loop);
  // Resample by arclength, then round off the corners where hooks meet the
  // loop by repeated neighbour averaging (points on the axis stay put).
  {
    std::vector<double> arc(path.size(), 0.0);
    for (std::size_t k = 1; k < path.size(); ++k) {
      arc[k] = arc[k - 1] + std::hypot(path[k][0] - path[k - 1][0], path[k][1] - path[k - 1][1]);
    }
    constexpr int n = 3000;
    std::vector<P2> even(n + 1);
    std::size_t seg = 1;
    for (int k = 0; k <= n; ++k) {
      const double target = arc.back() * k / n;
      while (seg + 1 < path.size() && arc[seg] < target) ++seg;
      const double len = arc[seg] - arc[seg - 1];
      const double u = len > 0 ? std::clamp((target - arc[seg - 1]) / len, 0.0, 1.0) : 0.0;
      even[k] = {path[seg - 1][0] + u * (path[seg][0] - path[seg - 1][0]),
                 path[seg - 1][1] + u * (path[seg][1] - path[seg - 1][1])};
    }
    std::vector<P2> next(even);
    for (int pass = 0; pass < kSmoothingPasses; ++pass) {
      for (int k = 1; k < n; ++k) {
        next[k] = {0.25 * even[k - 1][0] + 0.5 * even[k][0] + 0.25 * even[k + 1][0],
                   0.25 * even[k - 1][1] + 0.5 * even[k][1] + 0.25 * even[k + 1][1]};
      }
      even.swap(next);
    }
    path = even;
  }
  const double width = path.back()[0];
  const double s = 1.7 / width;
  for (P2& p : path) p = {-0.85 + p[0] * s, p[1] * s};
  path.insert(path.begin(), P2{-1, 0});
  path.push_back({1, 0});

  std::vector<double> arc(path.size(), 0.0);
  for (std::size_t k = 1; k < path.size(); ++k) {
    arc[k] = arc[k - 1] + std::hypot(path[k][0] - path[k - 1][0], path[k][1] - path[k - 1][1]);
  }
  const double total = arc.back();
  const int n = 500 * static_cast<int>(loops.size()) + 200;
  params_out.assign(n + 1, 0.0);
  points_out.assign(n + 1, Vec3{});
  std::size_t seg = 1;
  for (int k = 0; k <= n; ++k) {
    const double target = total * k / n;
    while (seg + 1 < path.size() && arc[seg] < target) ++seg;
    const double len = arc[seg] - arc[seg - 1];
    const double u = len > 0 ? std::clamp((target - arc[seg - 1]) / len, 0.0, 1.0) : 0.0;
    params_out[k] = -1.0 + 2.0 * k / n;
    points_out[k] = {path[seg - 1][0] + u * (path[seg][0] - path[seg - 1][0]),
                     path[seg - 1][1] + u * (path[seg][1] - path[seg - 1][1]), 0.0};
  }
  params_out.front() = -1.0;
  params_out.back() = 1.0;
  points_out.front() = {-1, 0, 0};
  points_out.back() = {1, 0, 0};
  return ParametricLongKnot(params_out, points_out, 0.0);
}

double bump(double u) { return std::abs(u) < 1 ? std::pow(std::cos(kPi * u / 2), 2) : 0.0; }

enum class Lift { Alternate, Flipped, Descending };

// Lifts the over-visits: alternate ones (two choices) or the first visit of
// every crossing (a descending diagram, hence an unknot). Each over-arc
// bump reaches the neighbouring visits, so the curve leaves the plane
// everywhere between visits while under-visits stay at z = 0.
ParametricLongKnot lifted(const std::vector<double>& params, std::vector<Vec3> points,
                          const std::vector<std::pair<double, double>>& crossings, Lift lift, double height) {
  std::vector<double> visits, firsts;
  for (const auto& [a, b] : crossings) {
    visits.push_back(a);
    visits.push_back(b);
    firsts.push_back(std::min(a, b));
  }
  std::sort(visits.begin(), visits.end());
  std::vector<bool> over(visits.size());
  for (std::size_t v = 0; v < visits.size(); ++v) {
    if (lift == Lift::Descending) {
      over[v] = std::find(firsts.begin(), firsts.end(), visits[v]) != firsts.end();
    } else {
      over[v] = (v % 2 == 0) != (lift == Lift::Flipped);
    }
  }
  std::vector<double> width(visits.size());
  for (std::size_t v = 0; v < visits.size(); ++v) {
    double w = 1.0;
    if (v > 0) w = std::min(w, visits[v] - visits[v - 1]);
    if (v + 1 < visits.size()) w = std::min(w, visits[v + 1] - visits[v]);
    width[v] = std::min(w, 0.9 - std::abs(visits[v]));
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    double z = 0;
    for (std::size_t v = 0; v < visits.size(); ++v) {
      if (over[v]) z += bump((params[k] - visits[v]) / width[v]);
    }
    points[k].z = height * z;
  }
  return ParametricLongKnot(params, std::move(points), height);
}

ParametricLongKnot build(const std::vector<ClosedCurve>& loops, int want_sign, double height,
                         bool descending = false) {
  std::vector<double> params;
  std::vector<Vec3> points;
  const ParametricLongKnot flat = flat_knot(loops, params, points);
  ProjectionOptions opt;
  opt.min_gap = -1;
  const auto crossings = crossing_parameters(flat, opt);
  if (descending) return lifted(params, points, crossings, Lift::Descending, height);
  ParametricLongKnot k = lifted(params, points, crossings, Lift::Alternate, height);
  if (want_sign != 0 && project_to_diagram(k).writhe() * want_sign < 0) {
    k = lifted(params, points, crossings, Lift::Flipped, height);
  }
  return k;
}

// (2,3) torus-knot shadow turned so that one lobe points down.
P2 trefoil(double t) {
  const double r = 2 + std::cos(3 * t);
  return {r * std::sin(2 * t), -r * std::cos(2 * t)};
}
P2 figure8(double t) { return {(2 + std::cos(2 * t)) * std::cos(3 * t), (2 + std::cos(2 * t)) * std::sin(3 * t)}; }

}  // namespace

const std::vector<std::string>& standard_knot_names() {
  static const std::vector<std::string> names{"unknot", "unknot_descending", "trefoil_plus", "trefoil_minus", "figure8", "granny"};
  return names;
}

ParametricLongKnot standard_knot(std::string_view name, double height) {
  if (!(height > 0)) throw KnotError("over-arc height must be positive");
  if (name == "unknot") return ParametricLongKnot();
  if (name == "unknot_descending") return build({trefoil}, 0, height, true);
  if (name == "trefoil_plus") return build({trefoil}, 1, height);
  if (name == "trefoil_minus") return build({trefoil}, -1, height);
  if (name == "figure8") return build({figure8}, 0, height);
  if (name == "granny") return build({trefoil, trefoil}, 1, height);
  throw KnotError("unknown standard knot '" + std::string(name) + "'");
}

}  // namespace kcsi
