#include "kcsi/knot.hpp"

#include <algorithm>
#include <cmath>

namespace kcsi {

ParametricLongKnot::ParametricLongKnot() : ParametricLongKnot({-1.0, 1.0}, {{-1, 0, 0}, {1, 0, 0}}) {}

ParametricLongKnot::ParametricLongKnot(std::vector<double> params, std::vector<Vec3> points, double height)
    : params_(std::move(params)), points_(std::move(points)), height_(height) {
  if (params_.size() != points_.size() || params_.size() < 2) throw KnotError("need matching params and points (>= 2)");
  if (params_.front() != -1.0 || params_.back() != 1.0) throw KnotError("parameters must run from -1 to 1");
  for (std::size_t k = 1; k < params_.size(); ++k) {
    if (!(params_[k] > params_[k - 1])) throw KnotError("parameters must increase strictly");
  }
  auto on_axis = [](const Vec3& p, double x) {
    return std::abs(p.x - x) < 1e-12 && std::abs(p.y) < 1e-12 && std::abs(p.z) < 1e-12;
  };
  if (!on_axis(points_.front(), -1.0) || !on_axis(points_.back(), 1.0)) {
    throw KnotError("end points must be (-1,0,0) and (1,0,0)");
  }
  points_.front() = {-1, 0, 0};
  points_.back() = {1, 0, 0};
  build();
}

ParametricLongKnot ParametricLongKnot::from_points(std::vector<Vec3> points, double height) {
  auto near = [](const Vec3& p, double x) { return std::abs(p.x - x) + std::abs(p.y) + std::abs(p.z) < 1e-12; };
  if (points.empty() || !near(points.front(), -1.0)) points.insert(points.begin(), Vec3{-1, 0, 0});
  if (!near(points.back(), 1.0)) points.push_back({1, 0, 0});
  const std::size_t n = points.size();
  std::vector<double> params(n);
  for (std::size_t k = 0; k < n; ++k) params[k] = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n - 1);
  params.back() = 1.0;
  return ParametricLongKnot(std::move(params), std::move(points), height);
}

void ParametricLongKnot::build() {
  const std::size_t n = params_.size() - 1;  // segments
  std::vector<Vec3> slope(n + 1);
  slope[0] = {1, 0, 0};
  slope[n] = {1, 0, 0};
  if (n >= 2) {
    // Tridiagonal C² system for interior slopes (Thomas algorithm).
    const std::size_t m = n - 1;
    std::vector<double> lower(m), diag(m), upper(m);
    std::vector<Vec3> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = i + 1;
      const double h0 = params_[k] - params_[k - 1];
      const double h1 = params_[k + 1] - params_[k];
      lower[i] = 1.0 / h0;
      diag[i] = 2.0 * (1.0 / h0 + 1.0 / h1);
      upper[i] = 1.0 / h1;
      rhs[i] = (3.0 / (h0 * h0)) * (points_[k] - points_[k - 1]) + (3.0 / (h1 * h1)) * (points_[k + 1] - points_[k]);
    }
    rhs[0] -= lower[0] * slope[0];
    rhs[m - 1] -= upper[m - 1] * slope[n];
    for (std::size_t i = 1; i < m; ++i) {
      const double w = lower[i] / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    slope[m] = (1.0 / diag[m - 1]) * rhs[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) slope[i + 1] = (1.0 / diag[i]) * (rhs[i] - upper[i] * slope[i + 2]);
  }
  a_.resize(n);
  b_.resize(n);
  c_.resize(n);
  d_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double h = params_[k + 1] - params_[k];
    const Vec3 chord = (1.0 / h) * (points_[k + 1] - points_[k]);
    a_[k] = points_[k];
    b_[k] = slope[k];
    c_[k] = (1.0 / h) * (3.0 * chord - 2.0 * slope[k] - slope[k + 1]);
    d_[k] = (1.0 / (h * h)) * (slope[k] + slope[k + 1] - 2.0 * chord);
  }
}

int ParametricLongKnot::segment(double t) const {
  auto it = std::upper_bound(params_.begin(), params_.end(), t);
  int k = static_cast<int>(it - params_.begin()) - 1;
  return std::clamp(k, 0, static_cast<int>(a_.size()) - 1);
}

Vec3 ParametricLongKnot::position(double t) const {
  if (t <= -1.0 || t >= 1.0) return {t, 0, 0};
  const int k = segment(t);
  const double u = t - params_[k];
  return a_[k] + u * (b_[k] + u * (c_[k] + u * d_[k]));
}

Vec3 ParametricLongKnot::derivative(double t) const {
  if (t <= -1.0 || t >= 1.0) return {1, 0, 0};
  const int k = segment(t);
  const double u = t - params_[k];
  return b_[k] + u * (2.0 * c_[k] + 3.0 * u * d_[k]);
}

Vec3 ParametricLongKnot::second_derivative(double t) const {
  if (t <= -1.0 || t >= 1.0) return {0, 0, 0};
  const int k = segment(t);
  const double u = t - params_[k];
  return 2.0 * c_[k] + 6.0 * u * d_[k];
}

ParametricLongKnot ParametricLongKnot::rotated(double angle) const {
  std::vector<Vec3> pts;
  pts.reserve(points_.size());
  for (const Vec3& p : points_) pts.push_back(rotate_x(p, angle));
  pts.front() = {-1, 0, 0};
  pts.back() = {1, 0, 0};
  return ParametricLongKnot(params_, std::move(pts), height_);
}

ParametricLongKnot rotate_about_axis(const ParametricLongKnot& k, double angle) { return k.rotated(angle); }

double ParametricLongKnot::min_self_distance(int samples) const {
  // Samples cover [-1.5, 1.5] so the axis rays are included.
  const double lo = -1.5;
  const double hi = 1.5;
  std::vector<Vec3> p(samples + 1);
  std::vector<double> arc(samples + 1, 0.0);
  for (int i = 0; i <= samples; ++i) {
    p[i] = position(lo + (hi - lo) * i / samples);
    if (i) arc[i] = arc[i - 1] + norm(p[i] - p[i - 1]);
  }
  double step = 0;
  for (int i = 1; i <= samples; ++i) step = std::max(step, arc[i] - arc[i - 1]);
  // Points closer along the curve than the gap are neighbours, not a
  // self-approach. A gap of pi*d/2 keeps curvature-bounded arcs apart.
  double best = INFINITY;
  for (int i = 0; i <= samples; ++i) {
    for (int j = i + 1; j <= samples; ++j) {
      const double along = arc[j] - arc[i];
      const double d = norm(p[j] - p[i]);
      if (along > std::max(4.0 * step, 2.0 * d)) best = std::min(best, d);
    }
  }
  return best;
}

void ParametricLongKnot::validate(int samples) const {
  for (int i = 0; i <= samples; ++i) {
    const double t = -1.0 + 2.0 * i / samples;
    if (norm(derivative(t)) < 1e-9) throw KnotError("derivative vanishes near t=" + std::to_string(t));
  }
  const double d = min_self_distance(samples);
  if (!(d > 1e-6)) throw KnotError("curve is not injective at the sampled resolution (min distance " + std::to_string(d) + ")");
}

}  // namespace kcsi
