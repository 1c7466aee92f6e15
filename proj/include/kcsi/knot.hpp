#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kcsi/vec3.hpp"

namespace kcsi {

class KnotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A C¹ long knot: a clamped cubic spline through control points on
/// [-1, 1] with f(±1) = (±1, 0, 0) and f'(±1) = (1, 0, 0), extended by
/// f(t) = (t, 0, 0) outside.
class ParametricLongKnot {
 public:
  /// The trivial long knot t ↦ (t, 0, 0).
  ParametricLongKnot();

  /// Spline through (params[k], points[k]). params must increase from -1
  /// to 1 and the end points must be (∓1, 0, 0).
  ParametricLongKnot(std::vector<double> params, std::vector<Vec3> points, double height = 0.05);

  /// Control points at equally spaced parameters; (-1,0,0) and (1,0,0) are
  /// prepended/appended when missing.
  static ParametricLongKnot from_points(std::vector<Vec3> points, double height = 0.05);

  Vec3 position(double t) const;
  Vec3 derivative(double t) const;
  Vec3 second_derivative(double t) const;

  /// Nominal over-arc height used at construction.
  double height() const { return height_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<Vec3>& points() const { return points_; }

  /// Pointwise rotation about the x-axis.
  ParametricLongKnot rotated(double angle) const;

  /// Sampled checks: nonvanishing derivative and a positive self-distance
  /// between non-neighbouring samples. Throws KnotError.
  void validate(int samples = 4000) const;

  /// Smallest distance between samples more than `gap` apart in arclength.
  double min_self_distance(int samples = 4000) const;

 private:
  void build();
  int segment(double t) const;

  std::vector<double> params_;
  std::vector<Vec3> points_;
  // Per-segment cubic coefficients: p(t) = a + b u + c u² + d u³, u = t - t_k.
  std::vector<Vec3> a_, b_, c_, d_;
  double height_ = 0.05;
};

ParametricLongKnot rotate_about_axis(const ParametricLongKnot& k, double angle);

}  // namespace kcsi
