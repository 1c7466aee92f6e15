#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kcsi/knot.hpp"

namespace kcsi {

class DiagramError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One passage of the line through a crossing.
struct Visit {
  int id = 0;
  bool over = false;
  int sign = 1;
  bool operator==(const Visit&) const = default;
};

/// Signed Gauss code of a long-knot diagram: visits in line order.
class LongKnotDiagram {
 public:
  LongKnotDiagram() = default;
  /// Validates: each id twice, once over and once under, equal signs.
  explicit LongKnotDiagram(std::vector<Visit> visits);

  const std::vector<Visit>& visits() const { return visits_; }
  int num_crossings() const { return static_cast<int>(visits_.size() / 2); }
  bool empty() const { return visits_.empty(); }
  /// Crossing ids in increasing order.
  std::vector<int> ids() const;
  bool has(int id) const;
  /// Positions (first, second) of the two visits of a crossing.
  std::pair<int, int> positions(int id) const;
  int sign(int id) const;
  int writhe() const;
  int max_id() const;

  /// `o1+ u2+ o3+ u1+ o2+ u3+`.
  std::string to_string() const;
  static LongKnotDiagram parse(std::string_view text);

  bool operator==(const LongKnotDiagram&) const = default;

 private:
  std::vector<Visit> visits_;
};

/// Swap over/under at one crossing and negate its sign.
LongKnotDiagram crossing_change(const LongKnotDiagram& d, int id);
/// Resolve a crossing to the given sign (a crossing change if needed).
LongKnotDiagram with_sign(const LongKnotDiagram& d, int id, int sign);
/// b follows a along the line; b's ids are shifted past a's.
LongKnotDiagram connect_sum(const LongKnotDiagram& a, const LongKnotDiagram& b);
/// Renumber ids 1..m in order of first visit.
LongKnotDiagram normalize_ids(const LongKnotDiagram& d);

struct ProjectionOptions {
  int samples = 6000;
  double min_angle = 1e-3;   // sine of the crossing angle
  double min_gap = 1e-9;     // vertical separation at a crossing
};

/// Crossings of the xy-projection, over/under from z, sign from the
/// right-hand rule (positive when det(over', under') > 0). Throws
/// DiagramError on tangential or triple points.
LongKnotDiagram project_to_diagram(const ParametricLongKnot& k, const ProjectionOptions& opt = {});

/// Parameter values (t_first, t_second) of each crossing found by the
/// projection, in id order.
std::vector<std::pair<double, double>> crossing_parameters(const ParametricLongKnot& k,
                                                           const ProjectionOptions& opt = {});

}  // namespace kcsi
