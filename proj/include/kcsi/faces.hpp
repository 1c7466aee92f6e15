#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kcsi/graph.hpp"

namespace kcsi {

/// Collision of the vertex subset `subset` (sorted labels). When
/// `at_infinity` is set the subset escapes to infinity instead.
struct FaceSpec {
  Graph parent;
  std::vector<int> subset;
  bool at_infinity = false;
};

class FaceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class FaceStatus { Principal, Vanishes, PotentiallyNonzero };

enum class FaceRule {
  None,
  LowValence,    // a vertex of X_A has valence <= 2
  HighValence,   // a vertex of valence >= 4 pushes the degree past dim B_A
  NoLineVertex,  // trivalent, no interval vertex, degree 4 > dim B_A = 0
  Translation,   // X_A disconnected, one component slides freely
  Codimension,   // tripod on the line, Gauss image is coplanar
  Infinity,
};

struct FaceVerdict {
  FaceStatus status = FaceStatus::PotentiallyNonzero;
  FaceRule rule = FaceRule::None;
  // Computed quantities of X_A.
  std::vector<int> valences;  // aligned with subset
  int edges = 0;
  int i_vertices = 0;
  int f_vertices = 0;
  int pushforward_degree = 0;  // 2e - s - 3t + k
  int base_dimension = 0;      // dim B_A
  int components = 0;
};

/// i-vertices of `subset` form a contiguous run on the line.
bool is_consecutive(const Graph& g, const std::vector<int>& subset);

/// All finite faces: |A| >= 2 and consecutive. With `with_infinity`, also
/// the faces A ∪ {∞} (A nonempty; its i-vertices an initial or final run).
std::vector<FaceSpec> enumerate_faces(const Graph& g, bool with_infinity = false);

/// Throws FaceError on a non-consecutive or too small subset.
FaceVerdict classify_face(const FaceSpec& face);

/// Subgraph of the parent spanned by the subset, relabeled so that its
/// interval vertices come first in line order.
Graph collapsing_subgraph(const FaceSpec& face);

std::string to_string(FaceStatus s);
std::string to_string(FaceRule r);
std::string to_string(const FaceVerdict& v);
std::string subset_string(const std::vector<int>& subset, bool at_infinity = false);

}  // namespace kcsi
