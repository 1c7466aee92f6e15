#pragma once

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kcsi {

/// Malformed graph data (bad endpoints, zero-valence free vertex, bad text).
class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Directed edge between vertex labels; a loop has from == to.
struct Edge {
  int from = 0;
  int to = 0;
  auto operator<=>(const Edge&) const = default;
};

/// A graph of the complex: interval vertices 1..s in line order, free
/// vertices s+1..s+t, and a list of directed edges.
///
/// The orientation datum is the vertex labeling together with the edge
/// directions. Relabeling free vertices by a permutation p contributes
/// sgn(p); reversing a non-loop edge contributes -1. Loops are tangent
/// edges and exist only at interval vertices. Parallel edges are allowed
/// in the type (they arise under contraction) but such graphs are zero in
/// the complex: their integrand contains a repeated 2-form.
class Graph {
 public:
  Graph() = default;
  Graph(int num_i, int num_f, std::vector<Edge> edges);

  int num_i_vertices() const { return s_; }
  int num_f_vertices() const { return t_; }
  int num_vertices() const { return s_ + t_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  bool is_interval(int v) const { return v >= 1 && v <= s_; }
  bool is_free(int v) const { return v > s_ && v <= s_ + t_; }

  /// Form degree 2e - s - 3t of the configuration-space integral.
  int degree() const { return 2 * num_edges() - s_ - 3 * t_; }
  /// e - t; preserved by the differential.
  int order() const { return num_edges() - t_; }

  /// Number of edge ends at v (a loop counts twice).
  int edge_ends(int v) const;
  /// Valence in the usual sense: edge ends, plus 2 for the line at an
  /// interval vertex.
  int valence(int v) const { return edge_ends(v) + (is_interval(v) ? 2 : 0); }

  bool has_parallel_edges() const;
  bool has_loops() const;
  /// Every free vertex is joined by a path of edges to some interval vertex.
  bool attached_to_line() const;
  bool is_empty() const { return s_ == 0 && t_ == 0 && edges_.empty(); }

  /// Edges sorted, each oriented from the smaller label.
  bool is_canonical() const;

  auto operator<=>(const Graph&) const = default;
  bool operator==(const Graph&) const = default;

  /// `i=<s> f=<t> edges=<p1q1,p2q2,...>`, loops as `pp`.
  std::string to_string() const;
  static Graph parse(std::string_view text);

 private:
  int s_ = 0;
  int t_ = 0;
  std::vector<Edge> edges_;
};

/// Result of canonicalization: the canonical representative and the sign
/// relating the input orientation to it (input = sign * graph).
struct Canonical {
  Graph graph;
  int sign = 1;
};

/// Canonical representative under relabelings of free vertices. Returns
/// nullopt when the graph is zero in the complex: it equals minus itself
/// under an automorphism, has parallel edges, or has a loop at a free
/// vertex.
std::optional<Canonical> canonicalize(const Graph& g);

/// Sign of a permutation given as a vector of distinct integers.
int permutation_sign(const std::vector<int>& perm);

}  // namespace kcsi
