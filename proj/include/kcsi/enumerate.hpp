#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "kcsi/graph.hpp"

namespace kcsi {

/// Raised when an enumeration request exceeds the configured caps.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerationCaps {
  int max_i_vertices = 6;
  int max_f_vertices = 2;
  int max_edges = 6;
};

/// All canonical nonzero graphs with s <= s_max, t <= t_max and the given
/// degree, up to signed isomorphism. Filters: no parallel edges, at most one
/// loop per interval vertex, every interval vertex carries an edge, free
/// vertices have valence >= 3 and are connected to the line.
/// If `order` is set only graphs of that order are produced.
/// Sorted; throws CapExceeded when bounds exceed `caps`.
std::vector<Graph> enumerate_graphs(int s_max, int t_max, int target_degree,
                                    std::optional<int> order = std::nullopt,
                                    const EnumerationCaps& caps = {});

/// Trivalent in the sense of the vanishing theorem: every free vertex has
/// valence 3 and every interval vertex carries exactly one edge end.
bool is_trivalent(const Graph& g);

}  // namespace kcsi
