#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kcsi/chain.hpp"
#include "kcsi/enumerate.hpp"
#include "kcsi/linalg.hpp"

namespace kcsi {

/// Bumped whenever a convention that changes cocycle coefficients changes.
inline constexpr const char* kCocycleSchema = "kcsi.cocycle/1";
inline constexpr const char* kCodeVersion = "1.0.0";

/// Matrix of δ restricted to `domain` (columns). Rows are the output
/// graphs, numbered in first-seen order and recorded in `rows`.
SparseMatrix differential_matrix(const std::vector<Graph>& domain, std::map<Graph, int>& rows);

/// Basis of ker δ on span(basis). Throws std::invalid_argument on an empty
/// basis.
std::vector<GraphChain> cocycle_kernel(const std::vector<Graph>& basis);

/// A graph is nontrivalent if some vertex has valence >= 4 (an interval
/// vertex with two or more edge ends counts).
bool is_nontrivalent(const Graph& g);
bool has_nontrivalent_term(const GraphChain& c);

/// All graphs of the given degree and order with no bound on (s, t)
/// beyond what the order forces.
std::vector<Graph> graphs_of_order(int order, int degree);

/// Exact solve of δβ = c over all graphs one degree lower of the same
/// orders. Returns β if c is a coboundary.
std::optional<GraphChain> find_primitive(const GraphChain& c);

/// Every non-principal finite face of every term is classified Vanishes.
bool faces_all_vanish(const Graph& g);

struct CocycleSolution {
  int s_max = 0;
  int t_max = 0;
  int order = 3;
  std::size_t basis_size = 0;
  std::size_t kernel_dimension = 0;
  std::size_t nontrivalent_kernel_elements = 0;
  std::size_t exact_kernel_elements = 0;
  /// Non-exact, normalized; empty when the bounds hold no nonzero class.
  GraphChain representative;
  bool found = false;
};

/// Graph whose coefficient is normalized to +1: five interval vertices,
/// chords 13, 14, 25.
Graph normalization_graph();

/// Enumerates the degree-1 basis of the given order within bounds, keeps
/// graphs whose faces all vanish, computes the kernel, and picks the sparsest non-exact kernel
/// element containing the normalization graph, scaled so that graph has
/// coefficient +1.
CocycleSolution solve_cocycle(int s_max, int t_max, int order = 3, const EnumerationCaps& caps = {6, 4, 7});

/// Versioned JSON record of a representative.
std::string cocycle_to_json(const CocycleSolution& sol);
/// Parses a record written by cocycle_to_json. Throws std::runtime_error on
/// schema or version mismatch.
GraphChain cocycle_from_json(const std::string& text);

}  // namespace kcsi
