#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>

#include "kcsi/graph.hpp"

namespace kcsi {

using Rational = mpq_class;

/// Formal rational combination of canonical graphs. Zero coefficients are
/// never stored.
class GraphChain {
 public:
  using Terms = std::map<Graph, Rational>;

  GraphChain() = default;
  /// The chain 1*g, brought to canonical form (possibly zero).
  explicit GraphChain(const Graph& g);

  /// Adds c*g, canonicalizing g first.
  void add(const Graph& g, const Rational& c);
  GraphChain& operator+=(const GraphChain& other);
  GraphChain& operator-=(const GraphChain& other);
  GraphChain& operator*=(const Rational& c);

  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  Rational coefficient(const Graph& g) const;

  bool operator==(const GraphChain&) const = default;

  /// `<rational>*<graph>; ...`, or `0` for the empty chain.
  std::string to_string() const;
  static GraphChain parse(std::string_view text);

 private:
  void add_canonical(const Graph& g, const Rational& c);
  Terms terms_;
};

GraphChain operator+(GraphChain a, const GraphChain& b);
GraphChain operator-(GraphChain a, const GraphChain& b);
GraphChain operator*(const Rational& c, GraphChain a);

/// Element of the tensor square, keyed by (left, right) canonical graphs.
class GraphTensor {
 public:
  using Key = std::pair<Graph, Graph>;
  using Terms = std::map<Key, Rational>;

  void add(const Graph& left, const Graph& right, const Rational& c);
  GraphTensor& operator+=(const GraphTensor& other);
  GraphTensor& operator-=(const GraphTensor& other);
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  bool operator==(const GraphTensor&) const = default;
  std::string to_string() const;

 private:
  Terms terms_;
};

/// a ⊗ b.
GraphTensor tensor(const GraphChain& a, const GraphChain& b);

/// The contraction differential of a single canonical graph. Terms are
/// the codimension-one collisions: each line arc between consecutive
/// interval vertices, and each non-loop edge with a free endpoint. A chord
/// joining the two collided interval vertices becomes a tangent loop.
/// The result has degree deg(g) + 1 and the same order.
GraphChain delta(const Graph& g);
GraphChain delta(const GraphChain& c);

/// Separation coproduct: sum over cut points on the line that no edge or
/// free vertex straddles, of (left part) ⊗ (right part).
GraphTensor coproduct(const Graph& g);
GraphTensor coproduct(const GraphChain& c);

/// (Δ ⊗ id) and (id ⊗ Δ) applied to a tensor, flattened to ordered triples.
using GraphTriple = std::map<std::tuple<Graph, Graph, Graph>, Rational>;
GraphTriple coproduct_left(const GraphTensor& t);
GraphTriple coproduct_right(const GraphTensor& t);

}  // namespace kcsi
