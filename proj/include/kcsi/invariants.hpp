#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kcsi/diagram.hpp"

namespace kcsi {

/// Relative order of the four visits of two crossings a, b along the line
/// (a visited first). 13_24: a b a b. 12_34: a a b b. 14_23: a b b a.
enum class PairPattern { Interleaved_13_24, Nested_12_34, Side_14_23 };

std::string to_string(PairPattern p);

PairPattern classify_pair(const LongKnotDiagram& d, int id1, int id2);

class SkeinCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integer polynomial in z; coefficient k multiplies z^k.
struct ConwayPolynomial {
  std::vector<std::int64_t> coeffs;

  std::int64_t coefficient(std::size_t k) const { return k < coeffs.size() ? coeffs[k] : 0; }
  /// `1 + z^2`, `1 - z^2`, `0`.
  std::string to_string() const;
  bool operator==(const ConwayPolynomial&) const = default;
};

/// Skein recursion on the first non-descending crossing, memoized per
/// thread on relabeled codes.
ConwayPolynomial conway(const LongKnotDiagram& d, int cap = 16);

std::int64_t v2_oracle(const LongKnotDiagram& d);

/// Over/under flags at the first two visits t1 < t2 of an interleaved pair.
struct PairSubPattern {
  bool first_over = false;
  bool second_over = false;
  bool operator==(const PairSubPattern&) const = default;
};

/// The four candidates, in the order used by the oracle search.
std::vector<PairSubPattern> pair_sub_patterns();
std::string to_string(const PairSubPattern& p);

/// Sub-pattern selected against the Conway oracle.
PairSubPattern v2_sub_pattern();

/// Sum of e1*e2 over interleaved pairs whose first two visits match `p`.
std::int64_t v2_pair_count(const LongKnotDiagram& d, const PairSubPattern& p);
std::int64_t v2_pair_count(const LongKnotDiagram& d);

using DiagramInvariant = std::function<std::int64_t(const LongKnotDiagram&)>;

std::int64_t second_difference(const LongKnotDiagram& d, int id1, int id2, const DiagramInvariant& inv);
std::int64_t third_difference(const LongKnotDiagram& d, int id1, int id2, int id3, const DiagramInvariant& inv);

/// Diagrams with at most `max_crossings` crossings: every sign choice on
/// the kink, trefoil, figure-eight and (2,5), (2,7) torus shadows, and on
/// their connect sums.
std::vector<LongKnotDiagram> diagram_corpus(int max_crossings = 8);

/// Long torus knot T(2,n) diagram, n odd, all crossings positive.
LongKnotDiagram torus_2n_diagram(int n);

}  // namespace kcsi
