#pragma once

#include <gmpxx.h>

#include <optional>
#include <utility>
#include <vector>

namespace kcsi {

using Rational = mpq_class;
using SparseVector = std::vector<std::pair<int, Rational>>;  // sorted by index, no zeros

/// Row-major sparse matrix over Q.
struct SparseMatrix {
  int cols = 0;
  std::vector<SparseVector> rows;
};

/// Reduced row echelon form. Returns the pivot column of each nonzero row;
/// `m` is overwritten with its RREF (zero rows removed).
std::vector<int> rref(SparseMatrix& m);

/// Basis of {x : M x = 0}. One vector per free column, with a 1 in that
/// column.
std::vector<SparseVector> kernel(SparseMatrix m);

/// Some x with M x = b, or nullopt if inconsistent. `b` is indexed by row.
std::optional<SparseVector> solve(const SparseMatrix& m, const SparseVector& b);

}  // namespace kcsi
