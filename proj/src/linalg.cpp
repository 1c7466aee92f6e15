#include "kcsi/linalg.hpp"

#include <algorithm>
#include <map>

namespace kcsi {

namespace {

// a += c * b
void axpy(SparseVector& a, const Rational& c, const SparseVector& b) {
  SparseVector out;
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      out.push_back(std::move(*i++));
    } else if (i == a.end() || j->first < i->first) {
      out.emplace_back(j->first, c * j->second);
      ++j;
    } else {
      Rational v = i->second + c * j->second;
      if (v != 0) out.emplace_back(i->first, std::move(v));
      ++i;
      ++j;
    }
  }
  a.swap(out);
}

}  // namespace

std::vector<int> rref(SparseMatrix& m) {
  // Forward elimination with short-row-first pivot choice.
  std::vector<SparseVector> pending;
  for (auto& r : m.rows) {
    if (!r.empty()) pending.push_back(std::move(r));
  }
  std::map<int, SparseVector> pivots;  // pivot column -> row with leading 1
  std::sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  for (auto& row : pending) {
    while (!row.empty()) {
      auto it = pivots.find(row.front().first);
      if (it == pivots.end()) break;
      Rational c = -row.front().second;
      axpy(row, c, it->second);
    }
    if (row.empty()) continue;
    Rational lead = row.front().second;
    for (auto& [col, v] : row) v /= lead;
    pivots.emplace(row.front().first, std::move(row));
  }
  // Back substitution, highest pivot first.
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    const SparseVector& prow = it->second;
    const int pc = it->first;
    for (auto jt = pivots.begin(); jt->first < pc; ++jt) {
      SparseVector& r = jt->second;
      auto hit = std::lower_bound(r.begin(), r.end(), pc, [](const auto& e, int c) { return e.first < c; });
      if (hit != r.end() && hit->first == pc) {
        Rational c = -hit->second;
        axpy(r, c, prow);
      }
    }
  }
  m.rows.clear();
  std::vector<int> cols;
  for (auto& [c, r] : pivots) {
    cols.push_back(c);
    m.rows.push_back(std::move(r));
  }
  return cols;
}

std::vector<SparseVector> kernel(SparseMatrix m) {
  const auto pivot_cols = rref(m);
  std::vector<bool> is_pivot(m.cols, false);
  for (int c : pivot_cols) is_pivot[c] = true;
  // Column f of the RREF, as (pivot row -> value) entries.
  std::vector<std::vector<std::pair<int, Rational>>> by_col(m.cols);
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    for (const auto& [c, v] : m.rows[r]) {
      if (!is_pivot[c]) by_col[c].emplace_back(static_cast<int>(r), v);
    }
  }
  std::vector<SparseVector> basis;
  for (int f = 0; f < m.cols; ++f) {
    if (is_pivot[f]) continue;
    SparseVector v;
    for (const auto& [r, val] : by_col[f]) v.emplace_back(pivot_cols[r], -val);
    v.emplace_back(f, Rational(1));
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<SparseVector> solve(const SparseMatrix& m, const SparseVector& b) {
  // Augment with the right-hand side as an extra column.
  SparseMatrix aug;
  aug.cols = m.cols + 1;
  aug.rows = m.rows;
  int max_row = static_cast<int>(aug.rows.size());
  for (const auto& [r, v] : b) max_row = std::max(max_row, r + 1);
  aug.rows.resize(max_row);
  for (const auto& [r, v] : b) {
    if (v != 0) aug.rows[r].emplace_back(m.cols, v);
  }
  const auto pivot_cols = rref(aug);
  SparseVector x;
  for (std::size_t r = 0; r < aug.rows.size(); ++r) {
    if (pivot_cols[r] == m.cols) return std::nullopt;
    const auto& row = aug.rows[r];
    if (row.back().first == m.cols) x.emplace_back(pivot_cols[r], row.back().second);
  }
  std::sort(x.begin(), x.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return x;
}

}  // namespace kcsi
