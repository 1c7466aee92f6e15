#include "kcsi/enumerate.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace kcsi {

bool is_trivalent(const Graph& g) {
  for (int v = 1; v <= g.num_vertices(); ++v) {
    if (g.valence(v) != 3) return false;
  }
  return true;
}

namespace {

void enumerate_shape(int s, int t, int e, std::set<Graph>& out) {
  const int n = s + t;
  std::vector<Edge> slots;
  for (int a = 1; a <= s; ++a) slots.push_back({a, a});
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) slots.push_back({a, b});
  }
  const int m = static_cast<int>(slots.size());
  if (e > m) return;

  std::vector<int> pick(e);
  std::vector<int> ends(n + 1);
  // Lexicographic walk over e-subsets of the slots.
  for (int k = 0; k < e; ++k) pick[k] = k;
  while (true) {
    std::fill(ends.begin(), ends.end(), 0);
    std::vector<Edge> edges;
    edges.reserve(e);
    for (int k : pick) {
      edges.push_back(slots[k]);
      ++ends[slots[k].from];
      ++ends[slots[k].to];
    }
    bool ok = true;
    for (int v = 1; v <= s && ok; ++v) ok = ends[v] >= 1;
    for (int v = s + 1; v <= n && ok; ++v) ok = ends[v] >= 3;
    if (ok) {
      Graph g(s, t, std::move(edges));
      if (g.attached_to_line()) {
        if (auto c = canonicalize(g)) out.insert(c->graph);
      }
    }
    int k = e - 1;
    while (k >= 0 && pick[k] == m - e + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int j = k + 1; j < e; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace

std::vector<Graph> enumerate_graphs(int s_max, int t_max, int target_degree, std::optional<int> order,
                                    const EnumerationCaps& caps) {
  if (s_max < 0 || t_max < 0) throw CapExceeded("enumeration bounds must be non-negative");
  if (s_max > caps.max_i_vertices || t_max > caps.max_f_vertices) {
    throw CapExceeded("bounds (" + std::to_string(s_max) + "," + std::to_string(t_max) + ") exceed caps (" +
                      std::to_string(caps.max_i_vertices) + "," + std::to_string(caps.max_f_vertices) + ")");
  }
  std::set<Graph> found;
  for (int s = 0; s <= s_max; ++s) {
    for (int t = 0; t <= t_max; ++t) {
      const int twice_e = target_degree + s + 3 * t;
      if (twice_e < 0 || twice_e % 2 != 0) continue;
      const int e = twice_e / 2;
      if (e > caps.max_edges) continue;
      if (order && e - t != *order) continue;
      if (s == 0 && t == 0) {
        if (e == 0) found.insert(Graph());
        continue;
      }
      if (s == 0) continue;  // free vertices must reach the line
      enumerate_shape(s, t, e, found);
    }
  }
  return {found.begin(), found.end()};
}

}  // namespace kcsi
