#include "kcsi/faces.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace kcsi {

bool is_consecutive(const Graph& g, const std::vector<int>& subset) {
  int lo = g.num_i_vertices() + 1;
  int hi = 0;
  int count = 0;
  for (int v : subset) {
    if (g.is_interval(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      ++count;
    }
  }
  return count == 0 || hi - lo + 1 == count;
}

std::vector<FaceSpec> enumerate_faces(const Graph& g, bool with_infinity) {
  const int n = g.num_vertices();
  const int s = g.num_i_vertices();
  std::vector<FaceSpec> out;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> subset;
    for (int v = 1; v <= n; ++v) {
      if (mask & (1u << (v - 1))) subset.push_back(v);
    }
    if (!is_consecutive(g, subset)) continue;
    if (subset.size() >= 2) out.push_back({g, subset, false});
    if (with_infinity) {
      // A run escaping to infinity must contain an end of the line.
      int lo = s + 1;
      int hi = 0;
      for (int v : subset) {
        if (g.is_interval(v)) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      if (hi == 0 || lo == 1 || hi == s) out.push_back({g, subset, true});
    }
  }
  std::sort(out.begin(), out.end(), [](const FaceSpec& a, const FaceSpec& b) {
    if (a.subset.size() != b.subset.size()) return a.subset.size() < b.subset.size();
    if (a.subset != b.subset) return a.subset < b.subset;
    return a.at_infinity < b.at_infinity;
  });
  return out;
}

Graph collapsing_subgraph(const FaceSpec& face) {
  const Graph& g = face.parent;
  std::vector<int> label(g.num_vertices() + 1, 0);
  int s = 0;
  int t = 0;
  for (int v : face.subset) {
    if (g.is_interval(v)) label[v] = ++s;
  }
  for (int v : face.subset) {
    if (g.is_free(v)) label[v] = s + ++t;
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (label[e.from] && label[e.to]) edges.push_back({label[e.from], label[e.to]});
  }
  // Free vertices with no edge inside A are legal here, so bypass the
  // valence check by counting them only through the edge list.
  std::vector<int> ends(s + t + 1, 0);
  for (const Edge& e : edges) {
    ++ends[e.from];
    ++ends[e.to];
  }
  bool isolated_free = false;
  for (int v = s + 1; v <= s + t; ++v) isolated_free = isolated_free || ends[v] == 0;
  if (isolated_free) throw FaceError("collapsing subgraph has an isolated free vertex");
  return Graph(s, t, std::move(edges));
}

FaceVerdict classify_face(const FaceSpec& face) {
  const Graph& g = face.parent;
  for (int v : face.subset) {
    if (v < 1 || v > g.num_vertices()) throw FaceError("face vertex out of range");
  }
  if (!std::is_sorted(face.subset.begin(), face.subset.end()) ||
      std::adjacent_find(face.subset.begin(), face.subset.end()) != face.subset.end()) {
    throw FaceError("face subset must be sorted and distinct");
  }
  if (!is_consecutive(g, face.subset)) throw FaceError("face subset " + subset_string(face.subset) + " is not consecutive");

  FaceVerdict verdict;
  if (face.at_infinity) {
    if (face.subset.empty()) throw FaceError("infinity face needs a nonempty subset");
    verdict.status = FaceStatus::Vanishes;
    verdict.rule = FaceRule::Infinity;
    return verdict;
  }
  if (face.subset.size() < 2) throw FaceError("face subset needs at least two vertices");

  std::vector<int> pos(g.num_vertices() + 1, -1);
  for (std::size_t k = 0; k < face.subset.size(); ++k) pos[face.subset[k]] = static_cast<int>(k);
  std::vector<int> ends(face.subset.size(), 0);
  std::vector<int> parent(face.subset.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : g.edges()) {
    if (pos[e.from] < 0 || pos[e.to] < 0) continue;
    ++verdict.edges;
    ++ends[pos[e.from]];
    ++ends[pos[e.to]];
    parent[find(pos[e.from])] = find(pos[e.to]);
  }
  for (std::size_t k = 0; k < face.subset.size(); ++k) {
    const int v = face.subset[k];
    const bool interval = g.is_interval(v);
    verdict.valences.push_back(ends[k] + (interval ? 2 : 0));
    (interval ? verdict.i_vertices : verdict.f_vertices) += 1;
  }
  for (std::size_t k = 0; k < face.subset.size(); ++k) verdict.components += find(static_cast<int>(k)) == static_cast<int>(k);
  const int k = verdict.i_vertices > 0 ? 2 : 4;
  verdict.base_dimension = verdict.i_vertices > 0 ? 2 : 0;
  verdict.pushforward_degree = 2 * verdict.edges - verdict.i_vertices - 3 * verdict.f_vertices + k;

  if (face.subset.size() == 2) {
    verdict.status = FaceStatus::Principal;
    return verdict;
  }
  auto vanish = [&](FaceRule r) {
    verdict.status = FaceStatus::Vanishes;
    verdict.rule = r;
    return verdict;
  };
  const auto [lo, hi] = std::minmax_element(verdict.valences.begin(), verdict.valences.end());
  if (*lo <= 2) return vanish(FaceRule::LowValence);
  if (*hi >= 4) return vanish(FaceRule::HighValence);
  if (verdict.i_vertices == 0) return vanish(FaceRule::NoLineVertex);
  if (verdict.components > 1) return vanish(FaceRule::Translation);
  if (verdict.f_vertices == 1) return vanish(FaceRule::Codimension);
  verdict.status = FaceStatus::PotentiallyNonzero;
  return verdict;
}

std::string to_string(FaceStatus s) {
  switch (s) {
    case FaceStatus::Principal: return "Principal";
    case FaceStatus::Vanishes: return "Vanishes";
    case FaceStatus::PotentiallyNonzero: return "PotentiallyNonzero";
  }
  return "?";
}

std::string to_string(FaceRule r) {
  switch (r) {
    case FaceRule::None: return "none";
    case FaceRule::LowValence: return "involution/valence";
    case FaceRule::HighValence: return "degree";
    case FaceRule::NoLineVertex: return "degree/no-line-vertex";
    case FaceRule::Translation: return "translation";
    case FaceRule::Codimension: return "codimension";
    case FaceRule::Infinity: return "infinity";
  }
  return "?";
}

std::string subset_string(const std::vector<int>& subset, bool at_infinity) {
  std::ostringstream out;
  out << '{';
  for (std::size_t k = 0; k < subset.size(); ++k) out << (k ? "," : "") << subset[k];
  if (at_infinity) out << (subset.empty() ? "" : ",") << "inf";
  out << '}';
  return out.str();
}

std::string to_string(const FaceVerdict& v) {
  std::ostringstream out;
  out << to_string(v.status);
  if (v.status == FaceStatus::Vanishes) out << '(' << to_string(v.rule) << ')';
  if (v.rule == FaceRule::Infinity) return out.str();
  out << " valences=[";
  for (std::size_t k = 0; k < v.valences.size(); ++k) out << (k ? "," : "") << v.valences[k];
  out << "] e=" << v.edges << " s=" << v.i_vertices << " t=" << v.f_vertices << " deg=" << v.pushforward_degree
      << " dimB=" << v.base_dimension;
  return out.str();
}

}  // namespace kcsi
