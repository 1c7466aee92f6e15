#include "kcsi/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <sstream>

namespace kcsi {

namespace {

int parse_int(std::string_view s, std::string_view what) {
  int value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw GraphError("bad integer for " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

int permutation_sign(const std::vector<int>& perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = i + 1; j < perm.size(); ++j) {
      if (perm[i] > perm[j]) sign = -sign;
    }
  }
  return sign;
}

Graph::Graph(int num_i, int num_f, std::vector<Edge> edges)
    : s_(num_i), t_(num_f), edges_(std::move(edges)) {
  if (s_ < 0 || t_ < 0) throw GraphError("negative vertex count");
  const int n = s_ + t_;
  for (const Edge& e : edges_) {
    if (e.from < 1 || e.from > n || e.to < 1 || e.to > n) {
      throw GraphError("edge endpoint out of range: " + std::to_string(e.from) + "," +
                       std::to_string(e.to));
    }
  }
  for (int v = s_ + 1; v <= n; ++v) {
    if (edge_ends(v) == 0) throw GraphError("free vertex " + std::to_string(v) + " has valence 0");
  }
}

int Graph::edge_ends(int v) const {
  int ends = 0;
  for (const Edge& e : edges_) {
    ends += (e.from == v) + (e.to == v);
  }
  return ends;
}

bool Graph::has_parallel_edges() const {
  std::vector<std::pair<int, int>> keys;
  keys.reserve(edges_.size());
  for (const Edge& e : edges_) keys.emplace_back(std::min(e.from, e.to), std::max(e.from, e.to));
  std::sort(keys.begin(), keys.end());
  return std::adjacent_find(keys.begin(), keys.end()) != keys.end();
}

bool Graph::has_loops() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.from == e.to; });
}

bool Graph::attached_to_line() const {
  const int n = num_vertices();
  std::vector<int> parent(n + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : edges_) parent[find(e.from)] = find(e.to);
  std::vector<bool> has_interval(n + 1, false);
  for (int v = 1; v <= s_; ++v) has_interval[find(v)] = true;
  for (int v = s_ + 1; v <= n; ++v) {
    if (!has_interval[find(v)]) return false;
  }
  return true;
}

bool Graph::is_canonical() const {
  for (const Edge& e : edges_) {
    if (e.from > e.to) return false;
  }
  return std::is_sorted(edges_.begin(), edges_.end());
}

std::string Graph::to_string() const {
  std::ostringstream out;
  out << "i=" << s_ << " f=" << t_ << " edges=";
  const bool wide = num_vertices() > 9;
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (k) out << ',';
    out << edges_[k].from;
    if (wide) out << '-';
    out << edges_[k].to;
  }
  return out.str();
}

Graph Graph::parse(std::string_view text) {
  text = trim(text);
  int s = -1;
  int t = -1;
  std::vector<Edge> edges;
  bool saw_edges = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = text.find_first_of(" \t", pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view field = text.substr(pos, end - pos);
    pos = end;
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) throw GraphError("expected key=value, got '" + std::string(field) + "'");
    std::string_view key = field.substr(0, eq);
    std::string_view value = field.substr(eq + 1);
    if (key == "i") {
      s = parse_int(value, "i");
    } else if (key == "f") {
      t = parse_int(value, "f");
    } else if (key == "edges") {
      saw_edges = true;
      std::size_t p = 0;
      while (p < value.size()) {
        std::size_t q = value.find(',', p);
        if (q == std::string_view::npos) q = value.size();
        std::string_view tok = trim(value.substr(p, q - p));
        p = q + 1;
        if (tok.empty()) continue;
        const auto dash = tok.find('-');
        if (dash != std::string_view::npos) {
          edges.push_back({parse_int(tok.substr(0, dash), "edge"), parse_int(tok.substr(dash + 1), "edge")});
        } else if (tok.size() == 2 && std::isdigit(static_cast<unsigned char>(tok[0])) &&
                   std::isdigit(static_cast<unsigned char>(tok[1]))) {
          edges.push_back({tok[0] - '0', tok[1] - '0'});
        } else {
          throw GraphError("bad edge token '" + std::string(tok) + "'");
        }
      }
    } else {
      throw GraphError("unknown graph field '" + std::string(key) + "'");
    }
  }
  if (s < 0 || t < 0 || !saw_edges) throw GraphError("graph needs i=, f= and edges= fields");
  return Graph(s, t, std::move(edges));
}

std::optional<Canonical> canonicalize(const Graph& g) {
  const int s = g.num_i_vertices();
  const int t = g.num_f_vertices();
  for (const Edge& e : g.edges()) {
    if (e.from == e.to && g.is_free(e.from)) return std::nullopt;
  }
  if (g.has_parallel_edges()) return std::nullopt;

  // perm[k] is the new label of free vertex s+1+k.
  std::vector<int> perm(t);
  std::iota(perm.begin(), perm.end(), s + 1);

  std::optional<std::vector<Edge>> best;
  int best_sign = 0;
  bool zero = false;
  std::vector<Edge> mapped(g.edges().size());
  do {
    int sign = permutation_sign(perm);
    for (std::size_t k = 0; k < g.edges().size(); ++k) {
      const Edge& e = g.edges()[k];
      int a = e.from > s ? perm[e.from - s - 1] : e.from;
      int b = e.to > s ? perm[e.to - s - 1] : e.to;
      if (a > b) {
        std::swap(a, b);
        sign = -sign;
      }
      mapped[k] = {a, b};
    }
    std::sort(mapped.begin(), mapped.end());
    if (!best || mapped < *best) {
      best = mapped;
      best_sign = sign;
      zero = false;
    } else if (mapped == *best && sign != best_sign) {
      zero = true;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  if (zero) return std::nullopt;
  return Canonical{Graph(s, t, std::move(*best)), best_sign};
}

}  // namespace kcsi
