#include "kcsi/chain.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <vector>

namespace kcsi {

GraphChain::GraphChain(const Graph& g) { add(g, 1); }

void GraphChain::add_canonical(const Graph& g, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(g, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void GraphChain::add(const Graph& g, const Rational& c) {
  if (c == 0) return;
  auto canon = canonicalize(g);
  if (!canon) return;
  add_canonical(canon->graph, canon->sign * c);
}

GraphChain& GraphChain::operator+=(const GraphChain& other) {
  for (const auto& [g, c] : other.terms_) add_canonical(g, c);
  return *this;
}

GraphChain& GraphChain::operator-=(const GraphChain& other) {
  for (const auto& [g, c] : other.terms_) add_canonical(g, -c);
  return *this;
}

GraphChain& GraphChain::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [g, coef] : terms_) coef *= c;
  return *this;
}

Rational GraphChain::coefficient(const Graph& g) const {
  auto it = terms_.find(g);
  return it == terms_.end() ? Rational(0) : it->second;
}

std::string GraphChain::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [g, c] : terms_) {
    if (!first) out << "; ";
    first = false;
    out << c.get_str() << '*' << g.to_string();
  }
  return out.str();
}

GraphChain GraphChain::parse(std::string_view text) {
  GraphChain chain;
  std::size_t pos = 0;
  auto is_blank = [](std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); });
  };
  if (is_blank(text)) return chain;
  {
    std::string_view t = text;
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
    if (t == "0") return chain;
  }
  while (pos <= text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view term = text.substr(pos, end - pos);
    pos = end + 1;
    if (is_blank(term)) continue;
    const auto star = term.find('*');
    if (star == std::string_view::npos) throw GraphError("chain term needs '<rational>*<graph>'");
    std::string coef(term.substr(0, star));
    coef.erase(std::remove_if(coef.begin(), coef.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); }),
               coef.end());
    if (!coef.empty() && coef.front() == '+') coef.erase(0, 1);
    Rational c;
    if (c.set_str(coef, 10) != 0) throw GraphError("bad rational '" + coef + "'");
    c.canonicalize();
    chain.add(Graph::parse(term.substr(star + 1)), c);
  }
  return chain;
}

GraphChain operator+(GraphChain a, const GraphChain& b) { return a += b; }
GraphChain operator-(GraphChain a, const GraphChain& b) { return a -= b; }
GraphChain operator*(const Rational& c, GraphChain a) { return a *= c; }

void GraphTensor::add(const Graph& left, const Graph& right, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(Key{left, right}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

GraphTensor& GraphTensor::operator+=(const GraphTensor& other) {
  for (const auto& [k, c] : other.terms_) add(k.first, k.second, c);
  return *this;
}

GraphTensor& GraphTensor::operator-=(const GraphTensor& other) {
  for (const auto& [k, c] : other.terms_) add(k.first, k.second, -c);
  return *this;
}

std::string GraphTensor::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) out << "; ";
    first = false;
    out << c.get_str() << "*[" << k.first.to_string() << "] (x) [" << k.second.to_string() << ']';
  }
  return out.str();
}

GraphTensor tensor(const GraphChain& a, const GraphChain& b) {
  GraphTensor t;
  for (const auto& [ga, ca] : a.terms()) {
    for (const auto& [gb, cb] : b.terms()) t.add(ga, gb, ca * cb);
  }
  return t;
}

namespace {

// Collapses vertex b into vertex a (a < b). `skip` is the index of an edge
// consumed by the collision, or -1 for a line arc. Vertex wedge sign is
// (-1)^b: both collided vertices are odd generators.
void add_contraction(const Graph& g, int a, int b, int skip, GraphChain& out) {
  int sign = (b % 2 == 0) ? 1 : -1;
  auto relabel = [&](int v) { return v == b ? a : (v > b ? v - 1 : v); };
  std::vector<Edge> edges;
  edges.reserve(g.edges().size());
  for (int k = 0; k < g.num_edges(); ++k) {
    if (k == skip) continue;
    int from = relabel(g.edges()[k].from);
    int to = relabel(g.edges()[k].to);
    if (from > to) {
      std::swap(from, to);
      sign = -sign;
    }
    edges.push_back({from, to});
  }
  const bool b_is_interval = g.is_interval(b);
  const int s = g.num_i_vertices() - (b_is_interval ? 1 : 0);
  const int t = g.num_f_vertices() - (b_is_interval ? 0 : 1);
  out.add(Graph(s, t, std::move(edges)), sign);
}

}  // namespace

GraphChain delta(const Graph& g) {
  GraphChain out;
  for (int a = 1; a < g.num_i_vertices(); ++a) add_contraction(g, a, a + 1, -1, out);
  for (int k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[k];
    if (e.from == e.to) continue;
    const int a = std::min(e.from, e.to);
    const int b = std::max(e.from, e.to);
    if (!g.is_free(b)) continue;
    // The collapsed edge integrates to +1 over the sphere when it points
    // from a to b; a reversed edge integrates to -1.
    const int orient = (e.from == a) ? 1 : -1;
    GraphChain part;
    add_contraction(g, a, b, k, part);
    if (orient < 0) part *= -1;
    out += part;
  }
  return out;
}

GraphChain delta(const GraphChain& c) {
  GraphChain out;
  for (const auto& [g, coef] : c.terms()) {
    GraphChain d = delta(g);
    d *= coef;
    out += d;
  }
  return out;
}

namespace {

// Component id for each vertex (1-based; index 0 unused).
std::vector<int> components(const Graph& g) {
  const int n = g.num_vertices();
  std::vector<int> parent(n + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : g.edges()) parent[find(e.from)] = find(e.to);
  std::vector<int> comp(n + 1);
  for (int v = 1; v <= n; ++v) comp[v] = find(v);
  return comp;
}

}  // namespace

GraphTensor coproduct(const Graph& g) {
  GraphTensor out;
  const int s = g.num_i_vertices();
  const int n = g.num_vertices();
  const auto comp = components(g);

  for (int cut = 0; cut <= s; ++cut) {
    // A component may not have interval vertices on both sides.
    std::vector<int> side(n + 1, 0);  // per component root: 1 left, 2 right, 3 both
    for (int v = 1; v <= s; ++v) side[comp[v]] |= (v <= cut ? 1 : 2);
    bool ok = true;
    for (int v = 1; v <= s && ok; ++v) ok = side[comp[v]] != 3;
    if (!ok) continue;

    std::vector<int> left_f;
    std::vector<int> right_f;
    for (int v = s + 1; v <= n; ++v) (side[comp[v]] == 1 ? left_f : right_f).push_back(v);

    // Reorder the wedge I_L I_R F into I_L F_L I_R F_R.
    std::vector<int> shuffle(left_f);
    shuffle.insert(shuffle.end(), right_f.begin(), right_f.end());
    int sign = permutation_sign(shuffle);
    if ((left_f.size() * static_cast<std::size_t>(s - cut)) % 2 == 1) sign = -sign;

    std::vector<int> new_label(n + 1, 0);
    std::vector<bool> on_left(n + 1, false);
    for (int v = 1; v <= cut; ++v) {
      new_label[v] = v;
      on_left[v] = true;
    }
    for (int v = cut + 1; v <= s; ++v) new_label[v] = v - cut;
    for (std::size_t k = 0; k < left_f.size(); ++k) {
      new_label[left_f[k]] = cut + 1 + static_cast<int>(k);
      on_left[left_f[k]] = true;
    }
    for (std::size_t k = 0; k < right_f.size(); ++k) new_label[right_f[k]] = s - cut + 1 + static_cast<int>(k);

    std::vector<Edge> left_edges;
    std::vector<Edge> right_edges;
    for (const Edge& e : g.edges()) {
      Edge mapped{new_label[e.from], new_label[e.to]};
      (on_left[e.from] ? left_edges : right_edges).push_back(mapped);
    }
    auto left = canonicalize(Graph(cut, static_cast<int>(left_f.size()), std::move(left_edges)));
    auto right = canonicalize(Graph(s - cut, static_cast<int>(right_f.size()), std::move(right_edges)));
    if (!left || !right) continue;
    out.add(left->graph, right->graph, sign * left->sign * right->sign);
  }
  return out;
}

GraphTensor coproduct(const GraphChain& c) {
  GraphTensor out;
  for (const auto& [g, coef] : c.terms()) {
    for (const GraphTensor part = coproduct(g); const auto& [k, v] : part.terms()) out.add(k.first, k.second, coef * v);
  }
  return out;
}

namespace {

void add_triple(GraphTriple& out, const Graph& a, const Graph& b, const Graph& c, const Rational& v) {
  if (v == 0) return;
  auto [it, inserted] = out.try_emplace(std::make_tuple(a, b, c), v);
  if (!inserted) {
    it->second += v;
    if (it->second == 0) out.erase(it);
  }
}

}  // namespace

GraphTriple coproduct_left(const GraphTensor& t) {
  GraphTriple out;
  for (const auto& [k, v] : t.terms()) {
    for (const GraphTensor part = coproduct(k.first); const auto& [k2, v2] : part.terms()) add_triple(out, k2.first, k2.second, k.second, v * v2);
  }
  return out;
}

GraphTriple coproduct_right(const GraphTensor& t) {
  GraphTriple out;
  for (const auto& [k, v] : t.terms()) {
    for (const GraphTensor part = coproduct(k.second); const auto& [k2, v2] : part.terms()) add_triple(out, k.first, k2.first, k2.second, v * v2);
  }
  return out;
}

}  // namespace kcsi
