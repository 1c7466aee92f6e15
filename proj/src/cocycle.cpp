#include "kcsi/cocycle.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "kcsi/faces.hpp"

namespace kcsi {

SparseMatrix differential_matrix(const std::vector<Graph>& domain, std::map<Graph, int>& rows) {
  std::vector<std::map<int, Rational>> acc;
  for (std::size_t j = 0; j < domain.size(); ++j) {
    const GraphChain d = delta(domain[j]);
    for (const auto& [g, c] : d.terms()) {
      auto [it, inserted] = rows.try_emplace(g, static_cast<int>(acc.size()));
      if (inserted) acc.emplace_back();
      acc[it->second][static_cast<int>(j)] += c;
    }
  }
  SparseMatrix m;
  m.cols = static_cast<int>(domain.size());
  for (auto& r : acc) {
    SparseVector v;
    for (auto& [col, x] : r) {
      if (x != 0) v.emplace_back(col, x);
    }
    m.rows.push_back(std::move(v));
  }
  return m;
}

std::vector<GraphChain> cocycle_kernel(const std::vector<Graph>& basis) {
  if (basis.empty()) throw std::invalid_argument("cocycle_kernel: empty basis");
  std::map<Graph, int> rows;
  const auto ker = kernel(differential_matrix(basis, rows));
  std::vector<GraphChain> out;
  for (const auto& v : ker) {
    GraphChain c;
    for (const auto& [j, x] : v) c.add(basis[j], x);
    out.push_back(std::move(c));
  }
  return out;
}

bool is_nontrivalent(const Graph& g) {
  for (int v = 1; v <= g.num_vertices(); ++v) {
    if (g.valence(v) >= 4) return true;
  }
  return false;
}

bool has_nontrivalent_term(const GraphChain& c) {
  return std::any_of(c.terms().begin(), c.terms().end(), [](const auto& t) { return is_nontrivalent(t.first); });
}

std::vector<Graph> graphs_of_order(int order, int degree) {
  // With e = order + t the degree fixes s = 2*order - t - degree.
  const int s_max = std::max(0, 2 * order - degree);
  const int t_max = std::max(0, 2 * order - degree - 1);
  EnumerationCaps caps{s_max, t_max, order + t_max};
  return enumerate_graphs(s_max, t_max, degree, order, caps);
}

std::optional<GraphChain> find_primitive(const GraphChain& c) {
  GraphChain primitive;
  std::map<int, GraphChain> by_order;
  std::set<int> degrees;
  for (const auto& [g, x] : c.terms()) {
    by_order[g.order()].add(g, x);
    degrees.insert(g.degree());
  }
  if (c.empty()) return primitive;
  if (degrees.size() != 1) throw std::invalid_argument("find_primitive: chain is not homogeneous in degree");
  const int degree = *degrees.begin();
  struct Cached {
    std::vector<Graph> domain;
    std::map<Graph, int> rows;
    SparseMatrix m;
  };
  static std::mutex mutex;
  static std::map<std::pair<int, int>, Cached> cache;
  for (const auto& [order, part] : by_order) {
    std::unique_lock lock(mutex);
    auto [it, fresh] = cache.try_emplace({order, degree - 1});
    if (fresh) {
      it->second.domain = graphs_of_order(order, degree - 1);
      it->second.m = differential_matrix(it->second.domain, it->second.rows);
    }
    const Cached& cached = it->second;
    lock.unlock();
    const auto& domain = cached.domain;
    const auto& rows = cached.rows;
    const SparseMatrix& m = cached.m;
    SparseVector rhs;
    for (const auto& [g, x] : part.terms()) {
      auto it = rows.find(g);
      if (it == rows.end()) return std::nullopt;
      rhs.emplace_back(it->second, x);
    }
    std::sort(rhs.begin(), rhs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    auto x = solve(m, rhs);
    if (!x) return std::nullopt;
    for (const auto& [j, v] : *x) primitive.add(domain[j], v);
  }
  return primitive;
}

bool faces_all_vanish(const Graph& g) {
  for (const auto& f : enumerate_faces(g)) {
    if (classify_face(f).status == FaceStatus::PotentiallyNonzero) return false;
  }
  return true;
}

Graph normalization_graph() { return Graph(5, 0, {{1, 3}, {1, 4}, {2, 5}}); }

CocycleSolution solve_cocycle(int s_max, int t_max, int order, const EnumerationCaps& caps) {
  CocycleSolution sol;
  sol.s_max = s_max;
  sol.t_max = t_max;
  sol.order = order;
  std::vector<Graph> basis;
  for (Graph& g : enumerate_graphs(s_max, t_max, 1, order, caps)) {
    if (faces_all_vanish(g)) basis.push_back(std::move(g));
  }
  sol.basis_size = basis.size();
  if (basis.empty()) return sol;
  const auto ker = cocycle_kernel(basis);
  sol.kernel_dimension = ker.size();
  const Graph norm = normalization_graph();
  std::optional<GraphChain> best;
  for (const auto& c : ker) {
    if (has_nontrivalent_term(c)) ++sol.nontrivalent_kernel_elements;
    if (find_primitive(c)) {
      ++sol.exact_kernel_elements;
      continue;
    }
    if (c.coefficient(norm) == 0) continue;
    if (!best || c.size() < best->size()) best = c;
  }
  if (best) {
    const Rational scale = 1 / best->coefficient(norm);
    sol.representative = scale * *best;
    sol.found = true;
  }
  return sol;
}

std::string cocycle_to_json(const CocycleSolution& sol) {
  nlohmann::json j;
  j["schema"] = kCocycleSchema;
  j["code_version"] = kCodeVersion;
  j["bounds"] = {sol.s_max, sol.t_max};
  j["order"] = sol.order;
  j["basis_size"] = sol.basis_size;
  j["kernel_dimension"] = sol.kernel_dimension;
  j["terms"] = nlohmann::json::array();
  for (const auto& [g, c] : sol.representative.terms()) {
    j["terms"].push_back({{"coefficient", c.get_str()}, {"graph", g.to_string()}});
  }
  return j.dump(2);
}

GraphChain cocycle_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.value("schema", "") != kCocycleSchema) throw std::runtime_error("cocycle cache: unknown schema");
  if (j.value("code_version", "") != kCodeVersion) {
    throw std::runtime_error("cocycle cache was written by code version " + j.value("code_version", std::string("?")) +
                             ", this is " + kCodeVersion);
  }
  GraphChain c;
  for (const auto& t : j.at("terms")) {
    Rational x(t.at("coefficient").get<std::string>());
    x.canonicalize();
    c.add(Graph::parse(t.at("graph").get<std::string>()), x);
  }
  return c;
}

}  // namespace kcsi
