#include "kcsi/invariants.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace kcsi {

std::string to_string(PairPattern p) {
  switch (p) {
    case PairPattern::Interleaved_13_24: return "Interleaved_13_24";
    case PairPattern::Nested_12_34: return "Nested_12_34";
    case PairPattern::Side_14_23: return "Side_14_23";
  }
  return "?";
}

PairPattern classify_pair(const LongKnotDiagram& d, int id1, int id2) {
  if (id1 == id2) throw DiagramError("classify_pair needs distinct crossings");
  auto a = d.positions(id1);
  auto b = d.positions(id2);
  if (b.first < a.first) std::swap(a, b);
  if (a.second < b.first) return PairPattern::Nested_12_34;
  if (b.second < a.second) return PairPattern::Side_14_23;
  return PairPattern::Interleaved_13_24;
}

std::string ConwayPolynomial::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const std::int64_t c = coeffs[k];
    if (c == 0) continue;
    const std::int64_t mag = c < 0 ? -c : c;
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    if (k == 0 || mag != 1) out += std::to_string(mag);
    if (k >= 1) out += "z";
    if (k >= 2) out += "^" + std::to_string(k);
  }
  return out.empty() ? "0" : out;
}

namespace {

using Poly = std::vector<std::int64_t>;

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

// Component 0 is the long strand; the rest are closed.
struct Link {
  std::vector<std::vector<Visit>> comps;
};

std::string key_of(const Link& l) {
  std::map<int, int> relabel;
  std::string key;
  for (const auto& comp : l.comps) {
    key += '|';
    for (const Visit& v : comp) {
      auto [it, inserted] = relabel.try_emplace(v.id, static_cast<int>(relabel.size()) + 1);
      key += v.over ? 'o' : 'u';
      key += std::to_string(it->second);
      key += v.sign > 0 ? '+' : '-';
    }
  }
  return key;
}

struct Where {
  std::size_t comp;
  std::size_t pos;
};

Link smooth(const Link& l, int id, Where p, Where q) {
  Link out = l;
  auto strip = [id](std::vector<Visit> seq) {
    seq.erase(std::remove_if(seq.begin(), seq.end(), [id](const Visit& v) { return v.id == id; }), seq.end());
    return seq;
  };
  if (p.comp == q.comp) {
    const auto& seq = l.comps[p.comp];
    std::vector<Visit> a(seq.begin(), seq.begin() + p.pos);
    std::vector<Visit> b(seq.begin() + p.pos + 1, seq.begin() + q.pos);
    std::vector<Visit> c(seq.begin() + q.pos + 1, seq.end());
    if (p.comp == 0) {
      a.insert(a.end(), c.begin(), c.end());
      out.comps[0] = a;
    } else {
      c.insert(c.end(), a.begin(), a.end());
      out.comps[p.comp] = c;
    }
    out.comps.push_back(b);
  } else {
    // q lies on a later, closed component: splice its loop in at p.
    const auto& x = l.comps[p.comp];
    const auto& y = l.comps[q.comp];
    std::vector<Visit> merged(x.begin(), x.begin() + p.pos);
    merged.insert(merged.end(), y.begin() + q.pos + 1, y.end());
    merged.insert(merged.end(), y.begin(), y.begin() + q.pos);
    merged.insert(merged.end(), x.begin() + p.pos + 1, x.end());
    out.comps[p.comp] = merged;
    out.comps.erase(out.comps.begin() + static_cast<std::ptrdiff_t>(q.comp));
  }
  for (auto& comp : out.comps) comp = strip(comp);
  return out;
}

thread_local std::unordered_map<std::string, Poly> memo;

Poly conway_rec(const Link& l) {
  if (l.comps.size() > 1) {
    for (const auto& comp : l.comps) {
      if (comp.empty()) return {};  // split unknotted circle
    }
  }
  const std::string key = key_of(l);
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  std::map<int, Where> first;
  int bad = 0;
  Where bad_first{}, bad_second{};
  for (std::size_t c = 0; c < l.comps.size() && !bad; ++c) {
    for (std::size_t k = 0; k < l.comps[c].size(); ++k) {
      const Visit& v = l.comps[c][k];
      auto it = first.find(v.id);
      if (it == first.end()) {
        first.emplace(v.id, Where{c, k});
        continue;
      }
      // Second visit: the crossing is descending iff it was first met over.
      const Visit& f = l.comps[it->second.comp][it->second.pos];
      if (!f.over) {
        bad = v.id;
        bad_first = it->second;
        bad_second = {c, k};
        break;
      }
    }
  }
  Poly result;
  if (!bad) {
    if (l.comps.size() == 1) result = {1};
  } else {
    Link changed = l;
    for (auto& comp : changed.comps) {
      for (Visit& v : comp) {
        if (v.id == bad) {
          v.over = !v.over;
          v.sign = -v.sign;
        }
      }
    }
    const int eps = l.comps[bad_first.comp][bad_first.pos].sign;
    result = conway_rec(changed);
    const Poly zero = conway_rec(smooth(l, bad, bad_first, bad_second));
    if (result.size() < zero.size() + 1) result.resize(zero.size() + 1, 0);
    for (std::size_t k = 0; k < zero.size(); ++k) result[k + 1] += eps * zero[k];
    trim(result);
  }
  if (memo.size() > 2'000'000) memo.clear();
  memo.emplace(key, result);
  return result;
}

}  // namespace

ConwayPolynomial conway(const LongKnotDiagram& d, int cap) {
  if (d.num_crossings() > cap) {
    throw SkeinCapExceeded("diagram has " + std::to_string(d.num_crossings()) + " crossings; skein cap is " +
                           std::to_string(cap));
  }
  return ConwayPolynomial{conway_rec(Link{{d.visits()}})};
}

std::int64_t v2_oracle(const LongKnotDiagram& d) { return conway(d).coefficient(2); }

std::vector<PairSubPattern> pair_sub_patterns() { return {{true, true}, {true, false}, {false, true}, {false, false}}; }

std::string to_string(const PairSubPattern& p) {
  return std::string(p.first_over ? "over" : "under") + "/" + (p.second_over ? "over" : "under");
}

PairSubPattern v2_sub_pattern() { return {true, false}; }

std::int64_t v2_pair_count(const LongKnotDiagram& d, const PairSubPattern& p) {
  const auto& vs = d.visits();
  const std::vector<int> ids = d.ids();
  std::int64_t total = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      auto a = d.positions(ids[i]);
      auto b = d.positions(ids[j]);
      if (b.first < a.first) std::swap(a, b);
      if (!(a.first < b.first && b.first < a.second && a.second < b.second)) continue;
      if (vs[a.first].over != p.first_over || vs[b.first].over != p.second_over) continue;
      total += vs[a.first].sign * vs[b.first].sign;
    }
  }
  return total;
}

std::int64_t v2_pair_count(const LongKnotDiagram& d) { return v2_pair_count(d, v2_sub_pattern()); }

std::int64_t second_difference(const LongKnotDiagram& d, int id1, int id2, const DiagramInvariant& inv) {
  if (id1 == id2) throw DiagramError("second_difference needs distinct crossings");
  if (!d.has(id1) || !d.has(id2)) throw DiagramError("unknown crossing id");
  std::int64_t total = 0;
  for (int e1 : {1, -1}) {
    for (int e2 : {1, -1}) total += e1 * e2 * inv(with_sign(with_sign(d, id1, e1), id2, e2));
  }
  return total;
}

std::int64_t third_difference(const LongKnotDiagram& d, int id1, int id2, int id3, const DiagramInvariant& inv) {
  if (id1 == id2 || id1 == id3 || id2 == id3) throw DiagramError("third_difference needs distinct crossings");
  if (!d.has(id1) || !d.has(id2) || !d.has(id3)) throw DiagramError("unknown crossing id");
  std::int64_t total = 0;
  for (int e1 : {1, -1}) {
    for (int e2 : {1, -1}) {
      for (int e3 : {1, -1}) total += e1 * e2 * e3 * inv(with_sign(with_sign(with_sign(d, id1, e1), id2, e2), id3, e3));
    }
  }
  return total;
}

LongKnotDiagram torus_2n_diagram(int n) {
  if (n < 1 || n % 2 == 0) throw DiagramError("torus_2n_diagram needs odd n >= 1");
  std::vector<Visit> vs;
  for (int k = 0; k < 2 * n; ++k) vs.push_back({k % n + 1, k % 2 == 0, 1});
  return LongKnotDiagram(std::move(vs));
}

namespace {

void all_signs(const LongKnotDiagram& d, std::vector<LongKnotDiagram>& out) {
  const auto ids = d.ids();
  const std::size_t m = ids.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    LongKnotDiagram v = d;
    for (std::size_t k = 0; k < m; ++k) v = with_sign(v, ids[k], (mask >> k) & 1 ? -1 : 1);
    out.push_back(v);
  }
}

}  // namespace

std::vector<LongKnotDiagram> diagram_corpus(int max_crossings) {
  const LongKnotDiagram kink = LongKnotDiagram::parse("o1+ u1+");
  const LongKnotDiagram trefoil = torus_2n_diagram(3);
  const LongKnotDiagram figure8 = LongKnotDiagram::parse("o1+ u2- o3- u1+ o4+ u3- o2- u4+");
  const std::vector<LongKnotDiagram> prime{kink, trefoil, figure8, torus_2n_diagram(5), torus_2n_diagram(7)};

  std::vector<LongKnotDiagram> shadows{LongKnotDiagram()};
  for (const auto& a : prime) shadows.push_back(a);
  for (const auto& a : prime) {
    for (const auto& b : prime) {
      shadows.push_back(connect_sum(a, b));
      for (const auto& c : prime) shadows.push_back(connect_sum(connect_sum(a, b), c));
    }
  }
  std::set<std::string> seen;
  std::vector<LongKnotDiagram> out;
  for (const auto& s : shadows) {
    if (s.num_crossings() > max_crossings) continue;
    std::vector<LongKnotDiagram> variants;
    all_signs(s, variants);
    for (const auto& v : variants) {
      if (seen.insert(v.to_string()).second) out.push_back(v);
    }
  }
  return out;
}

}  // namespace kcsi
