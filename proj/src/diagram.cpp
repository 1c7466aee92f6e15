#include "kcsi/diagram.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace kcsi {

LongKnotDiagram::LongKnotDiagram(std::vector<Visit> visits) : visits_(std::move(visits)) {
  std::map<int, std::vector<const Visit*>> seen;
  for (const Visit& v : visits_) {
    if (v.id <= 0) throw DiagramError("crossing ids must be positive");
    if (v.sign != 1 && v.sign != -1) throw DiagramError("crossing sign must be +1 or -1");
    seen[v.id].push_back(&v);
  }
  for (const auto& [id, vs] : seen) {
    if (vs.size() != 2) throw DiagramError("crossing " + std::to_string(id) + " must be visited exactly twice");
    if (vs[0]->over == vs[1]->over) throw DiagramError("crossing " + std::to_string(id) + " needs one over and one under visit");
    if (vs[0]->sign != vs[1]->sign) throw DiagramError("crossing " + std::to_string(id) + " has inconsistent signs");
  }
}

std::vector<int> LongKnotDiagram::ids() const {
  std::vector<int> out;
  for (const Visit& v : visits_) out.push_back(v.id);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool LongKnotDiagram::has(int id) const {
  return std::any_of(visits_.begin(), visits_.end(), [id](const Visit& v) { return v.id == id; });
}

std::pair<int, int> LongKnotDiagram::positions(int id) const {
  int first = -1;
  for (int k = 0; k < static_cast<int>(visits_.size()); ++k) {
    if (visits_[k].id != id) continue;
    if (first < 0) {
      first = k;
    } else {
      return {first, k};
    }
  }
  throw DiagramError("unknown crossing id " + std::to_string(id));
}

int LongKnotDiagram::sign(int id) const { return visits_[positions(id).first].sign; }

int LongKnotDiagram::writhe() const {
  int w = 0;
  for (const Visit& v : visits_) w += v.sign;
  return w / 2;
}

int LongKnotDiagram::max_id() const {
  int m = 0;
  for (const Visit& v : visits_) m = std::max(m, v.id);
  return m;
}

std::string LongKnotDiagram::to_string() const {
  std::ostringstream out;
  for (std::size_t k = 0; k < visits_.size(); ++k) {
    if (k) out << ' ';
    out << (visits_[k].over ? 'o' : 'u') << visits_[k].id << (visits_[k].sign > 0 ? '+' : '-');
  }
  return out.str();
}

LongKnotDiagram LongKnotDiagram::parse(std::string_view text) {
  std::vector<Visit> visits;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ',')) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end])) && text[end] != ',') ++end;
    std::string_view tok = text.substr(pos, end - pos);
    pos = end;
    if (tok.size() < 3) throw DiagramError("bad visit token '" + std::string(tok) + "'");
    Visit v;
    const char kind = static_cast<char>(std::tolower(static_cast<unsigned char>(tok.front())));
    if (kind != 'o' && kind != 'u') throw DiagramError("visit must start with o or u: '" + std::string(tok) + "'");
    v.over = kind == 'o';
    const char s = tok.back();
    if (s != '+' && s != '-') throw DiagramError("visit must end with + or -: '" + std::string(tok) + "'");
    v.sign = s == '+' ? 1 : -1;
    std::string_view num = tok.substr(1, tok.size() - 2);
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v.id);
    if (ec != std::errc{} || ptr != num.data() + num.size()) throw DiagramError("bad crossing id in '" + std::string(tok) + "'");
    visits.push_back(v);
  }
  return LongKnotDiagram(std::move(visits));
}

LongKnotDiagram crossing_change(const LongKnotDiagram& d, int id) {
  if (!d.has(id)) throw DiagramError("unknown crossing id " + std::to_string(id));
  std::vector<Visit> vs = d.visits();
  for (Visit& v : vs) {
    if (v.id == id) {
      v.over = !v.over;
      v.sign = -v.sign;
    }
  }
  return LongKnotDiagram(std::move(vs));
}

LongKnotDiagram with_sign(const LongKnotDiagram& d, int id, int sign) {
  return d.sign(id) == sign ? d : crossing_change(d, id);
}

LongKnotDiagram connect_sum(const LongKnotDiagram& a, const LongKnotDiagram& b) {
  std::vector<Visit> vs = a.visits();
  const int shift = a.max_id();
  for (Visit v : b.visits()) {
    v.id += shift;
    vs.push_back(v);
  }
  return LongKnotDiagram(std::move(vs));
}

LongKnotDiagram normalize_ids(const LongKnotDiagram& d) {
  std::map<int, int> relabel;
  std::vector<Visit> vs = d.visits();
  for (Visit& v : vs) {
    auto [it, inserted] = relabel.try_emplace(v.id, static_cast<int>(relabel.size()) + 1);
    v.id = it->second;
  }
  return LongKnotDiagram(std::move(vs));
}

namespace {

struct RawCrossing {
  double t1, t2;  // t1 < t2
};

double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

// Newton refinement of f_xy(t1) = f_xy(t2).
bool refine(const ParametricLongKnot& k, double& t1, double& t2) {
  for (int it = 0; it < 50; ++it) {
    const Vec3 p1 = k.position(t1);
    const Vec3 p2 = k.position(t2);
    const Vec3 d1 = k.derivative(t1);
    const Vec3 d2 = k.derivative(t2);
    const double rx = p1.x - p2.x;
    const double ry = p1.y - p2.y;
    if (std::abs(rx) + std::abs(ry) < 1e-14) return true;
    // J = [d1 | -d2] in xy.
    const double det = cross2(d1.x, d1.y, -d2.x, -d2.y);
    if (std::abs(det) < 1e-300) return false;
    const double dt1 = cross2(rx, ry, -d2.x, -d2.y) / det;
    const double dt2 = cross2(d1.x, d1.y, rx, ry) / det;
    t1 -= dt1;
    t2 -= dt2;
  }
  const Vec3 p1 = k.position(t1);
  const Vec3 p2 = k.position(t2);
  return std::abs(p1.x - p2.x) + std::abs(p1.y - p2.y) < 1e-10;
}

std::vector<RawCrossing> find_crossings(const ParametricLongKnot& k, const ProjectionOptions& opt) {
  // Polyline over [-1,1] plus the two axis rays as single long segments.
  double reach = 2.0;
  const int n = opt.samples;
  std::vector<double> ts;
  ts.reserve(n + 3);
  for (int i = 0; i <= n; ++i) {
    const double t = -1.0 + 2.0 * i / n;
    ts.push_back(t);
    reach = std::max(reach, std::abs(k.position(t).x) + 1.0);
  }
  ts.insert(ts.begin(), -reach);
  ts.push_back(reach);
  std::vector<std::array<double, 2>> p(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Vec3 q = k.position(ts[i]);
    p[i] = {q.x, q.y};
  }
  const std::size_t m = ts.size() - 1;
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  auto xmin = [&](std::size_t i) { return std::min(p[i][0], p[i + 1][0]); };
  auto xmax = [&](std::size_t i) { return std::max(p[i][0], p[i + 1][0]); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xmin(a) < xmin(b); });

  std::vector<RawCrossing> raw;
  for (std::size_t oi = 0; oi < m; ++oi) {
    const std::size_t i = order[oi];
    for (std::size_t oj = oi + 1; oj < m && xmin(order[oj]) <= xmax(i); ++oj) {
      const std::size_t j = order[oj];
      if (i + 1 >= j && j + 1 >= i) continue;  // neighbours share a vertex
      const double ymin_i = std::min(p[i][1], p[i + 1][1]);
      const double ymax_i = std::max(p[i][1], p[i + 1][1]);
      const double ymin_j = std::min(p[j][1], p[j + 1][1]);
      const double ymax_j = std::max(p[j][1], p[j + 1][1]);
      if (ymax_i < ymin_j || ymax_j < ymin_i) continue;
      const double ax = p[i + 1][0] - p[i][0], ay = p[i + 1][1] - p[i][1];
      const double bx = p[j + 1][0] - p[j][0], by = p[j + 1][1] - p[j][1];
      const double den = cross2(ax, ay, bx, by);
      if (den == 0) continue;
      const double cx = p[j][0] - p[i][0], cy = p[j][1] - p[i][1];
      const double u = cross2(cx, cy, bx, by) / den;
      const double v = cross2(cx, cy, ax, ay) / den;
      if (u < 0 || u > 1 || v < 0 || v > 1) continue;
      double t1 = ts[i] + u * (ts[i + 1] - ts[i]);
      double t2 = ts[j] + v * (ts[j + 1] - ts[j]);
      if (t1 > t2) std::swap(t1, t2);
      if (!refine(k, t1, t2)) throw DiagramError("crossing refinement failed near t=" + std::to_string(t1));
      raw.push_back({t1, t2});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const RawCrossing& a, const RawCrossing& b) { return a.t1 < b.t1; });
  std::vector<RawCrossing> merged;
  for (const RawCrossing& c : raw) {
    if (!merged.empty() && std::abs(merged.back().t1 - c.t1) < 1e-7 && std::abs(merged.back().t2 - c.t2) < 1e-7) continue;
    merged.push_back(c);
  }
  return merged;
}

}  // namespace

std::vector<std::pair<double, double>> crossing_parameters(const ParametricLongKnot& k, const ProjectionOptions& opt) {
  const auto raw = find_crossings(k, opt);
  // Triple points: a parameter shared by two crossings.
  std::vector<double> all;
  for (const auto& c : raw) {
    all.push_back(c.t1);
    all.push_back(c.t2);
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i] - all[i - 1] < 1e-7) throw DiagramError("triple point near t=" + std::to_string(all[i]));
  }
  for (const auto& c : raw) {
    const Vec3 d1 = k.derivative(c.t1);
    const Vec3 d2 = k.derivative(c.t2);
    const double s = cross2(d1.x, d1.y, d2.x, d2.y) / (std::hypot(d1.x, d1.y) * std::hypot(d2.x, d2.y));
    if (std::abs(s) < opt.min_angle) {
      throw DiagramError("tangential crossing at t=" + std::to_string(c.t1) + "," + std::to_string(c.t2));
    }
    if (std::abs(k.position(c.t1).z - k.position(c.t2).z) < opt.min_gap) {
      throw DiagramError("curve meets itself at t=" + std::to_string(c.t1) + "," + std::to_string(c.t2));
    }
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& c : raw) out.emplace_back(c.t1, c.t2);
  return out;
}

LongKnotDiagram project_to_diagram(const ParametricLongKnot& k, const ProjectionOptions& opt) {
  const auto params = crossing_parameters(k, opt);
  struct Event {
    double t;
    int id;
    bool over;
    int sign;
  };
  std::vector<Event> events;
  int id = 0;
  for (const auto& [t1, t2] : params) {
    ++id;
    const bool first_over = k.position(t1).z > k.position(t2).z;
    const Vec3 d_over = k.derivative(first_over ? t1 : t2);
    const Vec3 d_under = k.derivative(first_over ? t2 : t1);
    const int sign = cross2(d_over.x, d_over.y, d_under.x, d_under.y) > 0 ? 1 : -1;
    events.push_back({t1, id, first_over, sign});
    events.push_back({t2, id, !first_over, sign});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
  std::vector<Visit> visits;
  for (const Event& e : events) visits.push_back({e.id, e.over, e.sign});
  return normalize_ids(LongKnotDiagram(std::move(visits)));
}

}  // namespace kcsi
