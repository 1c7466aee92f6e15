#include "kcsi/integration.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <thread>

namespace kcsi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMargin = 1e-13;

double bump_profile(double r) { return r < 1 ? (1 - r * r) * (1 - r * r) : 0.0; }

}  // namespace

SphereVolumeForm SphereVolumeForm::uniform() { return SphereVolumeForm(); }

SphereVolumeForm SphereVolumeForm::polar_bump(double width) {
  if (!(width > 0 && width <= kPi / 2)) throw std::invalid_argument("bump width must lie in (0, pi/2]");
  SphereVolumeForm v;
  v.mode_ = Mode::PolarBump;
  v.width_ = width;
  v.cos_width_ = std::cos(width);
  // Mass of the unnormalized density: two caps, 2π ∫ φ(θ/w) sin θ dθ each.
  constexpr int n = 20000;
  const double h = width / n;
  double sum = 0;
  for (int k = 0; k <= n; ++k) {
    const double th = k * h;
    const double f = bump_profile(th / width) * std::sin(th);
    sum += (k == 0 || k == n) ? f : (k % 2 ? 4 * f : 2 * f);
  }
  v.norm_ = 1.0 / (2 * 2 * kPi * sum * h / 3);
  return v;
}

SphereVolumeForm SphereVolumeForm::parse(std::string_view text) {
  if (text == "uniform") return uniform();
  if (text.rfind("bump:", 0) == 0) {
    const std::string w(text.substr(5));
    std::size_t used = 0;
    double width = 0;
    try {
      width = std::stod(w, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != w.size() || w.empty()) throw std::invalid_argument("bad bump width '" + w + "'");
    return polar_bump(width);
  }
  throw std::invalid_argument("volume form must be 'uniform' or 'bump:<width>'");
}

double SphereVolumeForm::density(const Vec3& u) const {
  if (mode_ == Mode::Uniform) return 1.0 / (4 * kPi);
  const double c = std::abs(u.z) / norm(u);
  if (c <= cos_width_) return 0.0;
  const double th = std::acos(std::min(1.0, c));
  return norm_ * bump_profile(th / width_);
}

double SphereVolumeForm::total_mass(int intervals) const {
  // ∫_0^π 2π ρ(θ) sin θ dθ by composite Simpson on each smooth piece.
  auto integrate = [&](double a, double b) {
    const int n = intervals + intervals % 2;
    const double h = (b - a) / n;
    double sum = 0;
    for (int k = 0; k <= n; ++k) {
      const double th = a + k * h;
      const double f = density({std::sin(th), 0, std::cos(th)}) * std::sin(th);
      sum += (k == 0 || k == n) ? f : (k % 2 ? 4 * f : 2 * f);
    }
    return 2 * kPi * sum * h / 3;
  };
  if (mode_ == Mode::Uniform) return integrate(0, kPi);
  return integrate(0, width_) + integrate(kPi - width_, kPi);
}

std::string SphereVolumeForm::to_string() const {
  if (mode_ == Mode::Uniform) return "uniform";
  std::string w = std::to_string(width_);
  while (w.size() > 1 && w.back() == '0') w.pop_back();
  if (!w.empty() && w.back() == '.') w.pop_back();
  return "bump:" + w;
}

Vec3 vertex_position(const ParametricLongKnot& k, const ConfigurationPoint& cp, int num_i, int v) {
  if (v <= num_i) return rotate_x(k.position(cp.x.at(v - 1)), cp.s);
  return cp.y.at(v - num_i - 1);
}

Vec3 gauss_map(const ParametricLongKnot& k, const ConfigurationPoint& cp, int num_i, const Edge& e) {
  if (e.from == e.to) {
    if (e.from > num_i) throw IntegrationError("loop at a free vertex");
    return normalized(rotate_x(k.derivative(cp.x.at(e.from - 1)), cp.s));
  }
  const Vec3 d = vertex_position(k, cp, num_i, e.to) - vertex_position(k, cp, num_i, e.from);
  const double r = norm(d);
  if (!(r > kMargin)) throw IntegrationError("coincident edge endpoints");
  return (1.0 / r) * d;
}

namespace {

// Orthonormal (a, b) with a × b = u.
std::pair<Vec3, Vec3> frame(const Vec3& u) {
  Vec3 e{1, 0, 0};
  if (std::abs(u.x) > 0.6) e = std::abs(u.y) < std::abs(u.z) ? Vec3{0, 1, 0} : Vec3{0, 0, 1};
  const Vec3 a = normalized(cross(u, e));
  return {a, cross(u, a)};
}

// Determinant by Gaussian elimination with partial pivoting.
double determinant(std::vector<double>& m, int n) {
  double det = 1;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(m[r * n + c]) > std::abs(m[piv * n + c])) piv = r;
    }
    if (m[piv * n + c] == 0) return 0;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(m[c * n + j], m[piv * n + j]);
      det = -det;
    }
    const double p = m[c * n + c];
    det *= p;
    for (int r = c + 1; r < n; ++r) {
      const double f = m[r * n + c] / p;
      if (f == 0) continue;
      for (int j = c + 1; j < n; ++j) m[r * n + j] -= f * m[c * n + j];
    }
  }
  return det;
}

// d/ds of a rotated point: the rotation generator about the x-axis.
Vec3 spin(const Vec3& p) { return cross(Vec3{1, 0, 0}, p); }

}  // namespace

double integrand(const ParametricLongKnot& k, const Graph& g, const ConfigurationPoint& cp,
                 const SphereVolumeForm& vol) {
  if (g.degree() != 1) throw IntegrationError("integrand needs a degree-1 graph, got degree " + std::to_string(g.degree()));
  const int si = g.num_i_vertices();
  const int ti = g.num_f_vertices();
  if (static_cast<int>(cp.x.size()) != si || static_cast<int>(cp.y.size()) != ti) {
    throw IntegrationError("configuration does not match the graph");
  }
  for (int i = 1; i < si; ++i) {
    if (!(cp.x[i] > cp.x[i - 1])) throw IntegrationError("line parameters must increase");
  }
  const int n = 2 * g.num_edges();
  const int cols = 1 + si + 3 * ti;
  if (cols != n) throw IntegrationError("dimension mismatch");

  std::vector<Vec3> pos(si + ti + 1), tangent(si + 1), accel(si + 1);
  for (int v = 1; v <= si; ++v) {
    pos[v] = rotate_x(k.position(cp.x[v - 1]), cp.s);
    tangent[v] = rotate_x(k.derivative(cp.x[v - 1]), cp.s);
    accel[v] = rotate_x(k.second_derivative(cp.x[v - 1]), cp.s);
  }
  for (int j = 0; j < ti; ++j) pos[si + 1 + j] = cp.y[j];
  for (int a = 1; a <= si + ti; ++a) {
    for (int b = a + 1; b <= si + ti; ++b) {
      if (norm(pos[a] - pos[b]) < kMargin) throw IntegrationError("configuration point collision");
    }
  }
  for (int j = 0; j < ti; ++j) {
    // Free points must stay off the knot; a cheap check against the vertices
    // suffices for the integrand (only Gauss maps of edges enter).
    if (!std::isfinite(cp.y[j].x + cp.y[j].y + cp.y[j].z)) throw IntegrationError("non-finite free point");
  }

  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  double weight = 1;
  auto col_of = [&](int v) { return v <= si ? v : 1 + si + 3 * (v - si - 1); };
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edges()[e];
    double* ra = &m[static_cast<std::size_t>(2 * e) * n];
    double* rb = &m[static_cast<std::size_t>(2 * e + 1) * n];
    if (ed.from == ed.to) {
      const int v = ed.from;
      const double len = norm(tangent[v]);
      const Vec3 u = (1.0 / len) * tangent[v];
      const auto [fa, fb] = frame(u);
      weight *= vol.density(u);
      const Vec3 du_s = spin(u);
      const Vec3 du_x = (1.0 / len) * (accel[v] - dot(u, accel[v]) * u);
      ra[0] = dot(fa, du_s);
      rb[0] = dot(fb, du_s);
      ra[v] = dot(fa, du_x);
      rb[v] = dot(fb, du_x);
      continue;
    }
    const Vec3 d = pos[ed.to] - pos[ed.from];
    const double r = norm(d);
    const Vec3 u = (1.0 / r) * d;
    const auto [fa, fb] = frame(u);
    weight *= vol.density(u);
    // du = P (dq - dp) / r with P = I - u uᵀ; project onto the frame,
    // which is already orthogonal to u, so P drops out.
    const Vec3 pa = (1.0 / r) * fa;
    const Vec3 pb = (1.0 / r) * fb;
    Vec3 ds{};
    if (ed.to <= si) ds += spin(pos[ed.to]);
    if (ed.from <= si) ds -= spin(pos[ed.from]);
    ra[0] = dot(pa, ds);
    rb[0] = dot(pb, ds);
    for (int side = 0; side < 2; ++side) {
      const int v = side == 0 ? ed.to : ed.from;
      const double sgn = side == 0 ? 1.0 : -1.0;
      const int c = col_of(v);
      if (v <= si) {
        ra[c] += sgn * dot(pa, tangent[v]);
        rb[c] += sgn * dot(pb, tangent[v]);
      } else {
        for (int k3 = 0; k3 < 3; ++k3) {
          ra[c + k3] += sgn * pa[k3];
          rb[c + k3] += sgn * pb[k3];
        }
      }
    }
  }
  if (weight == 0) return 0;
  const double det = determinant(m, n);
  const double out = kPairingSign * weight * det;
  if (!std::isfinite(out)) throw IntegrationError("non-finite integrand");
  return out;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return splitmix(splitmix(splitmix(seed ^ 0x5bd1e995ULL) ^ a) ^ (b * 0x100000001b3ULL)) ^ splitmix(c + 17);
}

// Importance sampler for one graph. Line parameters: iid from a mixture of
// Uniform[-1,1] and a Cauchy law (a tan substitution), then sorted. Free
// points: in label order, each from a mixture of heavy-tailed radial laws
// centred at its already placed neighbours and one broad law at the origin.
class Sampler {
 public:
  Sampler(const ParametricLongKnot& k, const Graph& g, double scale)
      : k_(k), g_(g), si_(g.num_i_vertices()), ti_(g.num_f_vertices()), cauchy_(scale), near_(0.4 * scale), broad_(1.0) {
    anchors_.resize(ti_);
    for (int j = 0; j < ti_; ++j) {
      const int v = si_ + 1 + j;
      for (const Edge& e : g.edges()) {
        const int other = e.from == v ? e.to : (e.to == v ? e.from : 0);
        if (other && other < v && std::find(anchors_[j].begin(), anchors_[j].end(), other) == anchors_[j].end()) {
          anchors_[j].push_back(other);
        }
      }
    }
    log_fact_ = std::lgamma(si_ + 1.0);
    // Tabulated line law: tangent turning rate plus a floor on the
    // off-axis part of the curve.
    table_.assign(kCells, 0.0);
    double off_total = 0, turn_total = 0;
    std::vector<double> turn(kCells), off(kCells);
    for (int c = 0; c < kCells; ++c) {
      const double t = -1.0 + 2.0 * (c + 0.5) / kCells;
      const Vec3 d = k.derivative(t);
      const Vec3 p = k.position(t);
      turn[c] = norm(cross(d, k.second_derivative(t))) / dot(d, d);
      off[c] = std::abs(p.y) + std::abs(p.z) > 1e-12 ? 1.0 : 0.0;
      turn_total += turn[c];
      off_total += off[c];
    }
    const double cell = 2.0 / kCells;
    for (int c = 0; c < kCells; ++c) {
      double v = 0.5 * (off_total > 0 ? off[c] / off_total : 1.0 / kCells);
      v += 0.5 * (turn_total > 0 ? turn[c] / turn_total : 1.0 / kCells);
      table_[c] = v / cell;
    }
    cdf_.assign(kCells + 1, 0.0);
    for (int c = 0; c < kCells; ++c) cdf_[c + 1] = cdf_[c] + table_[c] * cell;
    cdf_.back() = 1.0;
  }

  // Draws cp (given its s) and returns the sampling density of (x, y).
  double draw(std::mt19937_64& rng, ConfigurationPoint& cp) const {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    cp.x.resize(si_);
    cp.y.resize(ti_);
    double log_q = log_fact_;
    for (int i = 0; i < si_; ++i) {
      double x;
      const double pick = U(rng);
      if (pick < kUniformWeight) {
        x = -1.0 + 2.0 * U(rng);
      } else if (pick < kUniformWeight + kCauchyWeight) {
        x = cauchy_ * std::tan(kPi * (U(rng) - 0.5));
      } else {
        const double v = U(rng);
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), v);
        const int c = std::clamp(static_cast<int>(it - cdf_.begin()) - 1, 0, kCells - 1);
        const double span = cdf_[c + 1] - cdf_[c];
        const double frac = span > 0 ? (v - cdf_[c]) / span : 0.5;
        x = -1.0 + 2.0 * (c + std::clamp(frac, 0.0, 1.0)) / kCells;
      }
      cp.x[i] = x;
      log_q += std::log(line_density(x));
    }
    std::sort(cp.x.begin(), cp.x.end());
    std::vector<Vec3> pos(si_ + ti_ + 1);
    for (int v = 1; v <= si_; ++v) pos[v] = rotate_x(k_.position(cp.x[v - 1]), cp.s);
    for (int j = 0; j < ti_; ++j) {
      const auto& an = anchors_[j];
      const double bw = an.empty() ? 1.0 : kBroadWeight;
      Vec3 centre{};
      double scale = broad_;
      if (U(rng) >= bw) {
        centre = pos[an[std::min<std::size_t>(an.size() - 1, static_cast<std::size_t>(U(rng) * an.size()))]];
        scale = near_;
      }
      const double u = U(rng);
      const double r = scale * u / (1 - u);
      const double cz = 2 * U(rng) - 1;
      const double ph = 2 * kPi * U(rng);
      const double sz = std::sqrt(std::max(0.0, 1 - cz * cz));
      const Vec3 y = centre + r * Vec3{sz * std::cos(ph), sz * std::sin(ph), cz};
      double q = bw * radial(norm(y), broad_);
      for (int a : an) q += (1 - bw) / an.size() * radial(norm(y - pos[a]), near_);
      cp.y[j] = y;
      pos[si_ + 1 + j] = y;
      log_q += std::log(q);
    }
    return std::exp(log_q);
  }

  // Density of draw() at a configuration with sorted line parameters.
  double density(const ConfigurationPoint& cp) const {
    double log_q = log_fact_;
    for (double x : cp.x) log_q += std::log(line_density(x));
    std::vector<Vec3> pos(si_ + ti_ + 1);
    for (int v = 1; v <= si_; ++v) pos[v] = rotate_x(k_.position(cp.x[v - 1]), cp.s);
    for (int j = 0; j < ti_; ++j) {
      const auto& an = anchors_[j];
      const double bw = an.empty() ? 1.0 : kBroadWeight;
      const Vec3& y = cp.y[j];
      double q = bw * radial(norm(y), broad_);
      for (int a : an) q += (1 - bw) / an.size() * radial(norm(y - pos[a]), near_);
      pos[si_ + 1 + j] = y;
      log_q += std::log(q);
    }
    return std::exp(log_q);
  }

 private:
  static constexpr int kCells = 4096;
  static constexpr double kUniformWeight = 0.15;
  static constexpr double kCauchyWeight = 0.15;
  static constexpr double kBroadWeight = 0.15;

  double line_density(double x) const {
    const double uni = std::abs(x) <= 1 ? 0.5 : 0.0;
    const double cau = 1.0 / (kPi * cauchy_ * (1 + (x / cauchy_) * (x / cauchy_)));
    double tab = 0;
    if (std::abs(x) < 1) tab = table_[std::clamp(static_cast<int>((x + 1.0) / 2.0 * kCells), 0, kCells - 1)];
    return kUniformWeight * uni + kCauchyWeight * cau + (1 - kUniformWeight - kCauchyWeight) * tab;
  }
  // Density in R³ of centre + r ω with r ~ ℓ/(ℓ+r)² dr and ω uniform.
  static double radial(double r, double l) { return l / ((l + r) * (l + r)) / (4 * kPi * r * r); }

  const ParametricLongKnot& k_;
  const Graph& g_;
  int si_, ti_;
  double cauchy_, near_, broad_;
  double log_fact_ = 0;
  std::vector<std::vector<int>> anchors_;
  std::vector<double> table_, cdf_;
};


// Piecewise-constant law on [lo, hi] with `weights.size()` equal cells.
class CellLaw {
 public:
  CellLaw() = default;
  CellLaw(double lo, double hi, const std::vector<double>& weights) : lo_(lo), hi_(hi), cdf_(weights.size() + 1, 0.0) {
    for (std::size_t j = 0; j < weights.size(); ++j) cdf_[j + 1] = cdf_[j] + weights[j];
    total_ = cdf_.back();
  }
  double sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    return quantile(U(rng));
  }
  // Inverse distribution function.
  double quantile(double u) const {
    const double v = u * total_;
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), v);
    const int n = cells();
    const int c = std::clamp(static_cast<int>(it - cdf_.begin()) - 1, 0, n - 1);
    const double span = cdf_[c + 1] - cdf_[c];
    const double f = span > 0 ? std::clamp((v - cdf_[c]) / span, 0.0, 1.0) : 0.5;
    return lo_ + (hi_ - lo_) * (c + f) / n;
  }
  double density(double x) const {
    if (!(x >= lo_ && x < hi_) || total_ <= 0) return 0.0;
    const int n = cells();
    const int c = std::clamp(static_cast<int>((x - lo_) / (hi_ - lo_) * n), 0, n - 1);
    return (cdf_[c + 1] - cdf_[c]) / total_ * n / (hi_ - lo_);
  }

 private:
  int cells() const { return static_cast<int>(cdf_.size()) - 1; }
  double lo_ = 0, hi_ = 1, total_ = 0;
  std::vector<double> cdf_;
};

// Each cell takes the largest value among its neighbours, so a support
// edge falling between two cell centres is not lost, plus a small floor.
std::vector<double> dilate(const std::vector<double>& v, double rel_floor) {
  const int n = static_cast<int>(v.size());
  std::vector<double> out(n);
  double top = 0;
  for (int j = 0; j < n; ++j) {
    out[j] = std::max({v[j], j ? v[j - 1] : 0.0, j + 1 < n ? v[j + 1] : 0.0});
    top = std::max(top, out[j]);
  }
  const double floor = top > 0 ? rel_floor * top : 1.0;
  for (double& x : out) x += floor;
  return out;
}

constexpr double kTableSpan = 1.2;  // line parameters covered by the tables

// Root laws for a concentrated volume form, per cell of the rotation angle.
// Weights follow the ideal joint law of a block: for a loop root, the
// density of its tangent image times the Jacobian of (s, t) ↦ tangent; for
// other roots, the chord density to a partner point times the Jacobian of
// (t, t') ↦ chord direction, summed over partners.
struct RootTables {
  static constexpr int kAngles = 256;
  static constexpr int kCells = 512;
  // Loop: tangent in the support. Forward, Backward, Both: a chord partner
  // later, earlier or anywhere on the line. Spread: Both mixed half and half
  // with the flat law, for roots whose alignment is made by a free vertex.
  enum Kind { Loop = 0, Forward = 1, Backward = 2, Both = 3, Spread = 4 };
  std::array<std::vector<CellLaw>, 5> laws;

  RootTables(const ParametricLongKnot& k, const SphereVolumeForm& vol) {
    const double dt = 2 * kTableSpan / kCells;
    std::vector<Vec3> p(kCells), d(kCells), u0(kCells);
    std::vector<double> loop_jac(kCells);
    const Vec3 e1{1, 0, 0};
    for (int j = 0; j < kCells; ++j) {
      const double t = -kTableSpan + (j + 0.5) * dt;
      p[j] = k.position(t);
      d[j] = k.derivative(t);
      const double len = norm(d[j]);
      u0[j] = (1.0 / len) * d[j];
      const Vec3 dd = k.second_derivative(t);
      const Vec3 v = (1.0 / len) * (dd - dot(u0[j], dd) * u0[j]);
      loop_jac[j] = std::abs(dot(cross(cross(e1, u0[j]), v), u0[j]));
    }
    // Rotation-invariant chord Jacobians |(d_i × d_j)·(p_j - p_i)| / r³.
    std::vector<float> jac(static_cast<std::size_t>(kCells) * kCells, 0.0f);
    for (int i = 0; i < kCells; ++i) {
      for (int j = i + 1; j < kCells; ++j) {
        const Vec3 c = p[j] - p[i];
        const double r = norm(c);
        const double v = r > 0 ? std::abs(dot(cross(d[i], d[j]), c)) / (r * r * r) : 0.0;
        jac[static_cast<std::size_t>(i) * kCells + j] = static_cast<float>(v);
      }
    }
    std::vector<std::vector<double>> lv(kAngles, std::vector<double>(kCells, 0.0));
    std::vector<std::vector<double>> fv = lv, bv = lv, cv = lv;
    for (int a = 0; a < kAngles; ++a) {
      const double s = 2 * kPi * (a + 0.5) / kAngles;
      std::vector<Vec3> q(kCells);
      for (int j = 0; j < kCells; ++j) {
        q[j] = rotate_x(p[j], s);
        lv[a][j] = vol.density(rotate_x(u0[j], s)) * loop_jac[j];
      }
      for (int i = 0; i < kCells; ++i) {
        for (int j = i + 1; j < kCells; ++j) {
          const double rho = vol.density(q[j] - q[i]);
          if (rho == 0) continue;
          const double r = rho * jac[static_cast<std::size_t>(i) * kCells + j] * dt;
          fv[a][i] += r;
          bv[a][j] += r;
        }
      }
      for (int j = 0; j < kCells; ++j) cv[a][j] = fv[a][j] + bv[a][j];
    }
    auto build = [&](std::vector<std::vector<double>>& v, Kind kind) {
      auto& out = laws[kind];
      out.resize(kAngles);
      for (int a = 0; a < kAngles; ++a) {
        std::vector<double> row(kCells, 0.0);
        for (int da = -1; da <= 1; ++da) {
          const auto& src = v[(a + da + kAngles) % kAngles];
          for (int j = 0; j < kCells; ++j) row[j] = std::max(row[j], src[j]);
        }
        weights[kind].push_back(dilate(row, 1e-3));
        out[a] = CellLaw(-kTableSpan, kTableSpan, weights[kind].back());
      }
    };
    build(lv, Loop);
    build(fv, Forward);
    build(bv, Backward);
    build(cv, Both);
    laws[Spread].resize(kAngles);
    for (int a = 0; a < kAngles; ++a) {
      std::vector<double> w = weights[Both][a];
      double mean = 0;
      for (double x : w) mean += x / kCells;
      for (double& x : w) x += mean;
      weights[Spread].push_back(w);
      laws[Spread][a] = CellLaw(-kTableSpan, kTableSpan, w);
    }
  }

  // The root law restricted to the cells meeting [lo, hi].
  CellLaw restricted(Kind kind, int a, double lo, double hi) const {
    const auto& w = weights[kind][a];
    const double dt = 2 * kTableSpan / kCells;
    const int j0 = std::clamp(static_cast<int>(std::floor((lo + kTableSpan) / dt)), 0, kCells - 1);
    const int j1 = std::clamp(static_cast<int>(std::ceil((hi + kTableSpan) / dt)), j0 + 1, kCells);
    return CellLaw(-kTableSpan + j0 * dt, -kTableSpan + j1 * dt, std::vector<double>(w.begin() + j0, w.begin() + j1));
  }

  std::array<std::vector<std::vector<double>>, 5> weights;  // per kind and angle cell

  double mass(Kind kind, int a) const {
    double m = 0;
    for (double x : weights[kind][a]) m += x;
    return m;
  }

  static int angle_cell(double s) {
    const double u = s / (2 * kPi);
    return std::clamp(static_cast<int>((u - std::floor(u)) * kAngles), 0, kAngles - 1);
  }
};

// Proposal for a concentrated volume form. The non-loop edges of every
// graph it is used for form a forest; walking each tree from its first
// interval vertex, every edge is placed so that its Gauss image follows the
// volume density: a free endpoint along a direction drawn from the form,
// an interval endpoint from a tabulated law over the line parameter,
// restricted to the range left open by the interval vertices already placed.
class DirectedSampler {
 public:
  DirectedSampler(const ParametricLongKnot& k, const Graph& g, const SphereVolumeForm& vol, const RootTables& roots)
      : k_(k), g_(g), vol_(vol), roots_(roots), si_(g.num_i_vertices()), ti_(g.num_f_vertices()) {
    const int n = si_ + ti_;
    has_loop_.assign(n + 1, false);
    for (const Edge& e : g.edges()) {
      if (e.from == e.to) has_loop_[e.from] = true;
    }
    std::vector<bool> seen(n + 1, false);
    for (int r = 1; r <= si_; ++r) {
      if (seen[r]) continue;
      seen[r] = true;
      steps_.push_back({r, 0, Edge{}});
      for (std::size_t head = steps_.size() - 1; head < steps_.size(); ++head) {
        const int a = steps_[head].vertex;
        for (const Edge& e : g.edges()) {
          if (e.from == e.to) continue;
          const int b = e.from == a ? e.to : (e.to == a ? e.from : 0);
          if (!b) continue;
          if (seen[b]) {
            if (b != steps_[head].parent) forest_ = false;
            continue;
          }
          seen[b] = true;
          steps_.push_back({b, a, e});
        }
      }
    }
    for (int v = 1; v <= n; ++v) forest_ = forest_ && seen[v];
    // A root's table looks for chord partners on the side of its first
    // interval child.
    root_kind_.assign(si_ + 1, RootTables::Both);
    for (const Step& st : steps_) {
      if (st.parent != 0) continue;
      const int r = st.vertex;
      if (has_loop_[r]) {
        root_kind_[r] = RootTables::Loop;
        continue;
      }
      for (const Step& c : steps_) {
        if (c.parent != r) continue;
        if (c.vertex <= si_) {
          root_kind_[r] = c.vertex > r ? RootTables::Forward : RootTables::Backward;
        } else {
          root_kind_[r] = RootTables::Spread;
        }
        break;
      }
    }
    // Law of the rotation angle: the product of the roots' table masses,
    // mixed with the flat law.
    std::vector<double> sw(RootTables::kAngles, 1.0);
    for (const Step& st : steps_) {
      if (st.parent != 0) continue;
      for (int a = 0; a < RootTables::kAngles; ++a) sw[a] *= roots.mass(root_kind_[st.vertex], a);
    }
    double top = 0;
    for (double x : sw) top = std::max(top, x);
    for (double& x : sw) x = top > 0 ? x / top + kFlatAngle : 1.0;
    s_law_ = CellLaw(0, 2 * kPi, sw);
    const double dt = 2 * kTableSpan / kFine;
    fine_p_.resize(kFine);
    fine_d_.resize(kFine);
    fine_u_.resize(kFine);
    fine_loop_.resize(kFine);
    const Vec3 e1{1, 0, 0};
    for (int j = 0; j < kFine; ++j) {
      const double t = -kTableSpan + (j + 0.5) * dt;
      fine_p_[j] = k.position(t);
      fine_d_[j] = k.derivative(t);
      const double len = norm(fine_d_[j]);
      fine_u_[j] = (1.0 / len) * fine_d_[j];
      const Vec3 dd = k.second_derivative(t);
      const Vec3 v = (1.0 / len) * (dd - dot(fine_u_[j], dd) * fine_u_[j]);
      fine_loop_[j] = std::abs(dot(cross(cross(e1, fine_u_[j]), v), fine_u_[j]));
    }
  }

  // False when some edge closes a cycle; such graphs fall back to the
  // generic sampler.
  bool usable() const { return forest_; }

  // u places the rotation angle through its inverse law.
  double draw(std::mt19937_64& rng, double u, ConfigurationPoint& cp) const {
    cp.s = s_law_.quantile(u);
    return s_law_.density(cp.s) * walk(&rng, cp);
  }
  double density(const ConfigurationPoint& cp, std::vector<double>* factors = nullptr) const {
    ConfigurationPoint copy = cp;
    return s_law_.density(cp.s) * walk(nullptr, copy, factors);
  }

 private:
  struct Step {
    int vertex;
    int parent;  // 0 for a root
    Edge edge;   // edge to the parent
  };
  static constexpr int kFine = 1024;
  static constexpr double kReach = 0.3;  // radial scale of free vertices
  static constexpr double kFlatAngle = 0.05;

  // With rng: samples into cp. Without: evaluates the density of cp.
  double walk(std::mt19937_64* rng, ConfigurationPoint& cp, std::vector<double>* factors = nullptr) const {
    cp.x.resize(si_);
    cp.y.resize(ti_);
    std::vector<Vec3> pos(si_ + ti_ + 1);
    std::vector<bool> placed(si_ + 1, false);
    double q = 1;
    const int cell = RootTables::angle_cell(cp.s);
    for (const Step& st : steps_) {
      const int b = st.vertex;
      if (b <= si_) {
        double lo = -kTableSpan, hi = kTableSpan;
        for (int v = 1; v <= si_; ++v) {
          if (!placed[v]) continue;
          if (v < b) lo = std::max(lo, cp.x[v - 1]);
          if (v > b) hi = std::min(hi, cp.x[v - 1]);
        }
        if (!(lo < hi)) return 0;
        CellLaw local;
        const CellLaw* law = &local;
        if (st.parent == 0 && lo == -kTableSpan && hi == kTableSpan) {
          law = &roots_.laws[root_kind_[b]][cell];
        } else if (st.parent == 0) {
          local = roots_.restricted(root_kind_[b], cell, lo, hi);
        } else {
          local = child_law(cp, pos, st, has_loop_[b], lo, hi);
        }
        if (rng) cp.x[b - 1] = law->sample(*rng);
        q *= law->density(cp.x[b - 1]);
        if (factors) factors->push_back(law->density(cp.x[b - 1]));
        if (q == 0) return 0;
        pos[b] = rotate_x(k_.position(cp.x[b - 1]), cp.s);
        placed[b] = true;
      } else {
        Vec3& y = cp.y[b - si_ - 1];
        const bool outward = st.edge.from == st.parent;  // edge points from parent to b
        if (rng) {
          const Vec3 u = sample_direction(*rng);
          std::uniform_real_distribution<double> U(0.0, 1.0);
          const double w = U(*rng);
          const double r = kReach * w / (1 - w);
          y = pos[st.parent] + (outward ? r : -r) * u;
        }
        const Vec3 d = outward ? y - pos[st.parent] : pos[st.parent] - y;
        const double r = norm(d);
        if (!(r > 0)) return 0;
        q *= vol_.density(d) * kReach / ((kReach + r) * (kReach + r)) / (r * r);
        if (factors) factors->push_back(vol_.density(d) * kReach / ((kReach + r) * (kReach + r)) / (r * r));
        if (q == 0) return 0;
        pos[b] = y;
      }
    }
    for (int i = 1; i < si_; ++i) {
      if (!(cp.x[i] > cp.x[i - 1])) return 0;
    }
    return q;
  }

  // Law of the line parameter of st.vertex on [lo, hi]: density of its
  // parent edge's image times the speed of that image along the line (for
  // a chord, the Jacobian of the pair), times the loop factor if any.
  CellLaw child_law(const ConfigurationPoint& cp, const std::vector<Vec3>& pos, const Step& st, bool loop, double lo,
                    double hi) const {
    const double c = std::cos(cp.s);
    const double sn = std::sin(cp.s);
    auto rot = [&](const Vec3& p) { return Vec3{p.x, c * p.y - sn * p.z, sn * p.y + c * p.z}; };
    const double dt = 2 * kTableSpan / kFine;
    const int j0 = std::clamp(static_cast<int>(std::floor((lo + kTableSpan) / dt)), 0, kFine - 1);
    const int j1 = std::clamp(static_cast<int>(std::ceil((hi + kTableSpan) / dt)), j0 + 1, kFine);
    std::vector<double> v(j1 - j0, 0.0);
    const int a = st.parent;
    Vec3 da{};
    if (a && a <= si_) da = k_.derivative(cp.x[a - 1]);
    const Vec3 pa_knot = a && a <= si_ ? k_.position(cp.x[a - 1]) : Vec3{};
    for (int j = j0; j < j1; ++j) {
      double w = 1;
      if (a) {
        const Vec3 q = rot(fine_p_[j]);
        const bool inward = st.edge.to == st.vertex;
        const Vec3 dir = inward ? q - pos[a] : pos[a] - q;
        w = vol_.density(dir);
        if (w == 0) continue;
        const double r = norm(dir);
        if (a <= si_) {
          const Vec3 cc = fine_p_[j] - pa_knot;
          w *= std::abs(dot(cross(da, fine_d_[j]), cc)) / (r * r * r);
        } else {
          const Vec3 u = (1.0 / r) * dir;
          const Vec3 tv = rot(fine_d_[j]);
          w *= norm(tv - dot(u, tv) * u) / r;
        }
      }
      if (loop) w *= vol_.density(rot(fine_u_[j])) * fine_loop_[j];
      v[j - j0] = w;
    }
    return CellLaw(-kTableSpan + j0 * dt, -kTableSpan + j1 * dt, dilate(v, 1e-3));
  }

  // A unit vector with density vol_.density against area.
  Vec3 sample_direction(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double w = vol_.width();
    const double cw = std::cos(w);
    for (;;) {
      const double cz = cw + (1 - cw) * U(rng);
      const double th = std::acos(cz);
      const double r = th / w;
      if (U(rng) > (1 - r * r) * (1 - r * r)) continue;
      const double ph = 2 * kPi * U(rng);
      const double sz = std::sqrt(std::max(0.0, 1 - cz * cz));
      const double sign = U(rng) < 0.5 ? 1.0 : -1.0;
      return Vec3{sz * std::cos(ph), sz * std::sin(ph), sign * cz};
    }
  }

  const ParametricLongKnot& k_;
  const Graph& g_;
  const SphereVolumeForm& vol_;
  const RootTables& roots_;
  int si_, ti_;
  std::vector<bool> has_loop_;
  std::vector<RootTables::Kind> root_kind_;
  std::vector<Step> steps_;
  CellLaw s_law_;
  bool forest_ = true;
  std::vector<Vec3> fine_p_, fine_d_, fine_u_;
  std::vector<double> fine_loop_;
};

// The generic sampler, mixed with the directed one when the volume form is
// concentrated.
class Proposal {
 public:
  Proposal(const ParametricLongKnot& k, const Graph& g, const SphereVolumeForm& vol, double scale,
           const RootTables* roots)
      : generic_(k, g, scale) {
    if (roots) {
      directed_.emplace(k, g, vol, *roots);
      if (!directed_->usable()) directed_.reset();
    }
  }

  // Draws cp with its rotation angle driven by u in [0, 1); returns the
  // joint density, angle included.
  double draw(std::mt19937_64& rng, double u, ConfigurationPoint& cp) const {
    const double flat = 1 / (2 * kPi);
    if (!directed_) {
      cp.s = 2 * kPi * u;
      return flat * generic_.draw(rng, cp);
    }
    std::uniform_real_distribution<double> U(0.0, 1.0);
    if (U(rng) < kGenericShare) {
      cp.s = 2 * kPi * u;
      const double qg = flat * generic_.draw(rng, cp);
      return kGenericShare * qg + (1 - kGenericShare) * directed_->density(cp);
    }
    const double qd = directed_->draw(rng, u, cp);
    if (qd == 0) return 0;  // outside the domain (line order violated)
    return kGenericShare * flat * generic_.density(cp) + (1 - kGenericShare) * qd;
  }

 private:
  static constexpr double kGenericShare = 0.1;
  Sampler generic_;
  std::optional<DirectedSampler> directed_;
};

struct Accumulator {
  std::vector<double> sum, sumsq;
  std::vector<std::int64_t> count;
  std::int64_t rejected = 0;
  explicit Accumulator(int strata = 1) : sum(strata, 0.0), sumsq(strata, 0.0), count(strata, 0) {}
  void merge(const Accumulator& o) {
    for (std::size_t h = 0; h < sum.size(); ++h) {
      sum[h] += o.sum[h];
      sumsq[h] += o.sumsq[h];
      count[h] += o.count[h];
    }
    rejected += o.rejected;
  }
  std::int64_t n() const {
    std::int64_t t = 0;
    for (auto c : count) t += c;
    return t;
  }
  // Stratified mean and its standard error (equal stratum weights).
  std::pair<double, double> estimate() const {
    const int strata = static_cast<int>(sum.size());
    bool all = true;
    for (auto c : count) all = all && c >= 2;
    if (!all) {
      double s = 0, q = 0;
      for (int h = 0; h < strata; ++h) {
        s += sum[h];
        q += sumsq[h];
      }
      const double nn = static_cast<double>(n());
      if (nn < 2) return {nn ? s / nn : 0.0, INFINITY};
      const double mean = s / nn;
      const double var = std::max(0.0, (q - nn * mean * mean) / (nn - 1));
      return {mean, std::sqrt(var / nn)};
    }
    double mean = 0, var = 0;
    for (int h = 0; h < strata; ++h) {
      const double nh = static_cast<double>(count[h]);
      const double mh = sum[h] / nh;
      const double vh = std::max(0.0, (sumsq[h] - nh * mh * mh) / (nh - 1));
      mean += mh / strata;
      var += vh / nh / (double(strata) * strata);
    }
    return {mean, std::sqrt(var)};
  }
};

// Samples [first, first+count) of one graph's stream into acc.
void run_chunk(const ParametricLongKnot& k, const Graph& g, const SphereVolumeForm& vol, const Proposal& sampler,
               std::uint64_t seed, std::int64_t first, std::int64_t count, int strata, Accumulator& acc) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  ConfigurationPoint cp;
  for (std::int64_t i = 0; i < count; ++i) {
    const int h = static_cast<int>((first + i) % strata);
    const double q = sampler.draw(rng, (h + U(rng)) / strata, cp);
    double w = 0;
    try {
      if (q > 0 && std::isfinite(q)) w = integrand(k, g, cp, vol) / q;
    } catch (const IntegrationError&) {
      ++acc.rejected;
      w = 0;
    }
    if (!std::isfinite(w)) {
      ++acc.rejected;
      w = 0;
    }
    acc.sum[h] += w;
    acc.sumsq[h] += w * w;
    ++acc.count[h];
  }
}

Accumulator sample_graph(const ParametricLongKnot& k, const Graph& g, const SphereVolumeForm& vol,
                         const SamplerConfig& cfg, std::uint64_t stream, std::int64_t samples,
                         const RootTables* roots) {
  const int strata = std::max(1, cfg.strata);
  const int chunks = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(cfg.chunks, samples)));
  const Proposal sampler(k, g, vol, cfg.box_scale, roots);
  std::vector<Accumulator> parts(chunks, Accumulator(strata));
  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(chunks));
  auto work = [&](unsigned tid) {
    for (int c = static_cast<int>(tid); c < chunks; c += static_cast<int>(threads)) {
      const std::int64_t first = samples * c / chunks;
      const std::int64_t last = samples * (c + 1) / chunks;
      run_chunk(k, g, vol, sampler, derive_seed(cfg.seed, stream, static_cast<std::uint64_t>(c), 0), first, last - first,
                strata, parts[c]);
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  Accumulator total(strata);
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace

bool has_triangle(const Graph& g) {
  const int n = g.num_vertices();
  std::vector<std::vector<bool>> adj(n + 1, std::vector<bool>(n + 1, false));
  for (const Edge& e : g.edges()) {
    if (e.from != e.to) adj[e.from][e.to] = adj[e.to][e.from] = true;
  }
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      if (!adj[a][b]) continue;
      for (int c = b + 1; c <= n; ++c) {
        if (adj[a][c] && adj[b][c]) return true;
      }
    }
  }
  return false;
}

GraphEstimate integrate_graph(const ParametricLongKnot& k, const Graph& g, const SphereVolumeForm& vol,
                              const SamplerConfig& cfg) {
  if (cfg.samples <= 0) throw IntegrationError("sample budget must be positive");
  if (g.degree() != 1) throw IntegrationError("pairing needs degree-1 graphs: " + g.to_string());
  std::optional<RootTables> roots;
  if (vol.mode() == SphereVolumeForm::Mode::PolarBump) roots.emplace(k, vol);
  const Accumulator acc = sample_graph(k, g, vol, cfg, 1, cfg.samples, roots ? &*roots : nullptr);
  const auto [mean, err] = acc.estimate();
  return GraphEstimate{g, Rational(1), mean, err, acc.n(), acc.rejected};
}

MCEstimate pair_gramain(const ParametricLongKnot& k, const GraphChain& c, const SphereVolumeForm& vol,
                        const SamplerConfig& cfg) {
  if (cfg.samples <= 0) throw IntegrationError("sample budget must be positive");
  std::vector<std::pair<Graph, Rational>> terms;
  MCEstimate out;
  out.seed = cfg.seed;
  for (const auto& [g, coef] : c.terms()) {
    if (g.degree() != 1) throw IntegrationError("pairing needs degree-1 graphs: " + g.to_string());
    if (has_triangle(g)) {
      out.terms.push_back({g, coef, 0.0, 0.0, 0, 0});
    } else {
      terms.emplace_back(g, coef);
    }
  }
  if (terms.empty()) return out;

  std::optional<RootTables> roots;
  if (vol.mode() == SphereVolumeForm::Mode::PolarBump) roots.emplace(k, vol);
  const RootTables* rt = roots ? &*roots : nullptr;
  const int strata = std::max(1, cfg.strata);
  const std::int64_t pilot = std::max<std::int64_t>(
      4 * strata, static_cast<std::int64_t>(cfg.pilot_fraction * static_cast<double>(cfg.samples)) /
                      static_cast<std::int64_t>(terms.size()));
  std::vector<double> spread(terms.size());
  double total_spread = 0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const Accumulator acc = sample_graph(k, terms[t].first, vol, cfg, 1000 + t, pilot, rt);
    const auto [mean, err] = acc.estimate();
    spread[t] = std::abs(terms[t].second.get_d()) * std::max(err * std::sqrt(double(pilot)), 1e-3);
    total_spread += spread[t];
    out.samples += acc.n();
    out.rejected += acc.rejected;
  }
  const std::int64_t main = std::max<std::int64_t>(0, cfg.samples - out.samples);
  double var = 0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::int64_t n = std::max<std::int64_t>(2 * strata, static_cast<std::int64_t>(main * spread[t] / total_spread));
    const Accumulator acc = sample_graph(k, terms[t].first, vol, cfg, 2000 + t, n, rt);
    const auto [mean, err] = acc.estimate();
    const double coef = terms[t].second.get_d();
    out.value += coef * mean;
    var += coef * coef * err * err;
    out.samples += acc.n();
    out.rejected += acc.rejected;
    out.terms.push_back({terms[t].first, terms[t].second, mean, err, acc.n(), acc.rejected});
  }
  out.std_error = std::sqrt(var);
  out.evaluations = out.samples;
  out.rejection_rate = out.samples ? double(out.rejected) / double(out.samples) : 0.0;
  return out;
}

}  // namespace kcsi

namespace kcsi {

namespace {

// Collision data of a face: which parent vertices collide, and how.
struct FaceLayout {
  std::vector<int> free_in;
  std::vector<int> interval_in;
  std::vector<Edge> internal;  // parent labels
  int chords = 0;              // internal non-loop edges
  std::vector<std::vector<int>> components;
};

FaceLayout layout_of(const FaceSpec& face) {
  const Graph& g = face.parent;
  FaceLayout out;
  std::vector<int> in(g.num_vertices() + 1, 0);
  for (int v : face.subset) {
    in[v] = 1;
    (g.is_interval(v) ? out.interval_in : out.free_in).push_back(v);
  }
  std::vector<int> parent(g.num_vertices() + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : g.edges()) {
    if (in[e.from] && in[e.to]) {
      out.internal.push_back(e);
      out.chords += e.from != e.to;
      parent[find(e.from)] = find(e.to);
    }
  }
  std::map<int, std::vector<int>> comps;
  for (int v : face.subset) comps[find(v)].push_back(v);
  for (auto& [root, vs] : comps) out.components.push_back(vs);
  return out;
}

// Coordinates of the collision stratum: s, then the line parameters of the
// interval vertices of A, then the free vertices of A.
struct FacePoint {
  double s = 0;
  std::vector<double> x;  // aligned with interval_in
  std::vector<Vec3> y;    // aligned with free_in
};

struct FaceTangent {
  double s = 0;
  std::vector<double> x;
  std::vector<Vec3> y;
};

struct FaceFormValue {
  double value = 0;
  double scale = 0;               // Hadamard bound: weight times the product of row norms
  std::vector<double> per_edge;   // φ_e^* vol on the first two vectors
};

// The form ω̂_A = ∧ φ_e^* vol over the internal edges, evaluated on the
// tangent vectors `xi` (there must be 2·#edges of them).
FaceFormValue face_form(const ParametricLongKnot& k, const FaceLayout& lay, const FacePoint& p,
                 const std::vector<FaceTangent>& xi, const SphereVolumeForm& vol) {
  const int n = 2 * static_cast<int>(lay.internal.size());
  auto slot = [&](int v, const std::vector<int>& list) {
    return static_cast<int>(std::find(list.begin(), list.end(), v) - list.begin());
  };
  auto position = [&](int v) {
    if (const int j = slot(v, lay.interval_in); j < static_cast<int>(lay.interval_in.size())) {
      return rotate_x(k.position(p.x[j]), p.s);
    }
    return p.y[slot(v, lay.free_in)];
  };
  auto velocity = [&](int v, const FaceTangent& t) {
    if (const int j = slot(v, lay.interval_in); j < static_cast<int>(lay.interval_in.size())) {
      const Vec3 q = rotate_x(k.position(p.x[j]), p.s);
      return t.s * spin(q) + t.x[j] * rotate_x(k.derivative(p.x[j]), p.s);
    }
    return t.y[slot(v, lay.free_in)];
  };
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  double weight = 1;
  FaceFormValue out;
  out.scale = 1;
  for (int e = 0; e < n / 2; ++e) {
    const Edge& ed = lay.internal[e];
    Vec3 u;
    std::vector<Vec3> du(n);
    if (ed.from == ed.to) {
      const int j = slot(ed.from, lay.interval_in);
      const Vec3 d1 = rotate_x(k.derivative(p.x[j]), p.s);
      const Vec3 d2 = rotate_x(k.second_derivative(p.x[j]), p.s);
      const double len = norm(d1);
      u = (1.0 / len) * d1;
      for (int c = 0; c < n; ++c) du[c] = xi[c].s * spin(u) + (xi[c].x[j] / len) * (d2 - dot(u, d2) * u);
    } else {
      const Vec3 d = position(ed.to) - position(ed.from);
      const double r = norm(d);
      if (!(r > kMargin)) throw IntegrationError("coincident edge endpoints");
      u = (1.0 / r) * d;
      for (int c = 0; c < n; ++c) {
        const Vec3 dd = velocity(ed.to, xi[c]) - velocity(ed.from, xi[c]);
        du[c] = (1.0 / r) * (dd - dot(u, dd) * u);
      }
    }
    const double rho = vol.density(u);
    weight *= rho;
    const auto [fa, fb] = frame(u);
    double na = 0, nb = 0;
    for (int c = 0; c < n; ++c) {
      const double a = dot(fa, du[c]);
      const double b = dot(fb, du[c]);
      m[static_cast<std::size_t>(2 * e) * n + c] = a;
      m[static_cast<std::size_t>(2 * e + 1) * n + c] = b;
      na += a * a;
      nb += b * b;
    }
    out.scale *= std::sqrt(na * nb);
    out.per_edge.push_back(rho * (dot(fa, du[0]) * dot(fb, du[1]) - dot(fa, du[1]) * dot(fb, du[0])));
  }
  out.scale *= weight;
  if (weight != 0) out.value = weight * determinant(m, n);
  return out;
}

FacePoint random_face_point(const FaceLayout& lay, std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N(0.0, 1.0);
  FacePoint p;
  p.s = 2 * kPi * U(rng);
  const double base = -1.2 + 2.4 * U(rng);
  p.x.resize(lay.interval_in.size());
  for (std::size_t j = 0; j < p.x.size(); ++j) p.x[j] = base + spread * static_cast<double>(j) * (0.5 + U(rng));
  p.y.resize(lay.free_in.size());
  const Vec3 anchor{base, 0.3 * N(rng), 0.3 * N(rng)};
  for (Vec3& y : p.y) y = anchor + spread * Vec3{N(rng), N(rng), N(rng)};
  return p;
}

std::vector<FaceTangent> random_tangents(const FaceLayout& lay, std::mt19937_64& rng, int count) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<FaceTangent> out(count);
  for (FaceTangent& t : out) {
    t.s = N(rng);
    t.x.resize(lay.interval_in.size());
    for (double& x : t.x) x = N(rng);
    t.y.resize(lay.free_in.size());
    for (Vec3& y : t.y) y = Vec3{N(rng), N(rng), N(rng)};
  }
  return out;
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0 ? std::abs(a - b) / scale : 0.0;
}

}  // namespace

WitnessReport face_symmetry_witness(const ParametricLongKnot& k, const FaceSpec& face, const SphereVolumeForm& vol,
                                    int trials, std::uint64_t seed) {
  const FaceVerdict verdict = classify_face(face);
  if (verdict.status != FaceStatus::Vanishes) {
    throw FaceError("face " + subset_string(face.subset, face.at_infinity) + " is " + to_string(verdict.status) +
                    ", not a vanishing face");
  }
  const Graph& g = face.parent;
  const FaceLayout lay = layout_of(face);
  const int t = static_cast<int>(lay.free_in.size());

  WitnessReport rep;
  rep.trials = trials;
  std::mt19937_64 rng(seed);
  constexpr double kSpread = 1e-3;  // near-collision scale

  // χ reflects the free vertices of A through the collision point. Every
  // chord flips its Gauss image, the fiber orientation changes by (-1)^{3t};
  // the pushforward cancels when the product is -1. The centre must stay
  // fixed, so A has at most one interval vertex.
  const bool reflect = t > 0 && lay.interval_in.size() <= 1 && (lay.chords + 3 * t) % 2 == 1;
  if (verdict.rule == FaceRule::LowValence) {
    if (!reflect) throw FaceError("no involution witness for face " + subset_string(face.subset));
    rep.rule = FaceRule::LowValence;
    rep.expected_sign = lay.chords % 2 ? -1.0 : 1.0;
    rep.description = "point reflection of the free vertices of " + subset_string(face.subset) +
                      " through the collision point";
    const int n = 2 * static_cast<int>(lay.internal.size());
    for (int trial = 0; trial < trials; ++trial) {
      const FacePoint p = random_face_point(lay, rng, kSpread);
      const std::vector<FaceTangent> xi = random_tangents(lay, rng, n);
      // Centre and its velocity along each tangent vector.
      Vec3 centre{};
      auto centre_velocity = [&](const FaceTangent& v) {
        if (!lay.interval_in.empty()) {
          return v.s * spin(rotate_x(k.position(p.x[0]), p.s)) + v.x[0] * rotate_x(k.derivative(p.x[0]), p.s);
        }
        Vec3 c{};
        for (const Vec3& y : v.y) c += y;
        return (1.0 / t) * c;
      };
      if (!lay.interval_in.empty()) {
        centre = rotate_x(k.position(p.x[0]), p.s);
      } else {
        for (const Vec3& y : p.y) centre += y;
        centre = (1.0 / t) * centre;
      }
      FacePoint image = p;
      for (Vec3& y : image.y) y = 2.0 * centre - y;
      std::vector<FaceTangent> pushed = xi;
      for (FaceTangent& v : pushed) {
        const Vec3 dc = centre_velocity(v);
        for (Vec3& y : v.y) y = 2.0 * dc - y;
      }
      FaceFormValue a, b;
      try {
        a = face_form(k, lay, p, xi, vol);
        b = face_form(k, lay, image, pushed, vol);
      } catch (const IntegrationError&) {
        continue;
      }
      const double scale = std::max(a.scale, b.scale);
      if (!(scale > 0)) continue;
      ++rep.used;
      // The wedge can vanish identically (a triangle of chords has coplanar
      // Gauss images), so it is measured against its Hadamard scale; each
      // edge factor is compared on its own.
      rep.max_violation = std::max(rep.max_violation, std::abs(b.value - rep.expected_sign * a.value) / scale);
      rep.max_form_ratio = std::max(rep.max_form_ratio, std::abs(a.value) / scale);
      for (std::size_t e = 0; e < a.per_edge.size(); ++e) {
        const double sign = lay.internal[e].from == lay.internal[e].to ? 1.0 : -1.0;
        rep.max_violation = std::max(rep.max_violation, relative_gap(b.per_edge[e], sign * a.per_edge[e]));
      }
    }
    return rep;
  }

  if (verdict.rule == FaceRule::Translation) {
    std::vector<int> sliding;
    for (const auto& c : lay.components) {
      if (std::all_of(c.begin(), c.end(), [&](int v) { return g.is_free(v); })) {
        sliding = c;
        break;
      }
    }
    if (sliding.empty()) throw FaceError("no free component to translate in " + subset_string(face.subset));
    rep.rule = FaceRule::Translation;
    rep.expected_sign = 1;
    rep.description = "translation of " + subset_string(sliding) + " inside " + subset_string(face.subset);
    const int n = 2 * static_cast<int>(lay.internal.size());
    std::normal_distribution<double> N(0.0, 1.0);
    for (int trial = 0; trial < trials; ++trial) {
      const FacePoint p = random_face_point(lay, rng, kSpread);
      const std::vector<FaceTangent> xi = random_tangents(lay, rng, n);
      FaceFormValue a;
      try {
        a = face_form(k, lay, p, xi, vol);
      } catch (const IntegrationError&) {
        continue;
      }
      if (!(a.scale > 0)) continue;
      ++rep.used;
      rep.max_form_ratio = std::max(rep.max_form_ratio, std::abs(a.value) / a.scale);
      for (int step = 0; step < 4; ++step) {
        FacePoint moved = p;
        const Vec3 shift = kSpread * Vec3{N(rng), N(rng), N(rng)};
        for (int v : sliding) {
          const auto j = std::find(lay.free_in.begin(), lay.free_in.end(), v) - lay.free_in.begin();
          moved.y[j] += shift;
        }
        try {
          const FaceFormValue b = face_form(k, lay, moved, xi, vol);
          rep.max_violation = std::max(rep.max_violation, std::abs(b.value - a.value) / std::max(a.scale, b.scale));
        } catch (const IntegrationError&) {
        }
      }
    }
    return rep;
  }

  if (verdict.rule == FaceRule::Codimension) {
    // On the face the interval vertices of A sit on the tangent line at the
    // collision point, so the spokes of the free vertex span at most a plane.
    if (t != 1) throw FaceError("codimension witness needs exactly one free vertex");
    const int f = lay.free_in.front();
    std::vector<int> ends;
    for (const Edge& e : lay.internal) {
      if (e.from == f) ends.push_back(e.to);
      if (e.to == f) ends.push_back(e.from);
    }
    if (ends.size() < 3) throw FaceError("codimension witness needs three edges at the free vertex");
    rep.rule = FaceRule::Codimension;
    rep.expected_sign = 0;
    rep.description = "triple product of the spokes at vertex " + std::to_string(f) + " on the face";
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int trial = 0; trial < trials; ++trial) {
      const double s = 2 * kPi * U(rng);
      const double x = -1.2 + 2.4 * U(rng);
      // Blow-up coordinates centred at the collision point.
      const Vec3 v = normalized(rotate_x(k.derivative(x), s));
      const Vec3 y = Vec3{N(rng), N(rng), N(rng)};
      std::vector<Vec3> spokes;
      for (std::size_t j = 0; j < 3; ++j) spokes.push_back(normalized(y - N(rng) * v));
      ++rep.used;
      rep.max_violation =
          std::max(rep.max_violation, std::abs(dot(spokes[0], cross(spokes[1], spokes[2]))));
    }
    return rep;
  }
  throw FaceError("rule " + to_string(verdict.rule) + " has no geometric witness");
}

}  // namespace kcsi
