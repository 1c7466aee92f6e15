#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kcsi/chain.hpp"
#include "kcsi/faces.hpp"
#include "kcsi/knot.hpp"

namespace kcsi {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A 2-form on S² of total mass 1, given by its density against area.
/// The density is even (ρ(-u) = ρ(u)), so the antipodal map pulls the
/// form back to minus itself.
class SphereVolumeForm {
 public:
  enum class Mode { Uniform, PolarBump };

  static SphereVolumeForm uniform();
  /// Supported within angular distance `width` of (0,0,±1).
  static SphereVolumeForm polar_bump(double width);
  /// `uniform` or `bump:<width>`.
  static SphereVolumeForm parse(std::string_view text);

  Mode mode() const { return mode_; }
  double width() const { return width_; }
  double density(const Vec3& u) const;
  /// Total mass by quadrature in the polar angle.
  double total_mass(int intervals = 20000) const;
  std::string to_string() const;

 private:
  Mode mode_ = Mode::Uniform;
  double width_ = 0;
  double cos_width_ = -1;
  double norm_ = 1;
};

/// A point of the fiber over the Gramain circle: rotation angle s, line
/// parameters x_1 < ... < x_s of the interval vertices, and absolute
/// positions of the free vertices.
struct ConfigurationPoint {
  double s = 0;
  std::vector<double> x;
  std::vector<Vec3> y;
};

/// Position of vertex v (1-based) of a graph with `num_i` interval vertices.
Vec3 vertex_position(const ParametricLongKnot& k, const ConfigurationPoint& cp, int num_i, int v);

/// Unit vector of an edge: target minus source, or the unit tangent for a
/// loop. Throws IntegrationError on coincident endpoints.
Vec3 gauss_map(const ParametricLongKnot& k, const ConfigurationPoint& cp, int num_i, const Edge& e);

/// Density of the pulled-back top form against ds dx_1..dx_s d³y_1..d³y_t
/// for a degree-1 graph: det of the 2e×2e matrix of sphere-coordinate
/// derivatives times the product of volume densities. Throws
/// IntegrationError on a wrong degree, a shape mismatch or a collision.
double integrand(const ParametricLongKnot& k, const Graph& g, const ConfigurationPoint& cp,
                 const SphereVolumeForm& vol);

struct SamplerConfig {
  std::uint64_t seed = 1;
  std::int64_t samples = 1'000'000;
  int strata = 16;
  int chunks = 64;
  int threads = 0;          // 0: hardware concurrency
  double box_scale = 0.6;   // Cauchy scale of line parameters, radial scale of free points
  double pilot_fraction = 0.05;
};

struct GraphEstimate {
  Graph graph;
  Rational coefficient;
  double value = 0;   // integral of this graph alone
  double std_error = 0;
  std::int64_t samples = 0;
  std::int64_t rejected = 0;
};

struct MCEstimate {
  double value = 0;
  double std_error = 0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::int64_t rejected = 0;
  std::int64_t evaluations = 0;
  double rejection_rate = 0;
  std::vector<GraphEstimate> terms;
};

/// Orientation constant: the fiber orientation (s, x_1..x_s, y_1..y_t)
/// times this sign makes the positive trefoil pair to +1.
constexpr int kPairingSign = 1;

/// Some three edges form a cycle. Their Gauss images are then coplanar, so
/// the pulled-back form vanishes identically.
bool has_triangle(const Graph& g);

/// Integral of one degree-1 graph over the Gramain cycle.
GraphEstimate integrate_graph(const ParametricLongKnot& k, const Graph& g, const SphereVolumeForm& vol,
                              const SamplerConfig& cfg);

/// <I(c), G_f> by importance-sampled Monte Carlo. Samples are split over
/// the terms in proportion to |coefficient| times a pilot spread estimate;
/// terms with a triangle are exactly zero and are not sampled.
/// Deterministic for a fixed (seed, samples, chunks).
MCEstimate pair_gramain(const ParametricLongKnot& k, const GraphChain& c, const SphereVolumeForm& vol,
                        const SamplerConfig& cfg);

struct WitnessReport {
  FaceRule rule = FaceRule::None;
  int trials = 0;
  int used = 0;              // trials with a usable (nonzero) integrand
  double max_violation = 0;  // relative to the Hadamard scale of the face form
  double max_form_ratio = 0; // |form| / Hadamard scale; ~1e-16 means the form vanishes identically
  double expected_sign = 0;  // involution: form(χ cp) = sign * form(cp)
  std::string description;
};

/// Numerical check of the geometric vanishing argument for a face, on the
/// face form ω̂_A (wedge of φ_e^* vol over the edges inside A) evaluated on
/// random tangent vectors at random face points: the point-reflection
/// involution χ (LowValence), translation invariance (Translation) or
/// coplanar Gauss images (Codimension). For the involution each edge factor
/// is also checked for φ_e^* vol ∘ χ = -φ_e^* vol. Throws FaceError for
/// faces without such a witness.
WitnessReport face_symmetry_witness(const ParametricLongKnot& k, const FaceSpec& face, const SphereVolumeForm& vol,
                                    int trials, std::uint64_t seed = 7);

}  // namespace kcsi
