#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "kcsi/diagram.hpp"
#include "kcsi/knot.hpp"

namespace kcsi {

class KnotParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr const char* kKnotFileHeader = "kcsi-knot 1";

/// A knot given as a curve (diagram by projection) or as a Gauss code.
struct KnotInput {
  std::string name;
  std::optional<ParametricLongKnot> curve;
  LongKnotDiagram diagram;
};

/// Text format, first line `kcsi-knot 1`, then `key: value` lines:
///   points: [[x,y,z],...]   (spline control points, equally spaced)
///   height: 0.05            (optional)
///   gauss: o1+ u2+ o3+ u1+ o2+ u3+
/// Exactly one of points/gauss. `#` starts a comment line.
KnotInput parse_knot_text(std::string_view text, const std::string& name = "input");

/// A standard knot name or a path to a knot file.
KnotInput load_knot(const std::string& name_or_path, double height = 0.05);

std::string knot_to_text(const ParametricLongKnot& k);
std::string diagram_to_text(const LongKnotDiagram& d);

}  // namespace kcsi
