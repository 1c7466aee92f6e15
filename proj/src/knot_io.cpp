#include "kcsi/knot_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kcsi/standard_knots.hpp"

namespace kcsi {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

KnotInput parse_knot_text(std::string_view text, const std::string& name) {
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  std::optional<std::string> points, gauss;
  double height = 0.05;
  while (std::getline(in, line)) {
    std::string_view l = trim(line);
    if (l.empty() || l.front() == '#') continue;
    if (!header) {
      if (l != kKnotFileHeader) throw KnotParseError("knot file must start with '" + std::string(kKnotFileHeader) + "'");
      header = true;
      continue;
    }
    const auto colon = l.find(':');
    if (colon == std::string_view::npos) throw KnotParseError("expected 'key: value', got '" + std::string(l) + "'");
    const std::string key(trim(l.substr(0, colon)));
    const std::string value(trim(l.substr(colon + 1)));
    if (key == "points") {
      points = value;
    } else if (key == "gauss") {
      gauss = value;
    } else if (key == "height") {
      try {
        height = std::stod(value);
      } catch (const std::exception&) {
        throw KnotParseError("bad height '" + value + "'");
      }
    } else {
      throw KnotParseError("unknown key '" + key + "'");
    }
  }
  if (!header) throw KnotParseError("empty knot file");
  if (points.has_value() == gauss.has_value()) throw KnotParseError("knot file needs exactly one of points: or gauss:");
  KnotInput out;
  out.name = name;
  if (gauss) {
    try {
      out.diagram = LongKnotDiagram::parse(*gauss);
    } catch (const DiagramError& e) {
      throw KnotParseError(e.what());
    }
    return out;
  }
  std::vector<Vec3> pts;
  try {
    const auto j = nlohmann::json::parse(*points);
    for (const auto& p : j) {
      if (p.size() != 3) throw KnotParseError("each point needs three coordinates");
      pts.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw KnotParseError(std::string("bad points array: ") + e.what());
  }
  try {
    out.curve = ParametricLongKnot::from_points(std::move(pts), height);
    out.curve->validate();
    out.diagram = project_to_diagram(*out.curve);
  } catch (const std::exception& e) {
    throw KnotParseError(e.what());
  }
  return out;
}

KnotInput load_knot(const std::string& name_or_path, double height) {
  const auto& names = standard_knot_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
    KnotInput out;
    out.name = name_or_path;
    out.curve = standard_knot(name_or_path, height);
    out.diagram = project_to_diagram(*out.curve);
    return out;
  }
  std::ifstream f(name_or_path);
  if (!f) throw KnotParseError("'" + name_or_path + "' is neither a standard knot nor a readable file");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_knot_text(buf.str(), name_or_path);
}

std::string knot_to_text(const ParametricLongKnot& k) {
  nlohmann::json pts = nlohmann::json::array();
  for (const Vec3& p : k.points()) pts.push_back({p.x, p.y, p.z});
  std::ostringstream out;
  out << kKnotFileHeader << "\nheight: " << k.height() << "\npoints: " << pts.dump() << "\n";
  return out.str();
}

std::string diagram_to_text(const LongKnotDiagram& d) {
  return std::string(kKnotFileHeader) + "\ngauss: " + d.to_string() + "\n";
}

}  // namespace kcsi
