#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kcsi/knot.hpp"

namespace kcsi {

/// Names accepted by standard_knot.
const std::vector<std::string>& standard_knot_names();

/// unknot, unknot_descending (trefoil shadow, first visits over),
/// trefoil_plus, trefoil_minus, figure8, granny (trefoil_plus
/// twice). Built flat in the xy-plane with over-arcs lifted to `height`.
/// Throws KnotError on an unknown name.
ParametricLongKnot standard_knot(std::string_view name, double height = 0.05);

}  // namespace kcsi
