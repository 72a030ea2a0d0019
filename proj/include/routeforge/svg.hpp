#pragma once

#include <string>

#include "routeforge/instance.hpp"
#include "routeforge/solution.hpp"

namespace routeforge {

// Renders a solved plan as a standalone SVG: one polyline per route with a
// distinct stroke per day, one marker per city (depots visually distinct),
// and a total-cost label at two decimals. Coordinates are mapped into an
// 800x800 viewBox with a 5% margin, y up.
std::string render_svg(const CandidateSolution& solution, const ProblemInstance& instance);

}  // namespace routeforge
