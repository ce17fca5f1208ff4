#pragma once

#include <string>
#include <vector>

#include "rl/csv.hpp"

namespace rl {

// Self-contained SVG line chart: per series a semi-transparent raw polyline
// plus an opaque moving-average polyline, axes labeled Episode/Reward, and
// one legend entry per series.
std::string render_curves_svg(const std::vector<CurveSeries>& series);

}  // namespace rl
