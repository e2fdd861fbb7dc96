#pragma once

#include "gpeps/analysis.hpp"

#include <string>
#include <vector>

namespace gpeps {

struct PlotSeries {
    std::string label;
    Series points;
    bool line = true; // polyline when true, scatter markers otherwise
};

/// Self-contained static SVG; byte-deterministic for identical input.
std::string render_svg(const std::vector<PlotSeries>& series, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel);

} // namespace gpeps
