#pragma once

#include <string>
#include <vector>

#include "opiexit/csv.hpp"

namespace opiexit::cli {

// Standalone SVG line plot of the named y columns against the x column: one
// polyline per y column, axes, tick labels, legend. Output bytes are a pure
// function of the input table and column selection.
std::string render_svg_lineplot(const CsvTable& data, const std::string& x_col,
                                const std::vector<std::string>& y_cols);

void emit_svg_lineplot(const std::string& csv_path, const std::string& x_col,
                       const std::vector<std::string>& y_cols,
                       const std::string& output_path);

}  // namespace opiexit::cli
