// plot.hpp - deterministic standalone SVG emission for result tables.
#pragma once

#include <string>
#include <vector>

#include "evobench/csv.hpp"

namespace evobench::plot {

enum class PlotKind { line, scatter, box };

PlotKind plot_kind_from_string(const std::string& s);

struct PlotSpec {
    PlotKind kind = PlotKind::line;
    std::string x_column;                // ignored for box plots
    std::vector<std::string> y_columns;  // one series per column
    bool log_x = false;
    bool log_y = false;
    std::string title;
    std::string x_label;
    std::string y_label;
};

// Renders the table to a self-contained SVG document. Throws
// std::invalid_argument with the offending column/row named on missing
// columns, non-numeric cells, or non-positive values on a log axis.
std::string emit_plot(const csv::Table& table, const PlotSpec& spec);

} // namespace evobench::plot
