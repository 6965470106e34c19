#pragma once

#include <string>

#include "dbmid/csv.hpp"
#include "dbmid/image.hpp"

namespace dbmid {

struct PlotOptions {
    int width = 720;
    int height = 480;
    std::string title;
};

// Line chart from a harness sweep table: x is the first column, y the first
// *_mean (or median_s) column, one series per distinct method/direction
// combination. Returns the rendered canvas; the path variants also save PNG.
Image render_line_chart(const Table& table, const PlotOptions& options = {});

// Heatmap grid from the mixed-blur table: one panel per surface value, cell
// color from the shared value range.
Image render_heatmap(const Table& table, const PlotOptions& options = {});

void plot_csv(const std::string& csv_path, const std::string& kind,
              const std::string& out_path, const PlotOptions& options = {});

}  // namespace dbmid
