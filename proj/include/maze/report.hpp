#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "maze/bench.hpp"
#include "maze/coevo.hpp"

namespace maze {

// Results CSV: one row per layout x partner x method x seed, header always
// present (empty results give a header-only file).
void emit_results_csv(const EvalMatrix& matrix,
                      const std::filesystem::path& path);

// Plain-text summary table, "mean ± std" with one decimal, one block per
// layout plus the average-rank row.
std::string render_table(const EvalMatrix& matrix);

// Formats one cell the way the summary table does.
std::string format_cell(double mean, double stdev);

struct CurveSeries {
  std::string name;
  std::vector<double> x;  // generation index
  std::vector<double> y;  // mean reward
};

// Static SVG line chart, one polyline per series.
void emit_curves_svg(const std::vector<CurveSeries>& series,
                     const std::string& title,
                     const std::filesystem::path& path);

void emit_curves_csv(const std::vector<CurveSeries>& series,
                     const std::filesystem::path& path);

CurveSeries curve_from_metrics(const std::string& name,
                               const std::vector<GenerationMetrics>& metrics);

}  // namespace maze
