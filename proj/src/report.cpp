#include "maze/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace maze {

namespace {
std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}
}  // namespace

std::string format_cell(double mean, double stdev) {
  return fmt("%.1f", mean) + " ± " + fmt("%.1f", stdev);
}

void emit_results_csv(const EvalMatrix& matrix,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  out << "layout,partner,method,seed,mean,std\n";
  for (const auto& row : matrix.rows) {
    out << row.layout << ',' << row.partner << ',' << row.method << ','
        << row.seed << ',' << fmt("%.10g", row.mean) << ','
        << fmt("%.10g", row.stdev) << '\n';
  }
}

std::string render_table(const EvalMatrix& matrix) {
  std::ostringstream out;
  size_t label_width = 18;
  for (const auto& l : matrix.layouts)
    for (const auto& p : matrix.partners)
      label_width = std::max(label_width, l.size() + p.size() + 4);
  size_t col_width = 14;
  for (const auto& m : matrix.methods)
    col_width = std::max(col_width, m.size() + 2);

  auto pad = [](const std::string& s, size_t w) {
    return s + std::string(s.size() < w ? w - s.size() : 1, ' ');
  };

  out << pad("layout x partner", label_width);
  for (const auto& m : matrix.methods) out << pad(m, col_width);
  out << '\n';
  for (size_t li = 0; li < matrix.layouts.size(); ++li) {
    for (size_t pi = 0; pi < matrix.partners.size(); ++pi) {
      out << pad(matrix.layouts[li] + " x " + matrix.partners[pi], label_width);
      for (size_t mi = 0; mi < matrix.methods.size(); ++mi) {
        const EvalCell& c = matrix.cells[li][pi][mi];
        out << pad(format_cell(c.mean, c.stdev), col_width);
      }
      out << '\n';
    }
  }
  out << pad("average rank", label_width);
  for (double r : matrix.average_rank) out << pad(fmt("%.2f", r), col_width);
  out << '\n';
  return out.str();
}

CurveSeries curve_from_metrics(const std::string& name,
                               const std::vector<GenerationMetrics>& metrics) {
  CurveSeries s;
  s.name = name;
  for (const auto& m : metrics) {
    s.x.push_back(m.generation);
    s.y.push_back(m.train_sparse_mean);
  }
  return s;
}

void emit_curves_csv(const std::vector<CurveSeries>& series,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  out << "series,generation,mean_reward\n";
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      out << s.name << ',' << fmt("%.10g", s.x[i]) << ','
          << fmt("%.10g", s.y[i]) << '\n';
    }
  }
}

void emit_curves_svg(const std::vector<CurveSeries>& series,
                     const std::string& title,
                     const std::filesystem::path& path) {
  const int width = 640, height = 420;
  const int ml = 60, mr = 20, mt = 40, mb = 40;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!any) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        any = true;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  auto sx = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  auto sy = [&](double y) {
    return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
  };

  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  std::ofstream out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title
      << "</text>\n";
  // Axes.
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
      << width - mr << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << ml << "\" y=\"" << height - mb + 16
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt("%.4g", xmin)
      << "</text>\n";
  out << "<text x=\"" << width - mr << "\" y=\"" << height - mb + 16
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt("%.4g", xmax) << "</text>\n";
  out << "<text x=\"" << ml - 6 << "\" y=\"" << height - mb
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt("%.4g", ymin) << "</text>\n";
  out << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt("%.4g", ymax) << "</text>\n";

  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % (sizeof(colors) / sizeof(colors[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
      out << fmt("%.2f", sx(s.x[i])) << ',' << fmt("%.2f", sy(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << width - mr - 4 << "\" y=\"" << mt + 16 + 14 * k
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
        << "fill=\"" << color << "\">" << s.name << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace maze
