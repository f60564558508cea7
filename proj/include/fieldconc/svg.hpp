#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <ostream>
#include <string>
#include <vector>

#include "fieldconc/field_io.hpp"

namespace fieldconc {

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

/// Self-contained SVG line/marker chart. With log_y, nonpositive values are
/// drawn on the floor line as open markers. The generation timestamp comment
/// is the only non-deterministic byte and can be suppressed.
inline void write_svg_chart(std::ostream& os, const std::string& title,
                            const std::string& x_label, const std::string& y_label,
                            const std::vector<PlotSeries>& series, bool log_y,
                            bool with_timestamp) {
  const double width = 720, height = 440;
  const double left = 70, right = 20, top = 40, bottom = 50;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool have_x = false, have_y = false;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!have_x) {
        xmin = xmax = x;
        have_x = true;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      if (!log_y || y > 0) {
        const double yv = log_y ? std::log10(y) : y;
        if (!have_y) {
          ymin = ymax = yv;
          have_y = true;
        }
        ymin = std::min(ymin, yv);
        ymax = std::max(ymax, yv);
      }
    }
  if (!have_y) {
    ymin = -1;
    ymax = 0;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double floor_y = ymin - 0.08 * (ymax - ymin);

  const auto px = [&](double x) {
    return left + (x - xmin) / (xmax - xmin) * (width - left - right);
  };
  const auto py = [&](double yv) {
    return height - bottom - (yv - floor_y) / (ymax - floor_y) * (height - top - bottom);
  };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  if (with_timestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    os << "<!-- generated " << buf << " -->\n";
  }
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
     << "font-family=\"sans-serif\">" << title << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
     << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
     << height - bottom << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << x_label
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << (top + height - bottom) / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
     << "transform=\"rotate(-90 16 " << (top + height - bottom) / 2 << ")\">"
     << (log_y ? "log10 " + y_label : y_label) << "</text>\n";

  // y tick labels at min/mid/max
  for (double f : {0.0, 0.5, 1.0}) {
    const double yv = ymin + f * (ymax - ymin);
    os << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">"
       << format_double(std::round(yv * 1000) / 1000) << "</text>\n";
  }

  double legend_y = top + 4;
  for (const auto& s : series) {
    std::string polyline;
    for (const auto& [x, y] : s.points) {
      const bool off_scale = log_y && !(y > 0);
      const double yv = off_scale ? floor_y : (log_y ? std::log10(y) : y);
      if (!off_scale) {
        polyline += format_double(px(x)) + "," + format_double(py(yv)) + " ";
        os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(yv)
           << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
      } else {
        os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(yv) << "\" r=\"3\" fill=\"none\" "
           << "stroke=\"" << s.color << "\"/>\n";
      }
    }
    if (!polyline.empty())
      os << "<polyline points=\"" << polyline << "\" fill=\"none\" stroke=\"" << s.color
         << "\" stroke-width=\"1.5\"/>\n";
    os << "<rect x=\"" << width - right - 150 << "\" y=\"" << legend_y << "\" width=\"10\" "
       << "height=\"10\" fill=\"" << s.color << "\"/>\n";
    os << "<text x=\"" << width - right - 135 << "\" y=\"" << legend_y + 9
       << "\" font-size=\"11\" font-family=\"sans-serif\">" << s.label << "</text>\n";
    legend_y += 16;
  }
  os << "</svg>\n";
}

}  // namespace fieldconc
