#include "dcmm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "dcmm/errors.hpp"

namespace dcmm {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void write_scatter_svg(const std::filesystem::path& path,
                       const std::vector<std::pair<double, double>>& points,
                       double slope, double intercept,
                       const std::string& x_label, const std::string& y_label,
                       const std::string& title) {
  if (points.empty()) {
    throw DcmmError(ErrorCode::kInvalidArgument, "no points to plot");
  }
  const double width = 640, height = 480;
  const double ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = points[0].first, xmax = xmin;
  double ymin = points[0].second, ymax = ymin;
  for (const auto& [x, y] : points) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  // include the fit line within the y range
  ymin = std::min({ymin, slope * xmin + intercept, slope * xmax + intercept});
  ymax = std::max({ymax, slope * xmin + intercept, slope * xmax + intercept});
  double xpad = (xmax - xmin) * 0.08 + 1e-9;
  double ypad = (ymax - ymin) * 0.08 + 1e-9;
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;
  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  auto py = [&](double y) {
    return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
  };

  std::ofstream out(path);
  if (!out) {
    throw DcmmError(ErrorCode::kIoError, "cannot write " + path.string());
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  // axes
  out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(height - mb)
      << "\" x2=\"" << fmt(width - mr) << "\" y2=\"" << fmt(height - mb)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\""
      << fmt(ml) << "\" y2=\"" << fmt(height - mb) << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << fmt((ml + width - mr) / 2) << "\" y=\""
      << fmt(height - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << fmt((mt + height - mb) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << fmt((mt + height - mb) / 2) << ")\">"
      << y_label << "</text>\n";
  // fit line
  out << "<line x1=\"" << fmt(px(xmin)) << "\" y1=\""
      << fmt(py(slope * xmin + intercept)) << "\" x2=\"" << fmt(px(xmax))
      << "\" y2=\"" << fmt(py(slope * xmax + intercept))
      << "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
  for (const auto& [x, y] : points) {
    out << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
        << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace dcmm
