#include "rl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rl/format.hpp"

namespace rl {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 930.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 492.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  return format_double(std::round(v * 100.0) / 100.0);
}

std::string escape_text(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Scale {
  double x_min, x_max, y_min, y_max;
  double to_x(double v) const {
    return kLeft + (v - x_min) / (x_max - x_min) * (kRight - kLeft);
  }
  double to_y(double v) const {
    return kBottom - (v - y_min) / (y_max - y_min) * (kBottom - kTop);
  }
};

std::string polyline(const std::vector<double>& xs,
                     const std::vector<double>& ys, const std::string& color,
                     double opacity, double width, const Scale& scale) {
  std::string points;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) points += ' ';
    points += num(scale.to_x(xs[i])) + ',' + num(scale.to_y(ys[i]));
  }
  return "  <polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
         num(width) + "\" stroke-opacity=\"" + num(opacity) + "\" points=\"" +
         points + "\"/>\n";
}

}  // namespace

std::string render_curves_svg(const std::vector<CurveSeries>& series) {
  if (series.empty()) throw std::invalid_argument("no series to plot");

  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const CurveSeries& s : series) {
    if (s.episodes.empty()) throw std::invalid_argument("empty series");
    x_min = std::min(x_min, *std::min_element(s.episodes.begin(), s.episodes.end()));
    x_max = std::max(x_max, *std::max_element(s.episodes.begin(), s.episodes.end()));
    for (const std::vector<double>* v : {&s.rewards, &s.moving_avg}) {
      y_min = std::min(y_min, *std::min_element(v->begin(), v->end()));
      y_max = std::max(y_max, *std::max_element(v->begin(), v->end()));
    }
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  const double pad = (y_max - y_min) * 0.05;
  y_min -= pad > 0.0 ? pad : 1.0;
  y_max += pad > 0.0 ? pad : 1.0;
  const Scale scale{x_min, x_max, y_min, y_max};

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
         "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) +
         " " + num(kHeight) + "\">\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" fill=\"white\"/>\n";

  // Grid, ticks, tick labels.
  for (int i = 0; i <= 5; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 5.0;
    const double fy = y_min + (y_max - y_min) * i / 5.0;
    const double px = scale.to_x(fx);
    const double py = scale.to_y(fy);
    svg += "  <line x1=\"" + num(px) + "\" y1=\"" + num(kTop) + "\" x2=\"" +
           num(px) + "\" y2=\"" + num(kBottom) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "  <line x1=\"" + num(kLeft) + "\" y1=\"" + num(py) + "\" x2=\"" +
           num(kRight) + "\" y2=\"" + num(py) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "  <text x=\"" + num(px) + "\" y=\"" + num(kBottom + 20.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\" "
           "text-anchor=\"middle\" fill=\"#333333\">" +
           num(fx) + "</text>\n";
    svg += "  <text x=\"" + num(kLeft - 8.0) + "\" y=\"" + num(py + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\" "
           "text-anchor=\"end\" fill=\"#333333\">" +
           num(fy) + "</text>\n";
  }
  svg += "  <rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
         num(kRight - kLeft) + "\" height=\"" + num(kBottom - kTop) +
         "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    svg += polyline(series[i].episodes, series[i].rewards, color, 0.25, 1.0,
                    scale);
    svg += polyline(series[i].episodes, series[i].moving_avg, color, 1.0, 2.0,
                    scale);
  }

  // Axis labels.
  svg += "  <text x=\"" + num((kLeft + kRight) / 2.0) + "\" y=\"" +
         num(kHeight - 8.0) +
         "\" font-family=\"sans-serif\" font-size=\"15\" "
         "text-anchor=\"middle\" fill=\"#111111\">Episode</text>\n";
  svg += "  <text x=\"18\" y=\"" + num((kTop + kBottom) / 2.0) +
         "\" font-family=\"sans-serif\" font-size=\"15\" "
         "text-anchor=\"middle\" fill=\"#111111\" transform=\"rotate(-90 18 " +
         num((kTop + kBottom) / 2.0) + ")\">Reward</text>\n";

  // Legend, top-left inside the plot area.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    const double ly = kTop + 16.0 + 20.0 * static_cast<double>(i);
    svg += "  <line x1=\"" + num(kLeft + 12.0) + "\" y1=\"" + num(ly) +
           "\" x2=\"" + num(kLeft + 40.0) + "\" y2=\"" + num(ly) +
           "\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\"/>\n";
    svg += "  <text x=\"" + num(kLeft + 46.0) + "\" y=\"" + num(ly + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#111111\">" +
           escape_text(series[i].label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace rl
