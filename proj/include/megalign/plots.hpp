#ifndef MEGALIGN_PLOTS_HPP
#define MEGALIGN_PLOTS_HPP

// Minimal SVG output: sensor x window heatmaps and labelled bar charts.

#include "megalign/common.hpp"

namespace megalign {

namespace detail {
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape_xml(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}
} // namespace detail

/// Blue (-1) through white (0) to red (+1); values outside [-1, 1] saturate.
inline std::string diverging_color(double v) {
  v = std::clamp(std::isfinite(v) ? v : 0.0, -1.0, 1.0);
  int r = 255, g = 255, b = 255;
  if (v > 0) {
    g = b = static_cast<int>(std::lround(255.0 * (1.0 - v)));
  } else if (v < 0) {
    r = g = static_cast<int>(std::lround(255.0 * (1.0 + v)));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

/// Rows are sensors, columns are windows. `scale` maps values onto [-1, 1].
inline std::string heatmap_svg(const Matrix &values, const std::string &title, double scale = 1.0,
                               const std::string &header_comment = "") {
  const double cw = 24, ch = 3, left = 50, top = 30;
  const double w = left + cw * static_cast<double>(values.cols()) + 20;
  const double h = top + ch * static_cast<double>(values.rows()) + 30;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(w) + "\" height=\"" +
                    detail::num(h) + "\">\n";
  out += header_comment;
  out += "<text x=\"" + detail::num(left) + "\" y=\"18\" font-size=\"12\">" + detail::escape_xml(title) + "</text>\n";
  for (Eigen::Index s = 0; s < values.rows(); ++s)
    for (Eigen::Index c = 0; c < values.cols(); ++c)
      out += "<rect x=\"" + detail::num(left + cw * static_cast<double>(c)) + "\" y=\"" +
             detail::num(top + ch * static_cast<double>(s)) + "\" width=\"" + detail::num(cw) + "\" height=\"" +
             detail::num(ch) + "\" fill=\"" + diverging_color(values(s, c) / scale) + "\"/>\n";
  for (Eigen::Index c = 0; c < values.cols(); ++c)
    out += "<text x=\"" + detail::num(left + cw * (static_cast<double>(c) + 0.3)) + "\" y=\"" +
           detail::num(h - 10) + "\" font-size=\"9\">w" + std::to_string(c) + "</text>\n";
  out += "<text x=\"4\" y=\"" + detail::num(top + 10) + "\" font-size=\"9\">sensor</text>\n";
  out += "</svg>\n";
  return out;
}

struct Bar {
  std::string label;
  double value = 0.0;
  double error = 0.0; // half-height of the error bar, 0 for none
};

/// Vertical bars on a [0, 1] axis with a dashed line at `reference` (e.g. chance).
inline std::string bar_chart_svg(const std::vector<Bar> &bars, const std::string &title, double reference = 0.5,
                                 const std::string &header_comment = "") {
  const double bw = 60, gap = 20, left = 40, top = 30, ph = 200;
  const double w = left + (bw + gap) * static_cast<double>(bars.size()) + gap;
  const double h = top + ph + 40;
  auto y_of = [&](double v) { return top + ph * (1.0 - std::clamp(v, 0.0, 1.0)); };
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(w) + "\" height=\"" +
                    detail::num(h) + "\">\n";
  out += header_comment;
  out += "<text x=\"" + detail::num(left) + "\" y=\"18\" font-size=\"12\">" + detail::escape_xml(title) + "</text>\n";
  out += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(top) + "\" x2=\"" + detail::num(left) +
         "\" y2=\"" + detail::num(top + ph) + "\" stroke=\"black\"/>\n";
  for (double t : {0.0, 0.5, 1.0})
    out += "<text x=\"4\" y=\"" + detail::num(y_of(t) + 4) + "\" font-size=\"9\">" + detail::num(t) + "</text>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double x = left + gap + (bw + gap) * static_cast<double>(i);
    const double y = y_of(bars[i].value);
    out += "<rect x=\"" + detail::num(x) + "\" y=\"" + detail::num(y) + "\" width=\"" + detail::num(bw) +
           "\" height=\"" + detail::num(top + ph - y) + "\" fill=\"#4c72b0\"/>\n";
    if (bars[i].error > 0) {
      const double xm = x + bw / 2;
      out += "<line x1=\"" + detail::num(xm) + "\" y1=\"" + detail::num(y_of(bars[i].value - bars[i].error)) +
             "\" x2=\"" + detail::num(xm) + "\" y2=\"" + detail::num(y_of(bars[i].value + bars[i].error)) +
             "\" stroke=\"black\"/>\n";
    }
    out += "<text x=\"" + detail::num(x) + "\" y=\"" + detail::num(top + ph + 14) + "\" font-size=\"10\">" +
           detail::escape_xml(bars[i].label) + "</text>\n";
    out += "<text x=\"" + detail::num(x) + "\" y=\"" + detail::num(y - 3) + "\" font-size=\"9\">" +
           detail::num(bars[i].value) + "</text>\n";
  }
  out += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(y_of(reference)) + "\" x2=\"" + detail::num(w) +
         "\" y2=\"" + detail::num(y_of(reference)) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  out += "</svg>\n";
  return out;
}

} // namespace megalign

#endif // MEGALIGN_PLOTS_HPP
