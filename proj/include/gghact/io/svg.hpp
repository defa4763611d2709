#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace gghact::io {

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool log_axes = false;  // base-10 log on both axes
};

namespace svg_detail {

inline std::string f(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
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

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

/// Roughly five round-number ticks covering [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) ticks.push_back(t);
  return ticks;
}

}  // namespace svg_detail

/// Renders panels side by side as a standalone SVG 1.1 document with one polyline per series.
inline std::string render_svg(const std::vector<Panel>& panels, double panel_w = 460.0,
                              double panel_h = 340.0) {
  using namespace svg_detail;
  const double width = panel_w * static_cast<double>(panels.size());
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + f(width) +
         "\" height=\"" + f(panel_h) + "\" viewBox=\"0 0 " + f(width) + " " + f(panel_h) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + f(width) + "\" height=\"" + f(panel_h) +
         "\" fill=\"white\"/>\n";

  const double ml = 70, mr = 20, mt = 36, mb = 50;
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& panel = panels[p];
    const double ox = panel_w * static_cast<double>(p);
    const double x0 = ox + ml, x1 = ox + panel_w - mr;
    const double y0 = panel_h - mb, y1 = mt;
    auto tx = [&](double v) { return panel.log_axes ? std::log10(v) : v; };

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : panel.series) {
      for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
        if (!std::isfinite(tx(s.xs[i])) || !std::isfinite(tx(s.ys[i]))) continue;
        xmin = std::min(xmin, tx(s.xs[i]));
        xmax = std::max(xmax, tx(s.xs[i]));
        ymin = std::min(ymin, tx(s.ys[i]));
        ymax = std::max(ymax, tx(s.ys[i]));
      }
    }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto px = [&](double v) { return x0 + (tx(v) - xmin) / (xmax - xmin) * (x1 - x0); };
    auto py = [&](double v) { return y0 - (tx(v) - ymin) / (ymax - ymin) * (y0 - y1); };

    out += "<g>\n";
    out += "<text x=\"" + f(ox + panel_w / 2) + "\" y=\"20\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">" + escape(panel.title) + "</text>\n";
    out += "<line x1=\"" + f(x0) + "\" y1=\"" + f(y0) + "\" x2=\"" + f(x1) + "\" y2=\"" + f(y0) +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + f(x0) + "\" y1=\"" + f(y0) + "\" x2=\"" + f(x0) + "\" y2=\"" + f(y1) +
           "\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(xmin, xmax)) {
      const double x = x0 + (t - xmin) / (xmax - xmin) * (x1 - x0);
      const double label = panel.log_axes ? std::pow(10.0, t) : t;
      out += "<line x1=\"" + f(x) + "\" y1=\"" + f(y0) + "\" x2=\"" + f(x) + "\" y2=\"" +
             f(y0 + 5) + "\" stroke=\"black\"/>\n";
      out += "<text x=\"" + f(x) + "\" y=\"" + f(y0 + 18) + "\" text-anchor=\"middle\" "
             "font-family=\"sans-serif\" font-size=\"11\">" + tick_label(label) + "</text>\n";
    }
    for (double t : nice_ticks(ymin, ymax)) {
      const double y = y0 - (t - ymin) / (ymax - ymin) * (y0 - y1);
      const double label = panel.log_axes ? std::pow(10.0, t) : t;
      out += "<line x1=\"" + f(x0 - 5) + "\" y1=\"" + f(y) + "\" x2=\"" + f(x0) + "\" y2=\"" +
             f(y) + "\" stroke=\"black\"/>\n";
      out += "<text x=\"" + f(x0 - 8) + "\" y=\"" + f(y + 4) + "\" text-anchor=\"end\" "
             "font-family=\"sans-serif\" font-size=\"11\">" + tick_label(label) + "</text>\n";
    }
    out += "<text x=\"" + f((x0 + x1) / 2) + "\" y=\"" + f(panel_h - 12) + "\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"12\">" + escape(panel.x_label) + "</text>\n";
    out += "<text x=\"" + f(ox + 16) + "\" y=\"" + f((y0 + y1) / 2) + "\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 " + f(ox + 16) + " " +
           f((y0 + y1) / 2) + ")\">" + escape(panel.y_label) + "</text>\n";

    double ly = y1 + 8;
    for (const auto& s : panel.series) {
      std::string pts;
      for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
        if (!std::isfinite(tx(s.xs[i])) || !std::isfinite(tx(s.ys[i]))) continue;
        if (!pts.empty()) pts += ' ';
        pts += f(px(s.xs[i])) + "," + f(py(s.ys[i]));
      }
      out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"2\"" +
             (s.dashed ? std::string(" stroke-dasharray=\"6 4\"") : std::string()) +
             " points=\"" + pts + "\"/>\n";
      out += "<line x1=\"" + f(x1 - 150) + "\" y1=\"" + f(ly) + "\" x2=\"" + f(x1 - 128) +
             "\" y2=\"" + f(ly) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
      out += "<text x=\"" + f(x1 - 122) + "\" y=\"" + f(ly + 4) + "\" font-family=\"sans-serif\" "
             "font-size=\"11\">" + escape(s.name) + "</text>\n";
      ly += 16;
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gghact::io
