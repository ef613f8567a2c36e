#include "fods/experiments/svg.hpp"

#include "fods/types.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>

namespace fods::experiments {

namespace {

constexpr double kWidth = 960, kHeight = 480;
constexpr double kLeft = 70, kRight = 930, kTop = 24, kBottom = 430;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string coord(double v) { return fmt(v, "%.2f"); }
std::string tick_label(double v) { return fmt(v, "%.6g"); }

size_t column_index(const Table& t, const std::string& name) {
  for (size_t c = 0; c < t.columns.size(); ++c)
    if (t.columns[c] == name) return c;
  throw ConfigError("unknown channel \"" + name + "\" (trace has no such column)");
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) { lo = std::min(lo, v); hi = std::max(hi, v); }
  // Degenerate or empty ranges widen to something plottable.
  void regularize() {
    if (lo > hi) { lo = 0; hi = 1; }
    if (lo == hi) { lo -= 1; hi += 1; }
  }
};

}  // namespace

std::string render_svg_text(const Table& trace, const std::vector<std::string>& channels) {
  size_t axis = std::string::npos;
  std::string axis_name;
  for (const char* candidate : {"t", "k"}) {
    for (size_t c = 0; c < trace.columns.size(); ++c)
      if (trace.columns[c] == candidate) { axis = c; axis_name = candidate; break; }
    if (axis != std::string::npos) break;
  }
  if (axis == std::string::npos) throw ConfigError("trace has no time axis column (t or k)");

  std::vector<size_t> cols;
  cols.reserve(channels.size());
  for (const auto& name : channels) cols.push_back(column_index(trace, name));

  Range xr, yr;
  for (const auto& row : trace.rows) {
    xr.include(row[axis]);
    for (size_t c : cols) yr.include(row[c]);
  }
  xr.regularize();
  yr.regularize();

  const auto px = [&](double v) { return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * (kRight - kLeft); };
  const auto py = [&](double v) { return kBottom - (v - yr.lo) / (yr.hi - yr.lo) * (kBottom - kTop); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(kWidth) + "\" height=\"" +
         coord(kHeight) + "\" viewBox=\"0 0 " + coord(kWidth) + " " + coord(kHeight) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + coord(kWidth) + "\" height=\"" + coord(kHeight) +
         "\" fill=\"white\"/>\n";

  // Grid and tick labels: 6 x-ticks, 5 y-ticks.
  for (int i = 0; i <= 5; ++i) {
    const double v = xr.lo + (xr.hi - xr.lo) * i / 5.0;
    const double x = px(v);
    svg += "<line x1=\"" + coord(x) + "\" y1=\"" + coord(kTop) + "\" x2=\"" + coord(x) +
           "\" y2=\"" + coord(kBottom) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + coord(x) + "\" y=\"" + coord(kBottom + 18) +
           "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">" +
           tick_label(v) + "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double v = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    const double y = py(v);
    svg += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(y) + "\" x2=\"" + coord(kRight) +
           "\" y2=\"" + coord(y) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + coord(kLeft - 8) + "\" y=\"" + coord(y + 4) +
           "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"end\">" + tick_label(v) +
           "</text>\n";
  }

  // Axes frame and axis name.
  svg += "<rect x=\"" + coord(kLeft) + "\" y=\"" + coord(kTop) + "\" width=\"" +
         coord(kRight - kLeft) + "\" height=\"" + coord(kBottom - kTop) +
         "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<text x=\"" + coord((kLeft + kRight) / 2) + "\" y=\"" + coord(kHeight - 8) +
         "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">" + axis_name +
         "</text>\n";

  // One polyline per channel.
  for (size_t i = 0; i < cols.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    std::string points;
    for (const auto& row : trace.rows) {
      if (!points.empty()) points += ' ';
      points += coord(px(row[axis])) + "," + coord(py(row[cols[i]]));
    }
    if (!points.empty())
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
  }

  // Legend, top-right inside the frame.
  for (size_t i = 0; i < cols.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    const double y = kTop + 16 + 16 * double(i);
    svg += "<line x1=\"" + coord(kRight - 150) + "\" y1=\"" + coord(y - 4) + "\" x2=\"" +
           coord(kRight - 126) + "\" y2=\"" + coord(y - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + coord(kRight - 120) + "\" y=\"" + coord(y) +
           "\" font-family=\"monospace\" font-size=\"12\">" + channels[i] + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

std::string render_svg(const std::string& csv_path, const std::vector<std::string>& channels,
                       const std::string& out_path) {
  const Table trace = read_csv(csv_path);

  std::vector<std::string> selected = channels;
  if (selected.empty())
    for (const auto& name : trace.columns)
      if (name != "k" && name != "t") selected.push_back(name);

  std::string path = out_path;
  if (path.empty()) {
    path = csv_path;
    const size_t dot = path.find_last_of('.');
    const size_t slash = path.find_last_of('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
      path.resize(dot);
    path += ".svg";
  }

  const std::string text = render_svg_text(trace, selected);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path + " for writing");
  file << text;
  if (!file.flush()) throw IoError("write failed for " + path);
  return path;
}

}  // namespace fods::experiments
