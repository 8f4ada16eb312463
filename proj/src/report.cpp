// SPDX-License-Identifier: Apache-2.0
#include "pvqe/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pvqe {

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), r.ptr);
}

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 55;

const std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

// Eight stops sampled from the viridis map.
const std::array<std::array<int, 3>, 8> kViridis{{{68, 1, 84},
                                                  {70, 50, 127},
                                                  {54, 92, 141},
                                                  {39, 127, 142},
                                                  {31, 161, 135},
                                                  {74, 194, 109},
                                                  {159, 218, 58},
                                                  {253, 231, 37}}};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string viridis(double u) {
  u = std::clamp(std::isfinite(u) ? u : 0.0, 0.0, 1.0) * 7.0;
  const int i = std::min(6, static_cast<int>(u));
  const double f = u - i;
  char buf[8];
  int c[3];
  for (int k = 0; k < 3; ++k)
    c[k] = static_cast<int>(std::lround(kViridis[i][k] + f * (kViridis[i + 1][k] - kViridis[i][k])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

void header(std::ostringstream& s, const std::string& title) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(title) << "</text>\n";
}

void axes(std::ostringstream& s, const Range& xr, const Range& yr, const std::string& xl,
          const std::string& yl) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  s << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\""
    << y0 - y1 << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double px = x0 + (x1 - x0) * i / 4.0;
    s << "<text x=\"" << num(px) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">"
      << tick_label(fx) << "</text>\n";
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    const double py = y0 - (y0 - y1) * i / 4.0;
    s << "<text x=\"" << x0 - 6 << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">"
      << tick_label(fy) << "</text>\n";
  }
  s << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 15
    << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n"
    << "<text transform=\"translate(18," << (y0 + y1) / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(yl) << "</text>\n";
}

}  // namespace

std::string svg_plot(const PlotSpec& spec) {
  Range xr, yr;
  for (const auto& ser : spec.series) {
    for (double v : ser.x) xr.add(v);
    for (double v : ser.y) yr.add(v);
  }
  for (const auto& h : spec.hlines) yr.add(h.second);
  xr.finish();
  yr.finish();

  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  auto px = [&](double v) { return x0 + (v - xr.lo) / (xr.hi - xr.lo) * (x1 - x0); };
  auto py = [&](double v) { return y0 - (v - yr.lo) / (yr.hi - yr.lo) * (y0 - y1); };

  std::ostringstream s;
  header(s, spec.title);
  axes(s, xr, yr, spec.x_label, spec.y_label);
  for (const auto& [name, v] : spec.hlines) {
    s << "<line x1=\"" << x0 << "\" x2=\"" << x1 << "\" y1=\"" << num(py(v)) << "\" y2=\""
      << num(py(v)) << "\" stroke=\"gray\" stroke-dasharray=\"5,4\"/>\n"
      << "<text x=\"" << x1 - 4 << "\" y=\"" << num(py(v) - 4) << "\" text-anchor=\"end\" fill=\"gray\">"
      << escape(name) << "</text>\n";
  }
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const Series& ser = spec.series[i];
    const char* color = kPalette[i % kPalette.size()];
    const std::size_t n = std::min(ser.x.size(), ser.y.size());
    if (ser.markers) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(ser.x[j]) || !std::isfinite(ser.y[j])) continue;
        s << "<circle cx=\"" << num(px(ser.x[j])) << "\" cy=\"" << num(py(ser.y[j]))
          << "\" r=\"3\" fill=\"" << color << "\" fill-opacity=\"0.8\"/>\n";
      }
    } else {
      s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(ser.x[j]) || !std::isfinite(ser.y[j])) continue;
        s << num(px(ser.x[j])) << ',' << num(py(ser.y[j])) << ' ';
      }
      s << "\"/>\n";
    }
    const double ly = kTop + 14 + 18 * static_cast<double>(i);
    s << "<rect x=\"" << x1 + 12 << "\" y=\"" << ly - 9 << "\" width=\"12\" height=\"10\" fill=\""
      << color << "\"/>\n"
      << "<text x=\"" << x1 + 30 << "\" y=\"" << ly << "\">" << escape(ser.name) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string svg_heatmap(const HeatmapSpec& spec) {
  Range zr;
  for (const auto& row : spec.values)
    for (double v : row) zr.add(v);
  if (!(zr.lo <= zr.hi)) zr.lo = 0, zr.hi = 1;
  if (zr.hi - zr.lo < 1e-12) zr.hi = zr.lo + 1;

  Range xr{spec.x_min, spec.x_max}, yr{spec.y_min, spec.y_max};
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  std::ostringstream s;
  header(s, spec.title);
  const std::size_t rows = spec.values.size();
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t cols = spec.values[r].size();
    const double h = (y0 - y1) / static_cast<double>(rows);
    for (std::size_t c = 0; c < cols; ++c) {
      if (!std::isfinite(spec.values[r][c])) continue;
      const double w = (x1 - x0) / static_cast<double>(cols);
      const double u = (spec.values[r][c] - zr.lo) / (zr.hi - zr.lo);
      s << "<rect x=\"" << num(x0 + w * static_cast<double>(c)) << "\" y=\""
        << num(y0 - h * static_cast<double>(r + 1)) << "\" width=\"" << num(w + 0.5)
        << "\" height=\"" << num(h + 0.5) << "\" fill=\"" << viridis(u) << "\"/>\n";
    }
  }
  axes(s, xr, yr, spec.x_label, spec.y_label);
  // Color bar.
  for (int i = 0; i < 50; ++i) {
    const double u = i / 49.0;
    const double y = y0 - (y0 - y1) * (i + 1) / 50.0;
    s << "<rect x=\"" << x1 + 20 << "\" y=\"" << num(y) << "\" width=\"16\" height=\""
      << num((y0 - y1) / 50.0 + 0.5) << "\" fill=\"" << viridis(u) << "\"/>\n";
  }
  s << "<text x=\"" << x1 + 42 << "\" y=\"" << y0 << "\">" << tick_label(zr.lo) << "</text>\n"
    << "<text x=\"" << x1 + 42 << "\" y=\"" << y1 + 10 << "\">" << tick_label(zr.hi)
    << "</text>\n</svg>\n";
  return s.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace pvqe
