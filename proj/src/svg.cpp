#include "kerrcmm/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace kerrcmm::svg {

namespace {

std::string num(double v, int precision = 6) {
  if (!std::isfinite(v)) v = 0.0;
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general,
                                 precision);
  return std::string(buf, res.ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
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

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  void widen(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

Range data_range(const std::vector<Series>& series, bool use_x) {
  Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : series) {
    for (const double v : (use_x ? s.x : s.y)) r.widen(v);
  }
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) return Range{0.0, 1.0};
  if (r.lo == r.hi) {
    const double pad = std::max(std::abs(r.lo), 1.0);
    return Range{r.lo - pad, r.hi + pad};
  }
  const double pad = 0.04 * (r.hi - r.lo);
  return Range{r.lo - pad, r.hi + pad};
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series,
                      int width, int height) {
  const double ml = 86, mr = 24, mt = 44, mb = 58;  // margins
  const double pw = width - ml - mr;                // plot area
  const double ph = height - mt - mb;

  const Range rx = data_range(series, true);
  const Range ry = data_range(series, false);
  const auto px = [&](double v) { return ml + pw * (v - rx.lo) / (rx.hi - rx.lo); };
  const auto py = [&](double v) { return mt + ph * (1.0 - (v - ry.lo) / (ry.hi - ry.lo)); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << escape(title) << "</text>\n";

  // Frame.
  out << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks: 6 per axis, value labels in general notation.
  for (int i = 0; i <= 5; ++i) {
    const double fx = rx.lo + (rx.hi - rx.lo) * i / 5.0;
    const double gx = px(fx);
    out << "<line x1=\"" << num(gx) << "\" y1=\"" << num(mt + ph) << "\" x2=\"" << num(gx)
        << "\" y2=\"" << num(mt + ph + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(gx) << "\" y=\"" << num(mt + ph + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << num(fx, 4) << "</text>\n";
    const double fy = ry.lo + (ry.hi - ry.lo) * i / 5.0;
    const double gy = py(fy);
    out << "<line x1=\"" << num(ml - 5) << "\" y1=\"" << num(gy) << "\" x2=\"" << num(ml)
        << "\" y2=\"" << num(gy) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(gy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << num(fy, 4) << "</text>\n";
  }

  out << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(height - 14.0)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << num(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << num(mt + ph / 2) << ")\">" << escape(y_label)
      << "</text>\n";

  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << escape(s.color)
        << "\" stroke-width=\"1.5\" points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out << ' ';
      out << num(px(s.x[i])) << ',' << num(py(s.y[i]));
    }
    out << "\"/>\n";
  }

  // Legend, top-right inside the frame.
  double ly = mt + 16;
  for (const auto& s : series) {
    const double lx = ml + pw - 150;
    out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 26)
        << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << escape(s.color)
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(lx + 32) << "\" y=\"" << num(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.label)
        << "</text>\n";
    ly += 18;
  }

  out << "</svg>\n";
  return out.str();
}

}  // namespace kerrcmm::svg
