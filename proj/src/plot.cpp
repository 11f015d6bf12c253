#include "saxe/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace saxe {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string escape(std::string_view s) {
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

// Geometry is rounded to two decimals; it is layout, not data.
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  void widen() {
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

class Canvas {
 public:
  explicit Canvas(const std::string& title) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(kWidth) << "\" height=\""
         << px(kHeight) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out_ << "<rect x=\"0\" y=\"0\" width=\"" << px(kWidth) << "\" height=\"" << px(kHeight)
         << "\" fill=\"white\"/>\n";
    out_ << "<text class=\"title\" x=\"" << px(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\">"
         << escape(title) << "</text>\n";
  }

  void frame() {
    out_ << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\""
         << px(kWidth - kLeft - kRight) << "\" height=\"" << px(kHeight - kTop - kBottom)
         << "\" fill=\"none\" stroke=\"#999\"/>\n";
  }

  void empty_note() {
    out_ << "<text class=\"empty\" x=\"" << px(kWidth / 2) << "\" y=\"" << px(kHeight / 2)
         << "\" text-anchor=\"middle\">no data</text>\n";
  }

  std::ostringstream& raw() { return out_; }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

double map_y(double v, const Range& r) {
  const double h = kHeight - kTop - kBottom;
  return kTop + h * (1.0 - (v - r.lo) / (r.hi - r.lo));
}

}  // namespace

std::string line_chart_tsv(const LineChart& chart) {
  std::string out = "series\t" + chart.x_name + "\tvalue\tci95\n";
  for (const auto& s : chart.series) {
    for (std::size_t i = 0; i < s.values.size() && i < chart.x_labels.size(); ++i) {
      out += s.name + '\t' + chart.x_labels[i] + '\t' + format_double(s.values[i]) + '\t' +
             (i < s.ci95.size() ? opt(s.ci95[i]) : std::string()) + '\n';
    }
  }
  return out;
}

std::string bar_chart_tsv(const BarChart& chart) {
  std::string out = "label\t" + chart.value_name + "\tci95\n";
  for (const auto& b : chart.bars) {
    out += b.label + '\t' + format_double(b.value) + '\t' + opt(b.ci95) + '\n';
  }
  return out;
}

std::string render_line_svg(const LineChart& chart, Diagnostics* diag) {
  Canvas c(chart.title);
  c.frame();
  std::size_t points = 0;
  Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : chart.series) {
    for (std::size_t i = 0; i < s.values.size() && i < chart.x_labels.size(); ++i) {
      const double ci = i < s.ci95.size() && s.ci95[i] ? *s.ci95[i] : 0.0;
      r.lo = std::min(r.lo, s.values[i] - ci);
      r.hi = std::max(r.hi, s.values[i] + ci);
      ++points;
    }
  }
  if (points == 0) {
    warn(diag, "chart '" + chart.title + "' has no data");
    c.empty_note();
    return c.finish();
  }
  r.widen();

  const std::size_t n = chart.x_labels.size();
  const double w = kWidth - kLeft - kRight;
  auto map_x = [&](std::size_t i) {
    return n == 1 ? kLeft + w / 2 : kLeft + w * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  auto& o = c.raw();
  // Label at most ~12 ticks so long monthly axes stay legible.
  const std::size_t stride = std::max<std::size_t>(1, (n + 11) / 12);
  for (std::size_t i = 0; i < n; i += stride) {
    o << "<text class=\"xtick\" x=\"" << px(map_x(i)) << "\" y=\"" << px(kHeight - kBottom + 16)
      << "\" text-anchor=\"middle\">" << escape(chart.x_labels[i]) << "</text>\n";
  }
  if (r.lo < 0 && r.hi > 0) {
    o << "<line x1=\"" << px(kLeft) << "\" x2=\"" << px(kWidth - kRight) << "\" y1=\""
      << px(map_y(0, r)) << "\" y2=\"" << px(map_y(0, r)) << "\" stroke=\"#ccc\"/>\n";
  }

  for (std::size_t si = 0; si < chart.series.size(); ++si) {
    const auto& s = chart.series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    const std::size_t m = std::min(s.values.size(), n);
    o << "<g class=\"series\" data-name=\"" << escape(s.name) << "\">\n";
    if (m > 1) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
      for (std::size_t i = 0; i < m; ++i) {
        o << (i ? " " : "") << px(map_x(i)) << ',' << px(map_y(s.values[i], r));
      }
      o << "\"/>\n";
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double x = map_x(i), y = map_y(s.values[i], r);
      if (i < s.ci95.size() && s.ci95[i]) {
        o << "<line class=\"ci\" x1=\"" << px(x) << "\" x2=\"" << px(x) << "\" y1=\""
          << px(map_y(s.values[i] - *s.ci95[i], r)) << "\" y2=\""
          << px(map_y(s.values[i] + *s.ci95[i], r)) << "\" stroke=\"" << color << "\"/>\n";
      }
      o << "<circle cx=\"" << px(x) << "\" cy=\"" << px(y) << "\" r=\"3\" fill=\"" << color
        << "\"><title>" << escape(s.name) << ' ' << escape(chart.x_labels[i]) << ": "
        << format_double(s.values[i]);
      if (i < s.ci95.size() && s.ci95[i]) o << " ± " << format_double(*s.ci95[i]);
      o << "</title></circle>\n";
    }
    o << "</g>\n";
    o << "<text class=\"legend\" x=\"" << px(kLeft + 8) << "\" y=\""
      << px(kTop + 14 + 14 * static_cast<double>(si)) << "\" fill=\"" << color << "\">"
      << escape(s.name) << "</text>\n";
  }
  return c.finish();
}

std::string render_bar_svg(const BarChart& chart, Diagnostics* diag) {
  Canvas c(chart.title);
  c.frame();
  if (chart.bars.empty()) {
    warn(diag, "chart '" + chart.title + "' has no data");
    c.empty_note();
    return c.finish();
  }
  Range r{0.0, 0.0};
  for (const auto& b : chart.bars) {
    const double ci = b.ci95.value_or(0.0);
    r.lo = std::min(r.lo, b.value - ci);
    r.hi = std::max(r.hi, b.value + ci);
  }
  r.widen();

  auto& o = c.raw();
  const double w = kWidth - kLeft - kRight;
  const double slot = w / static_cast<double>(chart.bars.size());
  const double y0 = map_y(0.0, r);
  for (std::size_t i = 0; i < chart.bars.size(); ++i) {
    const auto& b = chart.bars[i];
    const double x = kLeft + slot * static_cast<double>(i);
    const double y = map_y(b.value, r);
    o << "<g class=\"bar\">\n";
    o << "<rect x=\"" << px(x + slot * 0.15) << "\" y=\"" << px(std::min(y, y0)) << "\" width=\""
      << px(slot * 0.7) << "\" height=\"" << px(std::abs(y0 - y)) << "\" fill=\""
      << (b.value >= 0 ? kPalette[0] : kPalette[1]) << "\"/>\n";
    if (b.ci95) {
      const double cx = x + slot / 2;
      o << "<line class=\"ci\" x1=\"" << px(cx) << "\" x2=\"" << px(cx) << "\" y1=\""
        << px(map_y(b.value - *b.ci95, r)) << "\" y2=\"" << px(map_y(b.value + *b.ci95, r))
        << "\" stroke=\"black\"/>\n";
    }
    o << "<text class=\"label\" x=\"" << px(x + slot / 2) << "\" y=\""
      << px(kHeight - kBottom + 16) << "\" text-anchor=\"middle\">" << escape(b.label)
      << "</text>\n";
    o << "<text class=\"value\" x=\"" << px(x + slot / 2) << "\" y=\"" << px(std::min(y, y0) - 4)
      << "\" text-anchor=\"middle\">" << format_double(b.value) << "</text>\n";
    if (b.ci95) {
      o << "<title>" << escape(b.label) << ": " << format_double(b.value) << " ± "
        << format_double(*b.ci95) << "</title>\n";
    }
    o << "</g>\n";
  }
  o << "<line x1=\"" << px(kLeft) << "\" x2=\"" << px(kWidth - kRight) << "\" y1=\"" << px(y0)
    << "\" y2=\"" << px(y0) << "\" stroke=\"#333\"/>\n";
  return c.finish();
}

std::vector<double> scale_to_peak(std::span<const double> values, double peak) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  std::vector<double> out(values.begin(), values.end());
  if (m == 0.0) return out;
  for (double& v : out) v = v / m * peak;
  return out;
}

}  // namespace saxe
