#include "qswn/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace qswn {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& s) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= f * mag) return f * mag;
  }
  return 10.0 * mag;
}

std::string tick_label(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << (std::abs(v) < 1e-12 ? 0.0 : v);
  return s.str();
}

}  // namespace

void write_svg_plot(std::ostream& out, const PlotSpec& spec) {
  Range xr, yr;
  for (const PlotSeries& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xr.include(s.x[i]);
      const double e = i < s.error.size() && std::isfinite(s.error[i]) ? s.error[i] : 0.0;
      yr.include(s.y[i] - e);
      yr.include(s.y[i] + e);
    }
  }
  xr.finish();
  yr.finish();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

  const auto old_flags = out.flags();
  const auto old_precision = out.precision(6);
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(spec.title) << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int axis = 0; axis < 2; ++axis) {
    const Range& r = axis == 0 ? xr : yr;
    const double step = nice_step(r.hi - r.lo);
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-12; v += step) {
      if (axis == 0) {
        out << "<line x1=\"" << px(v) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(v) << "\" y2=\""
            << kTop + ph + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(v) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
            << tick_label(v) << "</text>\n";
      } else {
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(v) << "\" x2=\"" << kLeft << "\" y2=\""
            << py(v) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
            << tick_label(v) << "</text>\n";
      }
    }
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(spec.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + ph / 2 << ")\">" << escape(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const PlotSeries& s = spec.series[k];
    const char* color = kColors[k % kColors.size()];
    out << "<g stroke=\"" << color << "\" fill=\"" << color << "\">\n";
    if (s.connect) {
      out << "<polyline fill=\"none\" points=\"";
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      }
      out << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (i < s.error.size() && std::isfinite(s.error[i]) && s.error[i] > 0.0) {
        out << "<line x1=\"" << px(s.x[i]) << "\" y1=\"" << py(s.y[i] - s.error[i]) << "\" x2=\""
            << px(s.x[i]) << "\" y2=\"" << py(s.y[i] + s.error[i]) << "\"/>\n";
      }
      out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\""
          << (s.connect ? 2.5 : 1.5) << "\"/>\n";
    }
    out << "</g>\n";
    if (!s.label.empty()) {
      const double ly = kTop + 16 + 16 * static_cast<double>(k);
      out << "<text x=\"" << kLeft + pw - 8 << "\" y=\"" << ly << "\" text-anchor=\"end\" fill=\"" << color
          << "\">" << escape(s.label) << "</text>\n";
    }
  }
  out << "</svg>\n";
  out.flags(old_flags);
  out.precision(old_precision);
}

}  // namespace qswn
