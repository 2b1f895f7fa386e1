#include "cbsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cbsim {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Scale {
  double lo, hi;
  double pixel(double v, double px_lo, double px_hi) const {
    const double span = hi > lo ? hi - lo : 1.0;
    return px_lo + (v - lo) / span * (px_hi - px_lo);
  }
};

double sx(const Scale& s, double v) {
  return s.pixel(v, kMarginLeft, kWidth - kMarginRight);
}

double sy(const Scale& s, double v) {
  return s.pixel(v, kHeight - kMarginBottom, kMarginTop);
}

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  if (hi <= lo) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step;
       v += step) {
    ticks.push_back(v);
  }
  return ticks;
}

void draw_frame(std::ostringstream& out, const Scale& xs, const Scale& ys,
                const std::string& title, const std::string& x_label,
                const std::string& y_label) {
  out << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";
  for (double v : nice_ticks(xs.lo, xs.hi)) {
    const double px = sx(xs, v);
    out << "<line x1=\"" << px << "\" y1=\"" << kMarginTop << "\" x2=\"" << px
        << "\" y2=\"" << kHeight - kMarginBottom
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << kHeight - kMarginBottom + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt(v) << "</text>\n";
  }
  for (double v : nice_ticks(ys.lo, ys.hi)) {
    const double py = sy(ys, v);
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << py << "\" x2=\""
        << kWidth - kMarginRight << "\" y2=\"" << py
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt(v) << "</text>\n";
  }
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
      << kWidth - kMarginLeft - kMarginRight << "\" height=\""
      << kHeight - kMarginTop - kMarginBottom
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  out << "<text x=\"" << (kMarginLeft + kWidth - kMarginRight) / 2 << "\" y=\""
      << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << (kMarginTop + kHeight - kMarginBottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << (kMarginTop + kHeight - kMarginBottom) / 2 << ")\">" << y_label
      << "</text>\n";
}

}  // namespace

std::string render_regret_svg(const std::vector<SvgSeries>& series,
                              const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label) {
  if (series.empty()) throw std::invalid_argument("no series to plot");
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = 0.0, y_hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    if (s.x.size() != s.y.size() ||
        (!s.yerr.empty() && s.yerr.size() != s.y.size())) {
      throw std::invalid_argument("series length mismatch");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      const double err = s.yerr.empty() ? 0.0 : s.yerr[i];
      y_hi = std::max(y_hi, s.y[i] + err);
    }
  }
  const Scale xs{x_lo, x_hi};
  const Scale ys{y_lo, y_hi * 1.05 + 1e-12};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  draw_frame(out, xs, ys, title, x_label, y_label);

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(*kPalette))];
    if (!s.yerr.empty()) {
      out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" "
             "stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << fmt(sx(xs, s.x[i])) << ',' << fmt(sy(ys, s.y[i] + s.yerr[i]))
            << ' ';
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        out << fmt(sx(xs, s.x[i])) << ','
            << fmt(sy(ys, std::max(0.0, s.y[i] - s.yerr[i]))) << ' ';
      }
      out << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << fmt(sx(xs, s.x[i])) << ',' << fmt(sy(ys, s.y[i])) << ' ';
    }
    out << "\"/>\n";
    const double ly = kMarginTop + 16.0 + 16.0 * static_cast<double>(k);
    out << "<line x1=\"" << kMarginLeft + 10 << "\" y1=\"" << ly << "\" x2=\""
        << kMarginLeft + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kMarginLeft + 40 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_pareto_svg(const std::vector<ParetoRow>& rows,
                              const std::string& title) {
  if (rows.empty()) throw std::invalid_argument("no rows to plot");
  double x_hi = 0.0, y_hi = 0.0;
  for (const auto& r : rows) {
    x_hi = std::max(x_hi, r.benign_regret);
    y_hi = std::max(y_hi, r.hard_regret);
  }
  const Scale xs{0.0, x_hi * 1.1 + 1e-12};
  const Scale ys{0.0, y_hi * 1.1 + 1e-12};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  draw_frame(out, xs, ys, title, "benign regret", "hard regret");
  for (const auto& r : rows) {
    const double px = sx(xs, r.benign_regret);
    const double py = sy(ys, r.hard_regret);
    out << "<circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(py)
        << "\" r=\"5\" fill=\"#1f77b4\"/>\n";
    out << "<text x=\"" << fmt(px + 8) << "\" y=\"" << fmt(py - 8)
        << "\" font-family=\"sans-serif\" font-size=\"12\">Z2=" << fmt(r.z2)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace cbsim
