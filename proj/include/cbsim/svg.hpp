#pragma once

#include <string>
#include <vector>

#include "cbsim/harness.hpp"

namespace cbsim {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> yerr;  // optional, same length as y when present
};

// Self-contained SVG line chart: one mean curve per series plus a shaded
// mean +/- stderr band when error values are given.
std::string render_regret_svg(const std::vector<SvgSeries>& series,
                              const std::string& title,
                              const std::string& x_label = "t",
                              const std::string& y_label = "cumulative regret");

// Scatter of (benign, hard) regret pairs labeled by Z2.
std::string render_pareto_svg(const std::vector<ParetoRow>& rows,
                              const std::string& title);

}  // namespace cbsim
