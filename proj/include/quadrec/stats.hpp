#pragma once

#include <vector>

namespace quadrec {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least-squares line through (xs, ys); r_squared is 1 for <= 2 points.
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

double median(std::vector<double> values);

}  // namespace quadrec
