#pragma once
#include <vector>

namespace choq::detail {

// Least squares for sum_j c_j X[i][j] ~ y[i]; returns coefficients and the rms residual.
struct LinearFit {
  std::vector<double> coef;
  double rms = 0.0;
};
LinearFit least_squares(const std::vector<std::vector<double>>& X, const std::vector<double>& y);

}  // namespace choq::detail
