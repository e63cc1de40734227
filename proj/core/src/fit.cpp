#include "fit.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace choq::detail {

LinearFit least_squares(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
  const Eigen::Index m = static_cast<Eigen::Index>(y.size());
  const Eigen::Index k = X.empty() ? 0 : static_cast<Eigen::Index>(X.front().size());
  Eigen::MatrixXd A(m, k);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) A(i, j) = X[i][j];
    b(i) = y[i];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  LinearFit out;
  out.coef.assign(c.data(), c.data() + c.size());
  out.rms = m > 0 ? std::sqrt((A * c - b).squaredNorm() / static_cast<double>(m)) : 0.0;
  return out;
}

}  // namespace choq::detail
