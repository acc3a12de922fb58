#pragma once

// Least-squares recovery of the six trust-model property weights from
// published TM totals. Normalization is done here from the raw integer
// scores, independently of the scoring headers.

#include <algorithm>
#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ivmf::tools {

struct WeightSolve {
  std::array<double, 6> weights{};
  Eigen::Index rank = 0;
  double max_residual = 0.0;
  std::vector<double> residuals;
};

// scores[i][k]: raw score of protocol i for property k. targets[i]: published TM.
inline WeightSolve solve_tm_weights(const std::vector<std::array<int, 6>>& scores,
                                    const std::vector<double>& targets) {
  if (scores.size() != targets.size() || scores.size() < 6) {
    throw std::invalid_argument("need one target per protocol and at least 6 protocols");
  }
  const auto n = static_cast<Eigen::Index>(scores.size());
  Eigen::MatrixXd a(n, 6);
  Eigen::VectorXd b(n);
  for (int k = 0; k < 6; ++k) {
    int lo = scores[0][k], hi = scores[0][k];
    for (const auto& row : scores) {
      lo = std::min(lo, row[k]);
      hi = std::max(hi, row[k]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, k) = hi == lo ? 0.0 : double(scores[i][k] - lo) / double(hi - lo);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) b(i) = targets[i];

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::VectorXd w = qr.solve(b);
  const Eigen::VectorXd r = a * w - b;

  WeightSolve out;
  out.rank = qr.rank();
  for (int k = 0; k < 6; ++k) out.weights[k] = w(k);
  for (Eigen::Index i = 0; i < n; ++i) out.residuals.push_back(r(i));
  out.max_residual = r.cwiseAbs().maxCoeff();
  return out;
}

}  // namespace ivmf::tools
