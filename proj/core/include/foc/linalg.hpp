#pragma once

#include <Eigen/Dense>

namespace foc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Spectral norm (largest singular value); the operator norm induced by the Euclidean norm.
inline double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace foc
