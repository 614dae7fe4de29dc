#pragma once

#include <Eigen/Dense>

namespace abf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline double max_abs_asymmetry(const Mat& m) {
  return max_abs(Mat(m - m.transpose()));
}

// Largest |entry| of m*minv − I.
inline double off_identity(const Mat& m, const Mat& minv) {
  Mat p = m * minv;
  p -= Mat::Identity(m.rows(), m.cols());
  return max_abs(p);
}

}  // namespace abf
