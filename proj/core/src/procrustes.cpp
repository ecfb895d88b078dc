#include <algorithm>
#include <stdexcept>

#include "measure_pca/experiments.hpp"

namespace measure_pca {

namespace {

Eigen::MatrixXd standardize(const Eigen::MatrixXd& y) {
  Eigen::MatrixXd centered = y.rowwise() - y.colwise().mean();
  const double norm = centered.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("procrustes_disparity: configuration has zero spread");
  return centered / norm;
}

}  // namespace

double procrustes_disparity(const Eigen::MatrixXd& y1, const Eigen::MatrixXd& y2) {
  if (y1.rows() != y2.rows() || y1.cols() != y2.cols()) {
    throw std::invalid_argument("procrustes_disparity: shapes differ");
  }
  if (y1.rows() < 2 || y1.cols() < 1) throw std::invalid_argument("procrustes_disparity: need n >= 2 rows");
  const Eigen::MatrixXd a = standardize(y1);
  const Eigen::MatrixXd b = standardize(y2);
  const Eigen::MatrixXd cross = a.transpose() * b;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross);
  const double trace = svd.singularValues().sum();
  return std::clamp(1.0 - trace * trace, 0.0, 1.0);
}

}  // namespace measure_pca
