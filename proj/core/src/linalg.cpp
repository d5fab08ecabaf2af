#include "linalg.hpp"

#include <Eigen/Dense>

namespace schurlab::detail {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> view(const Matrix& m) {
  return Eigen::Map<const RowMajor>(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                                    static_cast<Eigen::Index>(m.cols()));
}

}  // namespace

double min_eigenvalue_symmetric(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::MatrixXd a = view(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double max_singular_value_svd(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::MatrixXd a = view(m);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

}  // namespace schurlab::detail
