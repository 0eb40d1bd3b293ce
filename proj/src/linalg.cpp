// SPDX-License-Identifier: Apache-2.0
#include "modspec/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace modspec {

double spectral_norm(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double hermitian_defect(const Mat& m) {
  return spectral_norm(m - m.adjoint());
}

HermEig herm_eig(const Mat& m) {
  const Mat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return HermEig{es.eigenvalues(), es.eigenvectors()};
}

Mat range_basis(const Mat& m, double tol) {
  if (m.cols() == 0 || m.rows() == 0) return Mat(m.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++rank;
  return svd.matrixU().leftCols(rank);
}

Mat orthonormal_columns(const Mat& candidates, double tol) {
  const Eigen::Index n = candidates.rows();
  Mat basis(n, candidates.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index j = 0; j < candidates.cols(); ++j) {
    Vec v = candidates.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < kept; ++i)
        v -= basis.col(i) * (basis.col(i).dot(v));
    const double nrm = v.norm();
    if (nrm > tol) basis.col(kept++) = v / nrm;
  }
  return basis.leftCols(kept);
}

Mat complete_onb(const Mat& v, int n) {
  Mat candidates(n, v.cols() + n);
  candidates.leftCols(v.cols()) = v;
  candidates.rightCols(n) = Mat::Identity(n, n);
  Mat full = orthonormal_columns(candidates, 1e-8);
  return full.leftCols(n);
}

Mat polar_unitary(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

} // namespace modspec
