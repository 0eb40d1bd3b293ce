// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace modspec {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Complex = std::complex<double>;

/// Largest singular value (2-norm). Zero-sized matrices have norm 0.
double spectral_norm(const Mat& m);

/// Hermitian deviation ||m - m*|| in the 2-norm.
double hermitian_defect(const Mat& m);

struct HermEig {
  RVec values;  // ascending
  Mat vectors;  // columns match values
};

/// Eigendecomposition of the Hermitian part of m. Callers check
/// hermitian_defect beforehand where the contract requires it.
HermEig herm_eig(const Mat& m);

/// Orthonormal basis of the column space of m; columns with singular value
/// below tol are discarded.
Mat range_basis(const Mat& m, double tol = 1e-10);

/// Modified Gram-Schmidt selection from candidate columns, keeping the
/// deterministic order of candidates. Columns whose residual norm falls
/// below tol are skipped. A second orthogonalization pass keeps the result
/// orthonormal to machine precision.
Mat orthonormal_columns(const Mat& candidates, double tol = 1e-9);

/// Extends the orthonormal columns of v to a full unitary [v | v_perp],
/// completing against standard basis vectors in index order.
Mat complete_onb(const Mat& v, int n);

/// Unitary polar factor of m (m square); for rank-deficient m the defective
/// directions are completed deterministically.
Mat polar_unitary(const Mat& m);

} // namespace modspec
