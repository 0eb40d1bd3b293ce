// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "modspec/diagonalizer.hpp"

namespace modspec {

/// Quadratic form Q(x) = tau(<D x, x>) of a Hermitian module operator.
/// Invariant under right multiplication by unitaries of A.
class QuadraticForm {
 public:
  explicit QuadraticForm(ModuleOperator d);

  const ModuleOperator& op() const { return d_; }
  double norm_bound() const { return norm_bound_; }
  double evaluate(const ModuleVector& x) const;
  /// Directional derivative of Q at x along v: 2 Re tau(<D x, v>).
  double derivative(const ModuleVector& x, const ModuleVector& v) const;

 private:
  ModuleOperator d_;
  double norm_bound_;
};

/// Metric projection onto the unit ball {||x|| <= 1}: clips the eigenvalues
/// of <x,x> at 1 through the functional calculus.
ModuleVector project_to_unit_ball(const ModuleVector& x);

/// Projected ascent on the unit ball {||x|| <= 1}: ascend along D x with a
/// fixed 1/||D|| step, then clip the eigenvalues of <x,x> at 1 (the metric
/// projection onto the ball). Q is convex for positive D, so the iteration
/// is monotone; convergence is declared on Q-value stationarity since
/// maximizers are non-unique under degeneracy.
struct MaximizeResult {
  ModuleVector x;
  double value = 0.0;
  int iterations = 0;
  bool certified = false;
  double gradient_residual = 0.0;   // sup || D x - x <x, D x> ||
  double projection_defect = 0.0;   // distance of eig(<x,x>) from {0,1}
  double unit_defect = 0.0;         // || <x,x> - 1 ||
};
MaximizeResult maximize_on_ball(const QuadraticForm& form, int iters,
                                double tol, std::uint64_t seed = 0);

/// Stationarity check of Prop-style invariance: the submodule generated by
/// a certified maximizer and its complement are both D-invariant, so the
/// off-diagonal block (1 - P_L) D P_L must vanish.
struct InvariantReport {
  bool pass = false;
  double off_block_norm = 0.0;
};
InvariantReport verify_invariant_subspace(const QuadraticForm& form,
                                          const ModuleVector& x,
                                          double tol = 1e-6);

/// The supremum of Q over the unit ball equals tau(lambda_1) of the
/// spectral decomposition whenever the eigenvalue fields are spectrally
/// separated; the flag records whether that hypothesis was observed.
struct KyFanResult {
  double value = 0.0;
  bool separation_ok = false;
};
KyFanResult kyfan_value(const QuadraticForm& form);

} // namespace modspec
