// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "modspec/hilbert_module.hpp"

namespace modspec {

/// Adjointable operator on the truncated module: per grid point one
/// (N*n(g)) x (N*n(g)) matrix acting from the left, which automatically
/// commutes with the right A-action. The spectral machinery requires the
/// fibers to be Hermitian.
class ModuleOperator {
 public:
  ModuleOperator(GridPtr grid, int truncation, std::vector<Mat> fibers);

  static ModuleOperator zeros(const GridPtr& grid, int truncation);
  static ModuleOperator identity(const GridPtr& grid, int truncation);

  const GridPtr& grid() const { return grid_; }
  int truncation() const { return truncation_; }
  std::size_t points() const { return fibers_.size(); }
  const Mat& fiber(std::size_t g) const { return fibers_[g]; }

  ModuleVector apply(const ModuleVector& x) const;

  friend ModuleOperator operator+(const ModuleOperator& a, const ModuleOperator& b);
  friend ModuleOperator operator-(const ModuleOperator& a, const ModuleOperator& b);
  friend ModuleOperator operator*(Complex s, const ModuleOperator& a);
  friend ModuleOperator operator*(const ModuleOperator& a, const ModuleOperator& b);

 private:
  GridPtr grid_;
  int truncation_;
  std::vector<Mat> fibers_;
};

double sup_norm(const ModuleOperator& k);
double hermitian_defect(const ModuleOperator& k);
bool is_hermitian(const ModuleOperator& k, double tol = 1e-12);
/// Smallest fiber eigenvalue over the grid.
double min_eigenvalue(const ModuleOperator& k);
/// Extension of the center-valued trace to module operators: per fiber
/// tr(K(g)) / n(g), counting eigenvalues in units of fiber rank.
double operator_center_trace(const ModuleOperator& k, std::size_t g);

} // namespace modspec
