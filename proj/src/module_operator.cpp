// SPDX-License-Identifier: Apache-2.0
#include "modspec/module_operator.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace modspec {

ModuleOperator::ModuleOperator(GridPtr grid, int truncation,
                               std::vector<Mat> fibers)
    : grid_(std::move(grid)), truncation_(truncation), fibers_(std::move(fibers)) {
  if (!grid_) throw std::invalid_argument("operator: null grid");
  if (truncation_ < 1) throw std::invalid_argument("operator: truncation < 1");
  if (fibers_.size() != grid_->size())
    throw std::invalid_argument("operator: fiber count mismatch");
  for (std::size_t g = 0; g < fibers_.size(); ++g) {
    const Eigen::Index dim = Eigen::Index(truncation_) * grid_->dim(g);
    if (fibers_[g].rows() != dim || fibers_[g].cols() != dim)
      throw std::invalid_argument("operator: fiber shape mismatch at point " +
                                  std::to_string(g));
  }
}

ModuleOperator ModuleOperator::zeros(const GridPtr& grid, int truncation) {
  std::vector<Mat> fibers(grid->size());
  for (std::size_t g = 0; g < grid->size(); ++g) {
    const Eigen::Index dim = Eigen::Index(truncation) * grid->dim(g);
    fibers[g] = Mat::Zero(dim, dim);
  }
  return ModuleOperator(grid, truncation, std::move(fibers));
}

ModuleOperator ModuleOperator::identity(const GridPtr& grid, int truncation) {
  std::vector<Mat> fibers(grid->size());
  for (std::size_t g = 0; g < grid->size(); ++g) {
    const Eigen::Index dim = Eigen::Index(truncation) * grid->dim(g);
    fibers[g] = Mat::Identity(dim, dim);
  }
  return ModuleOperator(grid, truncation, std::move(fibers));
}

ModuleVector ModuleOperator::apply(const ModuleVector& x) const {
  if (!same_grid(grid_, x.grid()) || truncation_ != x.truncation())
    throw std::invalid_argument("operator apply: shape mismatch");
  std::vector<Mat> fibers(x.points());
  for (std::size_t g = 0; g < x.points(); ++g)
    fibers[g] = fibers_[g] * x.fiber(g);
  return ModuleVector(grid_, truncation_, std::move(fibers));
}

ModuleOperator operator+(const ModuleOperator& a, const ModuleOperator& b) {
  if (!same_grid(a.grid(), b.grid()) || a.truncation() != b.truncation())
    throw std::invalid_argument("operator sum: shape mismatch");
  std::vector<Mat> fibers(a.points());
  for (std::size_t g = 0; g < a.points(); ++g) fibers[g] = a.fiber(g) + b.fiber(g);
  return ModuleOperator(a.grid(), a.truncation(), std::move(fibers));
}

ModuleOperator operator-(const ModuleOperator& a, const ModuleOperator& b) {
  if (!same_grid(a.grid(), b.grid()) || a.truncation() != b.truncation())
    throw std::invalid_argument("operator difference: shape mismatch");
  std::vector<Mat> fibers(a.points());
  for (std::size_t g = 0; g < a.points(); ++g) fibers[g] = a.fiber(g) - b.fiber(g);
  return ModuleOperator(a.grid(), a.truncation(), std::move(fibers));
}

ModuleOperator operator*(Complex s, const ModuleOperator& a) {
  std::vector<Mat> fibers(a.points());
  for (std::size_t g = 0; g < a.points(); ++g) fibers[g] = s * a.fiber(g);
  return ModuleOperator(a.grid(), a.truncation(), std::move(fibers));
}

ModuleOperator operator*(const ModuleOperator& a, const ModuleOperator& b) {
  if (!same_grid(a.grid(), b.grid()) || a.truncation() != b.truncation())
    throw std::invalid_argument("operator product: shape mismatch");
  std::vector<Mat> fibers(a.points());
  for (std::size_t g = 0; g < a.points(); ++g) fibers[g] = a.fiber(g) * b.fiber(g);
  return ModuleOperator(a.grid(), a.truncation(), std::move(fibers));
}

double sup_norm(const ModuleOperator& k) {
  double best = 0.0;
  for (std::size_t g = 0; g < k.points(); ++g)
    best = std::max(best, spectral_norm(k.fiber(g)));
  return best;
}

double hermitian_defect(const ModuleOperator& k) {
  double best = 0.0;
  for (std::size_t g = 0; g < k.points(); ++g)
    best = std::max(best, hermitian_defect(k.fiber(g)));
  return best;
}

bool is_hermitian(const ModuleOperator& k, double tol) {
  return hermitian_defect(k) <= tol;
}

double min_eigenvalue(const ModuleOperator& k) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < k.points(); ++g)
    best = std::min(best, herm_eig(k.fiber(g)).values.minCoeff());
  return best;
}

double operator_center_trace(const ModuleOperator& k, std::size_t g) {
  return k.fiber(g).trace().real() / double(k.grid()->dim(g));
}

} // namespace modspec
