// SPDX-License-Identifier: Apache-2.0
#include "modspec/grid.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace modspec {

namespace {
constexpr double kWeightSumTol = 1e-12;
}

ParameterGrid::ParameterGrid(std::vector<double> labels,
                             std::vector<double> weights,
                             std::vector<int> fiber_dims)
    : labels_(std::move(labels)),
      weights_(std::move(weights)),
      fiber_dims_(std::move(fiber_dims)) {
  if (weights_.empty()) throw std::invalid_argument("grid: no points");
  if (labels_.size() != weights_.size() || fiber_dims_.size() != weights_.size())
    throw std::invalid_argument("grid: label/weight/dim length mismatch");
  double sum = 0.0;
  for (std::size_t g = 0; g < weights_.size(); ++g) {
    if (!(weights_[g] > 0.0))
      throw std::invalid_argument("grid: weight must be positive at point " +
                                  std::to_string(g));
    if (fiber_dims_[g] < 1)
      throw std::invalid_argument("grid: fiber dim must be >= 1 at point " +
                                  std::to_string(g));
    sum += weights_[g];
  }
  if (std::abs(sum - 1.0) > kWeightSumTol)
    throw std::invalid_argument("grid: weights sum to " + std::to_string(sum) +
                                ", expected 1");
}

ParameterGrid ParameterGrid::uniform_scalar(std::size_t npoints) {
  std::vector<double> labels(npoints), weights(npoints, 1.0 / double(npoints));
  std::vector<int> dims(npoints, 1);
  for (std::size_t g = 0; g < npoints; ++g) labels[g] = double(g);
  // Remove rounding drift in the weight sum.
  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  weights.back() += 1.0 - sum;
  return ParameterGrid(std::move(labels), std::move(weights), std::move(dims));
}

bool ParameterGrid::same_shape(const ParameterGrid& other) const {
  return weights_ == other.weights_ && fiber_dims_ == other.fiber_dims_;
}

GridPtr make_uniform_scalar_grid(std::size_t npoints) {
  return std::make_shared<const ParameterGrid>(
      ParameterGrid::uniform_scalar(npoints));
}

GridPtr make_grid(std::vector<double> labels, std::vector<double> weights,
                  std::vector<int> fiber_dims) {
  return std::make_shared<const ParameterGrid>(
      std::move(labels), std::move(weights), std::move(fiber_dims));
}

bool same_grid(const GridPtr& a, const GridPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->same_shape(*b);
}

} // namespace modspec
