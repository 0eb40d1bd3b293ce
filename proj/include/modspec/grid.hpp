// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace modspec {

/// Sampled parameter space carrying the base algebra A = ⊕_g M_{n(g)}(C).
/// Each point g has a display label, a weight mu(g) > 0 and a fiber matrix
/// dimension n(g) >= 1. The weights define the normalized trace, so they
/// must sum to 1.
class ParameterGrid {
 public:
  ParameterGrid(std::vector<double> labels, std::vector<double> weights,
                std::vector<int> fiber_dims);

  /// npoints scalar fibers with equal weights and labels 0..npoints-1.
  static ParameterGrid uniform_scalar(std::size_t npoints);

  std::size_t size() const { return weights_.size(); }
  double label(std::size_t g) const { return labels_[g]; }
  double weight(std::size_t g) const { return weights_[g]; }
  int dim(std::size_t g) const { return fiber_dims_[g]; }

  const std::vector<double>& labels() const { return labels_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<int>& fiber_dims() const { return fiber_dims_; }

  bool same_shape(const ParameterGrid& other) const;

 private:
  std::vector<double> labels_;
  std::vector<double> weights_;
  std::vector<int> fiber_dims_;
};

using GridPtr = std::shared_ptr<const ParameterGrid>;

GridPtr make_uniform_scalar_grid(std::size_t npoints);
GridPtr make_grid(std::vector<double> labels, std::vector<double> weights,
                  std::vector<int> fiber_dims);

/// Structural compatibility: same point count, weights and fiber dims.
bool same_grid(const GridPtr& a, const GridPtr& b);

} // namespace modspec
