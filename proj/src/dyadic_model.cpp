// SPDX-License-Identifier: Apache-2.0
#include "modspec/dyadic_model.hpp"

#include <cmath>
#include <stdexcept>

namespace modspec {

GridPtr dyadic_grid(int levels) {
  if (levels < 1) throw std::invalid_argument("dyadic: levels must be >= 1");
  std::vector<double> labels(levels), weights(levels);
  std::vector<int> dims(levels, 1);
  const double total = 1.0 - std::ldexp(1.0, -levels);
  for (int k = 1; k <= levels; ++k) {
    labels[k - 1] = 1.5 * std::ldexp(1.0, -k);  // interval midpoint
    weights[k - 1] = std::ldexp(1.0, -k) / total;
  }
  double sum = 0.0;
  for (double w : weights) sum += w;
  weights.back() += 1.0 - sum;
  return make_grid(std::move(labels), std::move(weights), std::move(dims));
}

std::vector<double> dyadic_couplings(int levels) {
  std::vector<double> b(levels);
  for (int k = 1; k <= levels; ++k) b[k - 1] = std::ldexp(1.0, -k);
  return b;
}

ModuleOperator dyadic_operator(int levels) {
  const GridPtr grid = dyadic_grid(levels);
  const std::vector<double> b = dyadic_couplings(levels);
  std::vector<Mat> fibers(levels);
  for (int g = 0; g < levels; ++g) {
    Mat m = Mat::Zero(levels, levels);
    // On interval k only f_k is alive; it couples coordinates 1 and k.
    m(0, g) = b[g];
    m(g, 0) = b[g];
    fibers[g] = std::move(m);
  }
  return ModuleOperator(grid, levels, std::move(fibers));
}

ModuleVector dyadic_top_eigenvector(int levels) {
  const GridPtr grid = dyadic_grid(levels);
  const double half_root2 = std::sqrt(0.5);
  std::vector<Mat> fibers(levels);
  for (int g = 0; g < levels; ++g) {
    Mat m = Mat::Zero(levels, 1);
    if (g == 0) {
      m(0, 0) = 1.0;
    } else {
      m(0, 0) = half_root2;
      m(g, 0) = half_root2;
    }
    fibers[g] = std::move(m);
  }
  return ModuleVector(grid, levels, std::move(fibers));
}

} // namespace modspec
