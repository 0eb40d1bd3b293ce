// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "modspec/module_operator.hpp"

namespace modspec {

/// Dyadic two-level test model over the unit interval: grid point k
/// (1-based) samples (2^-k, 2^-(k-1)] with weight proportional to its
/// length, and the operator couples coordinate 1 to coordinate k with
/// strength b_k = 2^-k there. Its top eigenvector has constant coefficient
/// sup-norm tails, the dual-module signature at any truncation.
GridPtr dyadic_grid(int levels);

/// Coupling strengths b_k = 2^-k, k = 1..levels.
std::vector<double> dyadic_couplings(int levels);

/// The coupled operator at truncation N = levels.
ModuleOperator dyadic_operator(int levels);

/// The known top eigenvector: 1 on interval 1 in coordinate 1, and
/// (e_1 + e_k)/sqrt(2) on interval k for k >= 2.
ModuleVector dyadic_top_eigenvector(int levels);

} // namespace modspec
