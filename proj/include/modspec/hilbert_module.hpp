// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "modspec/algebra.hpp"

namespace modspec {

/// Element of the truncated right Hilbert A-module A^N. Per grid point the
/// N coordinate blocks (each n(g) x n(g)) are stacked into one
/// (N*n(g)) x n(g) matrix, so the right action of A is matrix
/// multiplication from the right and operators act from the left.
class ModuleVector {
 public:
  ModuleVector(GridPtr grid, int truncation, std::vector<Mat> fibers);

  static ModuleVector zeros(const GridPtr& grid, int truncation);
  /// Standard basis vector e_{m+1} (0-based m): block m is the identity.
  static ModuleVector basis(const GridPtr& grid, int truncation, int m);

  const GridPtr& grid() const { return grid_; }
  int truncation() const { return truncation_; }
  std::size_t points() const { return fibers_.size(); }
  const Mat& fiber(std::size_t g) const { return fibers_[g]; }
  /// Coordinate block m at point g (n x n).
  Mat block(std::size_t g, int m) const;

  friend ModuleVector operator+(const ModuleVector& x, const ModuleVector& y);
  friend ModuleVector operator-(const ModuleVector& x, const ModuleVector& y);
  friend ModuleVector operator*(Complex s, const ModuleVector& x);
  /// Right action x . a.
  friend ModuleVector operator*(const ModuleVector& x, const AlgebraField& a);

 private:
  GridPtr grid_;
  int truncation_;
  std::vector<Mat> fibers_;
};

/// A-valued inner product <x,y> = sum_m x_m* y_m.
AlgebraField inner(const ModuleVector& x, const ModuleVector& y);

/// Module norm ||<x,x>||^(1/2).
double norm(const ModuleVector& x);

/// Trace norm tau(<x,x>)^(1/2); always <= norm(x).
double trace_norm(const ModuleVector& x);

/// Projects x onto the span of generators: sum_i g_i <g_i, x>. The
/// generators must be orthonormalized, <g_i,g_j> = delta_ij p_i with p_i
/// projections within 1e-8.
ModuleVector project_onto_span(const ModuleVector& x,
                               const std::vector<ModuleVector>& generators);

/// Rescales x so that its inner square becomes a projection: applies the
/// spectral cutoff to <x,x>/||<x,x>|| and compresses by
/// b = (p a p)^(-1/2) inside pAp. The resulting projection has
/// trace_tau > 1 - eps; otherwise the achieved trace is reported.
struct NormalizeResult {
  ModuleVector x;
  Projection p;
  double level;
};
NormalizeResult normalize_to_projection(const ModuleVector& x, double eps);

/// Builds `count` mutually orthogonal vectors orthogonal to the given
/// orthonormalized generators, with projection inner squares. Residual rank
/// is assigned greedily from the lowest coordinates, so traces are pushed
/// toward 1 and equal 1 exactly whenever enough complement rank remains.
/// The eps schedule parametrizes the inductive construction; the finite
/// truncation realizes each step exactly, so only its length is consulted.
std::vector<ModuleVector> complement_basis(
    const GridPtr& grid, int truncation,
    const std::vector<ModuleVector>& generators, int count,
    const std::vector<double>& eps_schedule = {});

/// Coefficient tail profile of x: sup-norm tails
/// t_m = sup_g || sum_{j>m} x_j(g)* x_j(g) || for m = 0..N-1 and the
/// matching trace-norm tails. A vector whose sup tails fall below 1e-6
/// before the truncation boundary behaves like a module element ("H-like");
/// otherwise the non-decaying tail is the dual-module signature at this
/// truncation.
struct TailProfile {
  std::vector<double> sup_tails;    // t_0 .. t_{N-1}
  std::vector<double> trace_tails;  // tau tails, same indexing
  bool h_like = false;
  int decay_index = -1;  // first m with t_m below threshold, -1 if none
  std::string verdict() const;
};
TailProfile tail_profile(const ModuleVector& x);

} // namespace modspec
