// SPDX-License-Identifier: Apache-2.0
#include "modspec/hilbert_module.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "modspec/parallel.hpp"

namespace modspec {

namespace {

void require_compatible(const ModuleVector& x, const ModuleVector& y,
                        const char* what) {
  if (!same_grid(x.grid(), y.grid()) || x.truncation() != y.truncation())
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

// <g_i,g_j> = delta_ij p_i with p_i projections, within tol.
void require_orthonormalized(const std::vector<ModuleVector>& generators,
                             double tol, const char* what) {
  for (std::size_t i = 0; i < generators.size(); ++i) {
    for (std::size_t j = i; j < generators.size(); ++j) {
      const AlgebraField prod = inner(generators[i], generators[j]);
      if (i != j) {
        if (sup_norm(prod) > tol)
          throw std::invalid_argument(std::string(what) +
                                      ": generators not mutually orthogonal");
      } else {
        if (sup_norm(prod * prod - prod) > tol)
          throw std::invalid_argument(
              std::string(what) + ": generator inner square is not a projection");
      }
    }
  }
}

} // namespace

ModuleVector::ModuleVector(GridPtr grid, int truncation, std::vector<Mat> fibers)
    : grid_(std::move(grid)), truncation_(truncation), fibers_(std::move(fibers)) {
  if (!grid_) throw std::invalid_argument("vector: null grid");
  if (truncation_ < 1) throw std::invalid_argument("vector: truncation < 1");
  if (fibers_.size() != grid_->size())
    throw std::invalid_argument("vector: fiber count mismatch");
  for (std::size_t g = 0; g < fibers_.size(); ++g) {
    const int n = grid_->dim(g);
    if (fibers_[g].rows() != Eigen::Index(truncation_) * n ||
        fibers_[g].cols() != n)
      throw std::invalid_argument("vector: fiber shape mismatch at point " +
                                  std::to_string(g));
  }
}

ModuleVector ModuleVector::zeros(const GridPtr& grid, int truncation) {
  std::vector<Mat> fibers(grid->size());
  for (std::size_t g = 0; g < grid->size(); ++g)
    fibers[g] = Mat::Zero(Eigen::Index(truncation) * grid->dim(g), grid->dim(g));
  return ModuleVector(grid, truncation, std::move(fibers));
}

ModuleVector ModuleVector::basis(const GridPtr& grid, int truncation, int m) {
  if (m < 0 || m >= truncation)
    throw std::invalid_argument("basis: coordinate out of range");
  std::vector<Mat> fibers(grid->size());
  for (std::size_t g = 0; g < grid->size(); ++g) {
    const int n = grid->dim(g);
    fibers[g] = Mat::Zero(Eigen::Index(truncation) * n, n);
    fibers[g].block(Eigen::Index(m) * n, 0, n, n) = Mat::Identity(n, n);
  }
  return ModuleVector(grid, truncation, std::move(fibers));
}

Mat ModuleVector::block(std::size_t g, int m) const {
  const int n = grid_->dim(g);
  return fibers_[g].block(Eigen::Index(m) * n, 0, n, n);
}

ModuleVector operator+(const ModuleVector& x, const ModuleVector& y) {
  require_compatible(x, y, "vector sum");
  std::vector<Mat> fibers(x.points());
  for (std::size_t g = 0; g < x.points(); ++g) fibers[g] = x.fiber(g) + y.fiber(g);
  return ModuleVector(x.grid(), x.truncation(), std::move(fibers));
}

ModuleVector operator-(const ModuleVector& x, const ModuleVector& y) {
  require_compatible(x, y, "vector difference");
  std::vector<Mat> fibers(x.points());
  for (std::size_t g = 0; g < x.points(); ++g) fibers[g] = x.fiber(g) - y.fiber(g);
  return ModuleVector(x.grid(), x.truncation(), std::move(fibers));
}

ModuleVector operator*(Complex s, const ModuleVector& x) {
  std::vector<Mat> fibers(x.points());
  for (std::size_t g = 0; g < x.points(); ++g) fibers[g] = s * x.fiber(g);
  return ModuleVector(x.grid(), x.truncation(), std::move(fibers));
}

ModuleVector operator*(const ModuleVector& x, const AlgebraField& a) {
  if (!same_grid(x.grid(), a.grid()))
    throw std::invalid_argument("right action: grid mismatch");
  std::vector<Mat> fibers(x.points());
  for (std::size_t g = 0; g < x.points(); ++g) fibers[g] = x.fiber(g) * a.fiber(g);
  return ModuleVector(x.grid(), x.truncation(), std::move(fibers));
}

AlgebraField inner(const ModuleVector& x, const ModuleVector& y) {
  require_compatible(x, y, "inner");
  std::vector<Mat> fibers(x.points());
  for (std::size_t g = 0; g < x.points(); ++g)
    fibers[g] = x.fiber(g).adjoint() * y.fiber(g);
  return AlgebraField(x.grid(), std::move(fibers));
}

double norm(const ModuleVector& x) {
  return std::sqrt(std::max(0.0, sup_norm(inner(x, x))));
}

double trace_norm(const ModuleVector& x) {
  return std::sqrt(std::max(0.0, trace_tau(inner(x, x)).real()));
}

ModuleVector project_onto_span(const ModuleVector& x,
                               const std::vector<ModuleVector>& generators) {
  require_orthonormalized(generators, 1e-8, "project_onto_span");
  ModuleVector result = ModuleVector::zeros(x.grid(), x.truncation());
  for (const ModuleVector& gen : generators) {
    require_compatible(x, gen, "project_onto_span");
    result = result + gen * inner(gen, x);
  }
  return result;
}

NormalizeResult normalize_to_projection(const ModuleVector& x, double eps) {
  const AlgebraField gram = inner(x, x);
  const double scale = sup_norm(gram);
  if (scale <= 1e-14)
    throw std::invalid_argument("normalize: zero vector");
  const AlgebraField a = Complex(1.0 / scale) * gram;
  const CutoffScan scan = cutoff_scan(a, eps);
  if (!scan.ok)
    throw std::runtime_error(
        "normalize: no cut meets the trace bound, achieved trace " +
        std::to_string(scan.achieved_trace));
  const double level = scan.level;
  // b = scale^{-1/2} * a^{-1/2} restricted to the spectral range above the
  // cut; then <xb, xb> = chi_(level,1](a).
  const AlgebraField b =
      Complex(1.0 / std::sqrt(scale)) *
      functional_calculus(a, [level](double t) {
        return t > level ? 1.0 / std::sqrt(t) : 0.0;
      });
  ModuleVector xb = x * b;
  const Projection p = Projection::certify(indicator_above(a, level));
  return NormalizeResult{std::move(xb), p, level};
}

std::vector<ModuleVector> complement_basis(
    const GridPtr& grid, int truncation,
    const std::vector<ModuleVector>& generators, int count,
    const std::vector<double>& eps_schedule) {
  if (count < 0) throw std::invalid_argument("complement: negative count");
  for (double e : eps_schedule)
    if (!(e > 0.0))
      throw std::invalid_argument("complement: eps schedule must be positive");
  require_orthonormalized(generators, 1e-8, "complement");
  for (const ModuleVector& gen : generators)
    if (!same_grid(gen.grid(), grid) || gen.truncation() != truncation)
      throw std::invalid_argument("complement: generator shape mismatch");

  const std::size_t npts = grid->size();
  // Per fiber: orthonormal basis of the complement of the generator span.
  std::vector<Mat> complement(npts);
  parallel_for(npts, [&](std::size_t g) {
    const int n = grid->dim(g);
    const Eigen::Index dim = Eigen::Index(truncation) * n;
    Mat projector = Mat::Zero(dim, dim);
    for (const ModuleVector& gen : generators)
      projector += gen.fiber(g) * gen.fiber(g).adjoint();
    Mat candidates = Mat::Identity(dim, dim) - projector;
    complement[g] = orthonormal_columns(candidates, 1e-9);
  });

  std::vector<ModuleVector> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    std::vector<Mat> fibers(npts);
    bool nonzero = false;
    for (std::size_t g = 0; g < npts; ++g) {
      const int n = grid->dim(g);
      const Eigen::Index dim = Eigen::Index(truncation) * n;
      fibers[g] = Mat::Zero(dim, n);
      const Eigen::Index lo = Eigen::Index(i) * n;
      const Eigen::Index avail =
          std::min<Eigen::Index>(n, complement[g].cols() - lo);
      if (avail > 0) {
        fibers[g].leftCols(avail) = complement[g].middleCols(lo, avail);
        nonzero = true;
      }
    }
    if (!nonzero)
      throw std::runtime_error(
          "complement: residual rank exhausted after " + std::to_string(i) +
          " vectors, requested " + std::to_string(count));
    out.emplace_back(grid, truncation, std::move(fibers));
  }
  return out;
}

TailProfile tail_profile(const ModuleVector& x) {
  const int truncation = x.truncation();
  TailProfile profile;
  profile.sup_tails.assign(truncation, 0.0);
  profile.trace_tails.assign(truncation, 0.0);
  // Index convention: t_m covers coordinates beyond the first m, i.e.
  // 0-based blocks m..N-1, so t_0 = ||<x,x>||.
  for (std::size_t g = 0; g < x.points(); ++g) {
    const int n = x.grid()->dim(g);
    const double mass = x.grid()->weight(g) / double(n);
    Mat tail = Mat::Zero(n, n);
    for (int m = truncation - 1; m >= 0; --m) {
      const Mat blk = x.block(g, m);
      tail += blk.adjoint() * blk;
      profile.sup_tails[m] = std::max(profile.sup_tails[m], spectral_norm(tail));
      profile.trace_tails[m] += mass * tail.trace().real();
    }
  }

  constexpr double kDecayThreshold = 1e-6;
  for (int m = 0; m < truncation; ++m) {
    if (profile.sup_tails[m] <= kDecayThreshold) {
      profile.decay_index = m;
      profile.h_like = true;
      break;
    }
  }
  return profile;
}

std::string TailProfile::verdict() const {
  return h_like ? "H-like" : "H*-only at this truncation";
}

} // namespace modspec
