// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "modspec/module_operator.hpp"

namespace modspec {

/// Order in which degenerate boundary eigenvectors fill the chosen
/// projection between the strict and closed spectral indicators. Ascending
/// eigendecomposition index is the deterministic default; descending exists
/// to exercise the ordering-uniqueness comparison.
enum class BoundaryFill { ascending, descending };

/// Trace-weighted count of fiber eigenvalues strictly above `level`:
/// #{eig(K(g)) > level} / n(g). Right-continuous and non-increasing in
/// `level`. Rejects NaN levels.
double counting_function(const ModuleOperator& k, std::size_t g, double level);

/// Per-fiber cut levels: the infimum over the finite spectrum of levels at
/// which the counting function drops to `target`. With scalar fibers and
/// target 1 this is the second largest eigenvalue.
std::vector<double> cut_levels(const ModuleOperator& k, double target);

/// Same cut packaged as a scalar algebra field.
AlgebraField cut_level_field(const ModuleOperator& k, double target);

/// Spectral bracket at the cut: `strict` indicates eigenvalues strictly
/// above the cut level, `closed` includes the boundary eigenspace, and
/// `chosen` fills the boundary deterministically until the fiber rank
/// equals target * n(g). All three commute with K. When target * n(g) is
/// not an integer the fiber is recorded and the nearest integer is used.
struct SandwichProjections {
  ModuleOperator strict;
  ModuleOperator closed;
  ModuleOperator chosen;
  bool exact_rank = true;
  std::vector<std::size_t> rounded_points;
};
SandwichProjections sandwich_projections(const ModuleOperator& k,
                                         const std::vector<double>& levels,
                                         double target,
                                         BoundaryFill fill = BoundaryFill::ascending);

/// Generator of the range of a rank-(target*n) spectral projection together
/// with the operator eigenvalue lambda = <x, K x>. When the projection has
/// full fiber rank n the inner square is the identity; lower ranks yield a
/// projection inner square (zero-padded generator columns).
struct Eigenpair {
  ModuleVector x;
  AlgebraField lambda;
  Projection inner_square;
  double residual;  // sup_g || K x - x lambda ||
};
Eigenpair extract_eigenpair(const ModuleOperator& k, const ModuleOperator& p,
                            bool gauge_align = true);

/// One extracted term of a spectral decomposition.
struct SpectralTerm {
  ModuleVector x;
  AlgebraField lambda;
  Projection p;                    // <x, x>
  std::vector<double> separation;  // cut level d_i(g) per fiber
  double residual;
};

/// Sorted eigenvalues of lambda(g) with the kernel padding of a
/// rank-deficient inner square removed (n - rank(p) entries of smallest
/// magnitude are dropped). Equals the full sorted fiber spectrum when the
/// inner square is the identity.
std::vector<double> term_spectrum(const SpectralTerm& term, std::size_t g);

struct DecompositionCertificates {
  double orthonormality_defect = 0.0;  // max ||<x_i,x_j>||, i != j
  double max_residual = 0.0;
  double ordering_violation = 0.0;     // operator order lambda_i >= lambda_{i+1}
  double separation_violation = 0.0;   // min Sp lambda_i >= d_i >= max Sp lambda_{i+1}
  double decay_violation = 0.0;        // ||lambda_i|| non-increasing (positive case)
  bool positive_contract = false;      // min fiber eigenvalue > -1e-10 on entry
  bool exact_rank = true;
  bool pass() const;
  std::string summary() const;
};

class SpectralDecomposition {
 public:
  SpectralDecomposition(GridPtr grid, int truncation,
                        std::vector<SpectralTerm> terms,
                        DecompositionCertificates certificates)
      : grid_(std::move(grid)), truncation_(truncation),
        terms_(std::move(terms)), certificates_(certificates) {}

  const GridPtr& grid() const { return grid_; }
  int truncation() const { return truncation_; }
  const std::vector<SpectralTerm>& terms() const { return terms_; }
  const DecompositionCertificates& certificates() const { return certificates_; }

 private:
  GridPtr grid_;
  int truncation_;
  std::vector<SpectralTerm> terms_;
  DecompositionCertificates certificates_;
};

/// Full deflation loop: cut, bracket, extract, then compress onto the
/// orthogonal complement of the extracted generator and repeat. max_terms
/// of -1 runs until the rank budget is exhausted.
SpectralDecomposition diagonalize(const ModuleOperator& k, int max_terms = -1,
                                  double target = 1.0,
                                  BoundaryFill fill = BoundaryFill::ascending,
                                  bool gauge_align = true);

/// Spectral projections onto the positive, kernel (|eig| <= 1e-10) and
/// negative parts. The three commute with K and sum to the identity.
struct SignSplit {
  ModuleOperator plus;
  ModuleOperator zero;
  ModuleOperator minus;
};
SignSplit sign_split(const ModuleOperator& k);

/// Sorted-spectrum comparison of two ordered decompositions. Refuses unless
/// both satisfy the spectral separation hypothesis
/// min Sp lambda_i(g) >= max Sp lambda_{i+1}(g) (up to 1e-8); under it the
/// eigenvalue fields are unitarily unique, so sorted fiber spectra must
/// match within 1e-7.
struct CompareReport {
  bool refused = false;
  std::string reason;
  bool pass = false;
  double max_deviation = 0.0;
  int term = -1;
  long point = -1;
};
CompareReport compare_ordered(const SpectralDecomposition& a,
                              const SpectralDecomposition& b);

/// Restriction norms c_m = sup_g || K(g) restricted to coordinates > m ||
/// for m = 0..N; non-increasing, and decaying for compact-like operators.
std::vector<double> compactness_profile(const ModuleOperator& k);

/// Extracts a generator of (part of) the spectral subspace for the open
/// window (lo, hi): per fiber takes round(target*n) window eigenvectors in
/// fill order. Throws if a fiber's window content is smaller than that.
/// window_counts reports the number of window eigenvalues per fiber.
struct BandEigenpair {
  Eigenpair pair;
  std::vector<int> window_counts;
};
BandEigenpair extract_band(const ModuleOperator& k, double lo, double hi,
                           double target,
                           BoundaryFill fill = BoundaryFill::ascending,
                           bool gauge_align = true);

} // namespace modspec
