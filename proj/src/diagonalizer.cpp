// SPDX-License-Identifier: Apache-2.0
#include "modspec/diagonalizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "modspec/parallel.hpp"

namespace modspec {

namespace {

constexpr double kTieScale = 1e-9;
constexpr double kRankTol = 1e-9;

double tie_tolerance(const RVec& values) {
  const double scale =
      values.size() == 0 ? 1.0 : std::max(std::abs(values(0)),
                                          std::abs(values(values.size() - 1)));
  return kTieScale * std::max(1.0, scale);
}

// floor(target * n) with a nudge so exact rational targets stay exact.
int strict_count_cap(double target, int n) {
  return int(std::floor(target * n + kRankTol));
}

int rank_target(double target, int n, bool* exact) {
  const double ideal = target * n;
  const int r = int(std::lround(ideal));
  if (exact) *exact = std::abs(ideal - r) <= kRankTol;
  return r;
}

// Indices of eigenvalues strictly above / at the cut level.
struct CutSplit {
  std::vector<int> strict;
  std::vector<int> boundary;
};
CutSplit split_at_level(const RVec& values, double level) {
  CutSplit split;
  const double tie = tie_tolerance(values);
  for (int i = 0; i < values.size(); ++i) {
    if (values(i) > level + tie)
      split.strict.push_back(i);
    else if (std::abs(values(i) - level) <= tie)
      split.boundary.push_back(i);
  }
  return split;
}

std::vector<int> choose_selected(const CutSplit& split, int rank,
                                 BoundaryFill fill) {
  std::vector<int> selected = split.strict;
  std::vector<int> boundary = split.boundary;
  if (fill == BoundaryFill::descending)
    std::reverse(boundary.begin(), boundary.end());
  for (int idx : boundary) {
    if (int(selected.size()) >= rank) break;
    selected.push_back(idx);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

Mat projector_from_columns(const Mat& vectors, const std::vector<int>& cols) {
  Mat p = Mat::Zero(vectors.rows(), vectors.rows());
  for (int idx : cols) p += vectors.col(idx) * vectors.col(idx).adjoint();
  return p;
}

// Unitary alignment of the current frame against the previous fiber's; a
// singular overlap (crossing) leaves the raw eigensolver output in place.
void gauge_pass(std::vector<Mat>& frames) {
  for (std::size_t g = 1; g < frames.size(); ++g) {
    if (frames[g].cols() == 0 || frames[g].cols() != frames[g - 1].cols() ||
        frames[g].rows() != frames[g - 1].rows())
      continue;
    const Mat overlap = frames[g].adjoint() * frames[g - 1];
    Eigen::JacobiSVD<Mat> svd(overlap,
                              Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues().size() == 0 ||
        svd.singularValues()(svd.singularValues().size() - 1) < 0.1)
      continue;
    frames[g] = frames[g] * (svd.matrixU() * svd.matrixV().adjoint());
  }
}

std::vector<double> active_spectrum(const AlgebraField& lambda,
                                    const Projection& p, std::size_t g) {
  const HermEig eig = herm_eig(lambda.fiber(g));
  const int n = int(eig.values.size());
  const int drop = n - p.rank(g);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(eig.values(a)) < std::abs(eig.values(b));
  });
  std::vector<double> out;
  for (int i = drop; i < n; ++i) out.push_back(eig.values(order[i]));
  std::sort(out.begin(), out.end());
  return out;
}

void require_hermitian_operator(const ModuleOperator& k, const char* what) {
  const double defect = hermitian_defect(k);
  if (defect > 1e-12)
    throw std::invalid_argument(std::string(what) + ": Hermitian defect " +
                                std::to_string(defect));
}

} // namespace

std::vector<double> term_spectrum(const SpectralTerm& term, std::size_t g) {
  return active_spectrum(term.lambda, term.p, g);
}

double counting_function(const ModuleOperator& k, std::size_t g, double level) {
  if (std::isnan(level))
    throw std::invalid_argument("counting_function: NaN level");
  const HermEig eig = herm_eig(k.fiber(g));
  int count = 0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) > level) ++count;
  return double(count) / double(k.grid()->dim(g));
}

std::vector<double> cut_levels(const ModuleOperator& k, double target) {
  if (!(target > 0.0))
    throw std::invalid_argument("cut_levels: target must be positive");
  std::vector<double> levels(k.points());
  parallel_for(k.points(), [&](std::size_t g) {
    const HermEig eig = herm_eig(k.fiber(g));
    const int dim = int(eig.values.size());
    const int cap = strict_count_cap(target, k.grid()->dim(g));
    // Values ascend; the (cap+1)-th largest realizes the infimum.
    const int idx = std::max(0, dim - 1 - cap);
    levels[g] = eig.values(idx);
  });
  return levels;
}

AlgebraField cut_level_field(const ModuleOperator& k, double target) {
  return AlgebraField::scalar(k.grid(), cut_levels(k, target));
}

SandwichProjections sandwich_projections(const ModuleOperator& k,
                                         const std::vector<double>& levels,
                                         double target, BoundaryFill fill) {
  require_hermitian_operator(k, "sandwich");
  if (levels.size() != k.points())
    throw std::invalid_argument("sandwich: level count mismatch");
  const GridPtr& grid = k.grid();
  std::vector<Mat> strict(k.points()), closed(k.points()), chosen(k.points());
  std::vector<char> rounded(k.points(), 0);
  parallel_for(k.points(), [&](std::size_t g) {
    const HermEig eig = herm_eig(k.fiber(g));
    const CutSplit split = split_at_level(eig.values, levels[g]);
    bool exact = true;
    const int rank = rank_target(target, grid->dim(g), &exact);
    rounded[g] = exact ? 0 : 1;
    const std::vector<int> selected = choose_selected(split, rank, fill);
    strict[g] = projector_from_columns(eig.vectors, split.strict);
    std::vector<int> all = split.strict;
    all.insert(all.end(), split.boundary.begin(), split.boundary.end());
    closed[g] = projector_from_columns(eig.vectors, all);
    chosen[g] = projector_from_columns(eig.vectors, selected);
  });
  SandwichProjections out{
      ModuleOperator(grid, k.truncation(), std::move(strict)),
      ModuleOperator(grid, k.truncation(), std::move(closed)),
      ModuleOperator(grid, k.truncation(), std::move(chosen)),
      true,
      {}};
  for (std::size_t g = 0; g < k.points(); ++g)
    if (rounded[g]) {
      out.exact_rank = false;
      out.rounded_points.push_back(g);
    }
  return out;
}

namespace {

// Shared tail of eigenpair extraction: pad the frame to n columns, gauge
// align, then form lambda, the inner square and the residual.
Eigenpair finish_extraction(const ModuleOperator& k, std::vector<Mat> frames,
                            bool gauge_align) {
  const GridPtr& grid = k.grid();
  const int truncation = k.truncation();
  if (gauge_align) gauge_pass(frames);
  std::vector<Mat> xs(k.points()), lambdas(k.points());
  std::vector<double> residuals(k.points(), 0.0);
  parallel_for(k.points(), [&](std::size_t g) {
    const int n = grid->dim(g);
    Mat padded = Mat::Zero(Eigen::Index(truncation) * n, n);
    padded.leftCols(frames[g].cols()) = frames[g];
    lambdas[g] = padded.adjoint() * (k.fiber(g) * padded);
    residuals[g] = spectral_norm(k.fiber(g) * padded - padded * lambdas[g]);
    xs[g] = std::move(padded);
  });
  ModuleVector x(grid, truncation, std::move(xs));
  AlgebraField lambda(grid, std::move(lambdas));
  Projection p = Projection::certify(inner(x, x));
  double residual = 0.0;
  for (double r : residuals) residual = std::max(residual, r);
  return Eigenpair{std::move(x), std::move(lambda), std::move(p), residual};
}

} // namespace

Eigenpair extract_eigenpair(const ModuleOperator& k, const ModuleOperator& p,
                            bool gauge_align) {
  require_hermitian_operator(k, "extract");
  if (!same_grid(k.grid(), p.grid()) || k.truncation() != p.truncation())
    throw std::invalid_argument("extract: shape mismatch");
  std::vector<Mat> frames(k.points());
  parallel_for(k.points(), [&](std::size_t g) {
    const int n = k.grid()->dim(g);
    const HermEig eig = herm_eig(p.fiber(g));
    std::vector<int> cols;
    for (int i = 0; i < eig.values.size(); ++i)
      if (eig.values(i) > 0.5) cols.push_back(i);
    if (int(cols.size()) > n)
      throw std::invalid_argument(
          "extract: projection rank exceeds fiber dimension");
    Mat frame(eig.vectors.rows(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      frame.col(j) = eig.vectors.col(cols[j]);
    frames[g] = std::move(frame);
  });
  return finish_extraction(k, std::move(frames), gauge_align);
}

bool DecompositionCertificates::pass() const {
  return orthonormality_defect <= 1e-8 && max_residual <= 1e-7 &&
         ordering_violation <= 1e-8 && separation_violation <= 1e-8 &&
         (!positive_contract || decay_violation <= 1e-9) && exact_rank;
}

std::string DecompositionCertificates::summary() const {
  std::ostringstream os;
  os << "orthonormality defect: " << orthonormality_defect
     << (orthonormality_defect <= 1e-8 ? "  [ok]\n" : "  [violated]\n");
  os << "max residual:          " << max_residual
     << (max_residual <= 1e-7 ? "  [ok]\n" : "  [violated]\n");
  os << "operator ordering:     " << ordering_violation
     << (ordering_violation <= 1e-8 ? "  [ok]\n" : "  [violated]\n");
  os << "separation:            " << separation_violation
     << (separation_violation <= 1e-8 ? "  [ok]\n" : "  [violated]\n");
  if (positive_contract)
    os << "norm decay:            " << decay_violation
       << (decay_violation <= 1e-9 ? "  [ok]\n" : "  [violated]\n");
  else
    os << "norm decay:            n/a (operator not positive)\n";
  os << "rank targets exact:    " << (exact_rank ? "yes" : "no") << "\n";
  os << "overall:               " << (pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

SpectralDecomposition diagonalize(const ModuleOperator& k, int max_terms,
                                  double target, BoundaryFill fill,
                                  bool gauge_align) {
  require_hermitian_operator(k, "diagonalize");
  if (!(target > 0.0))
    throw std::invalid_argument("diagonalize: target must be positive");
  const GridPtr& grid = k.grid();
  const std::size_t npts = grid->size();
  const int truncation = k.truncation();

  DecompositionCertificates certs;
  certs.positive_contract = min_eigenvalue(k) > -1e-10;

  // Rank removed per term and the number of terms the budget allows.
  int capacity = std::numeric_limits<int>::max();
  std::vector<int> ranks(npts);
  for (std::size_t g = 0; g < npts; ++g) {
    bool exact = true;
    ranks[g] = rank_target(target, grid->dim(g), &exact);
    if (!exact) certs.exact_rank = false;
    if (ranks[g] < 1)
      throw std::invalid_argument("diagonalize: target selects empty rank");
    capacity = std::min(capacity,
                        truncation * grid->dim(g) / ranks[g]);
  }
  if (max_terms < 0) max_terms = capacity;
  if (max_terms > capacity)
    throw std::invalid_argument("diagonalize: max_terms " +
                                std::to_string(max_terms) +
                                " exceeds rank budget " +
                                std::to_string(capacity));

  // Per-fiber deflation state: embedding into the original module and the
  // compressed operator on the running orthogonal complement.
  std::vector<Mat> embed(npts), compressed(npts);
  for (std::size_t g = 0; g < npts; ++g) {
    const Eigen::Index dim = Eigen::Index(truncation) * grid->dim(g);
    embed[g] = Mat::Identity(dim, dim);
    compressed[g] = k.fiber(g);
  }

  std::vector<SpectralTerm> terms;
  terms.reserve(max_terms);
  for (int t = 0; t < max_terms; ++t) {
    std::vector<Mat> frames(npts);
    std::vector<double> levels(npts);
    parallel_for(npts, [&](std::size_t g) {
      const int n = grid->dim(g);
      const HermEig eig = herm_eig(compressed[g]);
      const int dim = int(eig.values.size());
      const int cap = strict_count_cap(target, n);
      levels[g] = eig.values(std::max(0, dim - 1 - cap));
      const CutSplit split = split_at_level(eig.values, levels[g]);
      const std::vector<int> selected = choose_selected(split, ranks[g], fill);
      Mat sel(dim, selected.size());
      for (std::size_t j = 0; j < selected.size(); ++j)
        sel.col(j) = eig.vectors.col(selected[j]);
      frames[g] = embed[g] * sel;
      // Deflate: the unselected eigenvectors span the complement.
      std::vector<int> rest;
      rest.reserve(dim - int(selected.size()));
      for (int i = 0; i < dim; ++i)
        if (!std::binary_search(selected.begin(), selected.end(), i))
          rest.push_back(i);
      Mat comp(dim, rest.size());
      for (std::size_t j = 0; j < rest.size(); ++j)
        comp.col(j) = eig.vectors.col(rest[j]);
      compressed[g] = comp.adjoint() * compressed[g] * comp;
      embed[g] = embed[g] * comp;
    });
    Eigenpair pair = finish_extraction(k, std::move(frames), gauge_align);
    certs.max_residual = std::max(certs.max_residual, pair.residual);
    terms.push_back(SpectralTerm{std::move(pair.x), std::move(pair.lambda),
                                 std::move(pair.inner_square), levels,
                                 pair.residual});
  }

  // Certificates over the assembled terms.
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i + 1; j < terms.size(); ++j)
      certs.orthonormality_defect =
          std::max(certs.orthonormality_defect,
                   sup_norm(inner(terms[i].x, terms[j].x)));
  for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
    const AlgebraField diff = terms[i].lambda - terms[i + 1].lambda;
    certs.ordering_violation =
        std::max(certs.ordering_violation, std::max(0.0, -min_eigenvalue(diff)));
    certs.decay_violation = std::max(
        certs.decay_violation,
        sup_norm(terms[i + 1].lambda) - sup_norm(terms[i].lambda));
  }
  certs.decay_violation = std::max(0.0, certs.decay_violation);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t g = 0; g < npts; ++g) {
      const std::vector<double> spec =
          active_spectrum(terms[i].lambda, terms[i].p, g);
      if (spec.empty()) continue;
      const double d = terms[i].separation[g];
      certs.separation_violation =
          std::max(certs.separation_violation, d - spec.front());
      if (i + 1 < terms.size()) {
        const std::vector<double> next =
            active_spectrum(terms[i + 1].lambda, terms[i + 1].p, g);
        if (!next.empty())
          certs.separation_violation =
              std::max(certs.separation_violation, next.back() - d);
      }
    }
  }
  certs.separation_violation = std::max(0.0, certs.separation_violation);

  return SpectralDecomposition(grid, truncation, std::move(terms), certs);
}

SignSplit sign_split(const ModuleOperator& k) {
  require_hermitian_operator(k, "sign_split");
  constexpr double kKernelTol = 1e-10;
  std::vector<Mat> plus(k.points()), zero(k.points()), minus(k.points());
  parallel_for(k.points(), [&](std::size_t g) {
    const HermEig eig = herm_eig(k.fiber(g));
    std::vector<int> pos, ker, neg;
    for (int i = 0; i < eig.values.size(); ++i) {
      if (eig.values(i) > kKernelTol)
        pos.push_back(i);
      else if (eig.values(i) < -kKernelTol)
        neg.push_back(i);
      else
        ker.push_back(i);
    }
    plus[g] = projector_from_columns(eig.vectors, pos);
    zero[g] = projector_from_columns(eig.vectors, ker);
    minus[g] = projector_from_columns(eig.vectors, neg);
  });
  return SignSplit{ModuleOperator(k.grid(), k.truncation(), std::move(plus)),
                   ModuleOperator(k.grid(), k.truncation(), std::move(zero)),
                   ModuleOperator(k.grid(), k.truncation(), std::move(minus))};
}

namespace {

// Spectral separation hypothesis of the uniqueness statement:
// min Sp lambda_i >= max Sp lambda_{i+1} per fiber, up to 1e-8.
bool separation_hypothesis(const SpectralDecomposition& dec, double tol) {
  const auto& terms = dec.terms();
  for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
    for (std::size_t g = 0; g < dec.grid()->size(); ++g) {
      const auto cur = active_spectrum(terms[i].lambda, terms[i].p, g);
      const auto next = active_spectrum(terms[i + 1].lambda, terms[i + 1].p, g);
      if (cur.empty() || next.empty()) continue;
      if (cur.front() < next.back() - tol) return false;
    }
  }
  return true;
}

} // namespace

CompareReport compare_ordered(const SpectralDecomposition& a,
                              const SpectralDecomposition& b) {
  CompareReport report;
  if (!same_grid(a.grid(), b.grid())) {
    report.refused = true;
    report.reason = "grid mismatch";
    return report;
  }
  if (!separation_hypothesis(a, 1e-8) || !separation_hypothesis(b, 1e-8)) {
    report.refused = true;
    report.reason = "spectral separation hypothesis fails; ordered "
                    "uniqueness does not apply";
    return report;
  }
  if (a.terms().size() != b.terms().size()) {
    report.pass = false;
    report.reason = "term count mismatch";
    report.term = int(std::min(a.terms().size(), b.terms().size()));
    return report;
  }
  report.pass = true;
  for (std::size_t i = 0; i < a.terms().size(); ++i) {
    for (std::size_t g = 0; g < a.grid()->size(); ++g) {
      const auto sa = active_spectrum(a.terms()[i].lambda, a.terms()[i].p, g);
      const auto sb = active_spectrum(b.terms()[i].lambda, b.terms()[i].p, g);
      double dev;
      if (sa.size() != sb.size()) {
        dev = std::numeric_limits<double>::infinity();
      } else {
        dev = 0.0;
        for (std::size_t j = 0; j < sa.size(); ++j)
          dev = std::max(dev, std::abs(sa[j] - sb[j]));
      }
      if (dev > report.max_deviation) {
        report.max_deviation = dev;
        if (dev > 1e-7 && report.term < 0) {
          report.term = int(i);
          report.point = long(g);
        }
      }
    }
  }
  if (report.max_deviation > 1e-7) {
    report.pass = false;
    report.reason = "sorted spectra deviate";
  }
  return report;
}

std::vector<double> compactness_profile(const ModuleOperator& k) {
  const int truncation = k.truncation();
  std::vector<double> profile(truncation + 1, 0.0);
  std::vector<std::vector<double>> per_fiber(k.points());
  parallel_for(k.points(), [&](std::size_t g) {
    const int n = k.grid()->dim(g);
    per_fiber[g].assign(truncation + 1, 0.0);
    for (int m = 0; m <= truncation; ++m) {
      const Eigen::Index cols = Eigen::Index(truncation - m) * n;
      if (cols == 0) break;
      per_fiber[g][m] = spectral_norm(k.fiber(g).rightCols(cols));
    }
  });
  for (int m = 0; m <= truncation; ++m)
    for (std::size_t g = 0; g < k.points(); ++g)
      profile[m] = std::max(profile[m], per_fiber[g][m]);
  return profile;
}

BandEigenpair extract_band(const ModuleOperator& k, double lo, double hi,
                           double target, BoundaryFill fill, bool gauge_align) {
  require_hermitian_operator(k, "extract_band");
  if (!(lo < hi)) throw std::invalid_argument("extract_band: empty window");
  const GridPtr& grid = k.grid();
  std::vector<Mat> frames(k.points());
  std::vector<int> counts(k.points(), 0);
  parallel_for(k.points(), [&](std::size_t g) {
    const int n = grid->dim(g);
    bool exact = true;
    const int rank = rank_target(target, n, &exact);
    if (!exact)
      throw std::invalid_argument("extract_band: target*n is not an integer");
    const HermEig eig = herm_eig(k.fiber(g));
    std::vector<int> window;
    for (int i = 0; i < eig.values.size(); ++i)
      if (eig.values(i) > lo && eig.values(i) < hi) window.push_back(i);
    counts[g] = int(window.size());
    if (int(window.size()) < rank)
      throw std::runtime_error("extract_band: window holds " +
                               std::to_string(window.size()) +
                               " eigenvalues, need " + std::to_string(rank));
    if (fill == BoundaryFill::descending)
      std::reverse(window.begin(), window.end());
    window.resize(rank);
    std::sort(window.begin(), window.end());
    Mat frame(eig.vectors.rows(), rank);
    for (int j = 0; j < rank; ++j) frame.col(j) = eig.vectors.col(window[j]);
    frames[g] = std::move(frame);
  });
  Eigenpair pair = finish_extraction(k, std::move(frames), gauge_align);
  return BandEigenpair{std::move(pair), std::move(counts)};
}

} // namespace modspec
