// SPDX-License-Identifier: Apache-2.0
#include "modspec/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "modspec/parallel.hpp"

namespace modspec {

namespace {

void require_same_grid(const AlgebraField& a, const AlgebraField& b,
                       const char* what) {
  if (!same_grid(a.grid(), b.grid()))
    throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

} // namespace

AlgebraField::AlgebraField(GridPtr grid, std::vector<Mat> fibers)
    : grid_(std::move(grid)), fibers_(std::move(fibers)) {
  if (!grid_) throw std::invalid_argument("field: null grid");
  if (fibers_.size() != grid_->size())
    throw std::invalid_argument("field: fiber count does not match grid");
  for (std::size_t g = 0; g < fibers_.size(); ++g) {
    const int n = grid_->dim(g);
    if (fibers_[g].rows() != n || fibers_[g].cols() != n)
      throw std::invalid_argument("field: fiber shape mismatch at point " +
                                  std::to_string(g));
  }
}

AlgebraField AlgebraField::zeros(const GridPtr& grid) {
  std::vector<Mat> fibers(grid->size());
  for (std::size_t g = 0; g < grid->size(); ++g)
    fibers[g] = Mat::Zero(grid->dim(g), grid->dim(g));
  return AlgebraField(grid, std::move(fibers));
}

AlgebraField AlgebraField::identity(const GridPtr& grid) {
  std::vector<Mat> fibers(grid->size());
  for (std::size_t g = 0; g < grid->size(); ++g)
    fibers[g] = Mat::Identity(grid->dim(g), grid->dim(g));
  return AlgebraField(grid, std::move(fibers));
}

AlgebraField AlgebraField::scalar(const GridPtr& grid,
                                  const std::vector<double>& values) {
  if (values.size() != grid->size())
    throw std::invalid_argument("scalar field: value count mismatch");
  std::vector<Mat> fibers(grid->size());
  for (std::size_t g = 0; g < grid->size(); ++g)
    fibers[g] = values[g] * Mat::Identity(grid->dim(g), grid->dim(g));
  return AlgebraField(grid, std::move(fibers));
}

AlgebraField AlgebraField::constant(const GridPtr& grid, double value) {
  return scalar(grid, std::vector<double>(grid->size(), value));
}

AlgebraField AlgebraField::adjoint() const {
  std::vector<Mat> fibers(fibers_.size());
  for (std::size_t g = 0; g < fibers_.size(); ++g)
    fibers[g] = fibers_[g].adjoint();
  return AlgebraField(grid_, std::move(fibers));
}

AlgebraField operator+(const AlgebraField& a, const AlgebraField& b) {
  require_same_grid(a, b, "field sum");
  std::vector<Mat> fibers(a.points());
  for (std::size_t g = 0; g < a.points(); ++g) fibers[g] = a.fiber(g) + b.fiber(g);
  return AlgebraField(a.grid(), std::move(fibers));
}

AlgebraField operator-(const AlgebraField& a, const AlgebraField& b) {
  require_same_grid(a, b, "field difference");
  std::vector<Mat> fibers(a.points());
  for (std::size_t g = 0; g < a.points(); ++g) fibers[g] = a.fiber(g) - b.fiber(g);
  return AlgebraField(a.grid(), std::move(fibers));
}

AlgebraField operator*(const AlgebraField& a, const AlgebraField& b) {
  require_same_grid(a, b, "field product");
  std::vector<Mat> fibers(a.points());
  for (std::size_t g = 0; g < a.points(); ++g) fibers[g] = a.fiber(g) * b.fiber(g);
  return AlgebraField(a.grid(), std::move(fibers));
}

AlgebraField operator*(Complex s, const AlgebraField& a) {
  std::vector<Mat> fibers(a.points());
  for (std::size_t g = 0; g < a.points(); ++g) fibers[g] = s * a.fiber(g);
  return AlgebraField(a.grid(), std::move(fibers));
}

double sup_norm(const AlgebraField& a) {
  double best = 0.0;
  for (std::size_t g = 0; g < a.points(); ++g)
    best = std::max(best, spectral_norm(a.fiber(g)));
  return best;
}

double hermitian_defect(const AlgebraField& a) {
  double best = 0.0;
  for (std::size_t g = 0; g < a.points(); ++g)
    best = std::max(best, hermitian_defect(a.fiber(g)));
  return best;
}

bool is_hermitian(const AlgebraField& a, double tol) {
  return hermitian_defect(a) <= tol;
}

double min_eigenvalue(const AlgebraField& a) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < a.points(); ++g)
    best = std::min(best, herm_eig(a.fiber(g)).values.minCoeff());
  return best;
}

Complex trace_tau(const AlgebraField& a) {
  Complex sum = 0.0;
  for (std::size_t g = 0; g < a.points(); ++g)
    sum += a.grid()->weight(g) * a.fiber(g).trace() /
           double(a.grid()->dim(g));
  return sum;
}

AlgebraField center_trace(const AlgebraField& a) {
  std::vector<Mat> fibers(a.points());
  for (std::size_t g = 0; g < a.points(); ++g) {
    const int n = a.grid()->dim(g);
    fibers[g] = (a.fiber(g).trace() / double(n)) * Mat::Identity(n, n);
  }
  return AlgebraField(a.grid(), std::move(fibers));
}

AlgebraField functional_calculus(const AlgebraField& a,
                                 const std::function<double(double)>& f) {
  if (!is_hermitian(a))
    throw std::invalid_argument("functional_calculus: input is not Hermitian");
  std::vector<Mat> fibers(a.points());
  parallel_for(a.points(), [&](std::size_t g) {
    const HermEig eig = herm_eig(a.fiber(g));
    RVec mapped(eig.values.size());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
      mapped(i) = f(eig.values(i));
    fibers[g] = eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
  });
  return AlgebraField(a.grid(), std::move(fibers));
}

AlgebraField indicator_above(const AlgebraField& a, double level) {
  return functional_calculus(
      a, [level](double t) { return t > level ? 1.0 : 0.0; });
}

Projection Projection::certify(const AlgebraField& a) {
  const double herm = hermitian_defect(a);
  if (herm > 1e-12)
    throw std::invalid_argument("projection: Hermitian defect " +
                                std::to_string(herm));
  const double idem = sup_norm(a * a - a);
  if (idem > 1e-10)
    throw std::invalid_argument("projection: idempotence defect " +
                                std::to_string(idem));
  for (std::size_t g = 0; g < a.points(); ++g) {
    const HermEig eig = herm_eig(a.fiber(g));
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      const double e = eig.values(i);
      if (std::abs(e - std::round(e)) > 1e-8)
        throw std::invalid_argument("projection: eigenvalue " +
                                    std::to_string(e) + " not in {0,1}");
    }
  }
  return Projection(a);
}

int Projection::rank(std::size_t g) const {
  return int(std::lround(field_.fiber(g).trace().real()));
}

CutoffScan cutoff_scan(const AlgebraField& a, double eps) {
  // Spectral measure of a: eigenvalue s at point g carries mass mu(g)/n(g).
  std::vector<std::pair<double, double>> spectrum;  // (value, mass)
  for (std::size_t g = 0; g < a.points(); ++g) {
    const HermEig eig = herm_eig(a.fiber(g));
    const double mass = a.grid()->weight(g) / double(a.grid()->dim(g));
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
      spectrum.emplace_back(eig.values(i), mass);
  }
  std::sort(spectrum.begin(), spectrum.end());

  std::vector<double> candidates;
  candidates.push_back(0.5);
  for (std::size_t i = 0; i + 1 < spectrum.size(); ++i) {
    const double lo = spectrum[i].first, hi = spectrum[i + 1].first;
    if (hi - lo > 1e-14) candidates.push_back(0.5 * (lo + hi));
  }
  if (!spectrum.empty() && spectrum.front().first > 1e-14)
    candidates.push_back(0.5 * spectrum.front().first);
  std::sort(candidates.begin(), candidates.end());

  CutoffScan best;
  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
    const double level = *it;
    if (!(level > 0.0) || level >= 1.0) continue;
    double mass_above = 0.0;
    for (const auto& [value, mass] : spectrum)
      if (value > level) mass_above += mass;
    best.achieved_trace = std::max(best.achieved_trace, mass_above);
    if (mass_above > 1.0 - eps) {
      best.ok = true;
      best.level = level;
      best.achieved_trace = mass_above;
      return best;
    }
  }
  return best;
}

CutoffResult cutoff_projection(const AlgebraField& a, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("cutoff: eps must lie in (0,1)");
  if (!is_hermitian(a))
    throw std::invalid_argument("cutoff: input is not Hermitian");
  if (min_eigenvalue(a) < -1e-10)
    throw std::invalid_argument("cutoff: input is not positive");
  if (sup_norm(a) > 1.0 + 1e-10)
    throw std::invalid_argument("cutoff: input is not a contraction");
  const double tau = trace_tau(a).real();
  const bool hypothesis_ok = tau > 1.0 - eps / 2.0;
  const CutoffScan scan = cutoff_scan(a, eps);
  if (!scan.ok) {
    std::string message =
        "cutoff: no cut level met the trace bound, best achievable trace " +
        std::to_string(scan.achieved_trace);
    if (!hypothesis_ok)
      message += " (trace hypothesis also violated: trace_tau(a) = " +
                 std::to_string(tau) + " <= 1 - eps/2)";
    throw std::runtime_error(message);
  }
  return CutoffResult{Projection::certify(indicator_above(a, scan.level)),
                      scan.level, hypothesis_ok, tau};
}

std::pair<Projection, Projection> lattice_join_meet(const Projection& p,
                                                    const Projection& q) {
  if (!same_grid(p.grid(), q.grid()))
    throw std::invalid_argument("lattice: grid mismatch");
  const GridPtr& grid = p.grid();
  std::vector<Mat> join(grid->size()), meet(grid->size());
  parallel_for(grid->size(), [&](std::size_t g) {
    const int n = grid->dim(g);
    const Mat id = Mat::Identity(n, n);
    Mat stacked(n, 2 * n);
    stacked << p.field().fiber(g), q.field().fiber(g);
    const Mat bj = range_basis(stacked, 1e-10);
    join[g] = bj * bj.adjoint();
    // Meet through the complement identity p ∧ q = 1 - ((1-p) ∨ (1-q)).
    Mat stacked_c(n, 2 * n);
    stacked_c << id - p.field().fiber(g), id - q.field().fiber(g);
    const Mat bc = range_basis(stacked_c, 1e-10);
    meet[g] = id - bc * bc.adjoint();
  });
  return {Projection::certify(AlgebraField(grid, std::move(join))),
          Projection::certify(AlgebraField(grid, std::move(meet)))};
}

SpliceResult equivalent_subprojection(const Projection& q, const Projection& p) {
  if (!same_grid(p.grid(), q.grid()))
    throw std::invalid_argument("splice: grid mismatch");
  const GridPtr& grid = p.grid();
  for (std::size_t g = 0; g < grid->size(); ++g)
    if (q.rank(g) > p.rank(g))
      throw std::invalid_argument(
          "splice: rank(q) exceeds rank(p) at point " + std::to_string(g));

  std::vector<Mat> sub(grid->size()), uni(grid->size());
  parallel_for(grid->size(), [&](std::size_t g) {
    const int n = grid->dim(g);
    const Mat& qf = q.field().fiber(g);
    const Mat& pf = p.field().fiber(g);
    if (spectral_norm(pf * qf - qf) <= 1e-10) {
      sub[g] = qf;
      uni[g] = Mat::Identity(n, n);
      return;
    }
    const int r = q.rank(g);
    const Mat v = range_basis(qf, 1e-8).leftCols(r);
    const Mat w = range_basis(pf, 1e-8).leftCols(r);
    const Mat vfull = complete_onb(v, n);
    const Mat wfull = complete_onb(w, n);
    uni[g] = vfull * wfull.adjoint();
    sub[g] = uni[g].adjoint() * qf * uni[g];
  });
  return SpliceResult{Projection::certify(AlgebraField(grid, std::move(sub))),
                      AlgebraField(grid, std::move(uni))};
}

} // namespace modspec
