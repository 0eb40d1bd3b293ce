// SPDX-License-Identifier: Apache-2.0
#include "modspec/quadform.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "modspec/parallel.hpp"

namespace modspec {

QuadraticForm::QuadraticForm(ModuleOperator d) : d_(std::move(d)) {
  if (hermitian_defect(d_) > 1e-12)
    throw std::invalid_argument("quadform: operator is not Hermitian");
  norm_bound_ = sup_norm(d_);
}

double QuadraticForm::evaluate(const ModuleVector& x) const {
  if (!same_grid(d_.grid(), x.grid()) || d_.truncation() != x.truncation())
    throw std::invalid_argument("quadform: shape mismatch");
  double q = 0.0;
  for (std::size_t g = 0; g < x.points(); ++g) {
    const double mass = x.grid()->weight(g) / double(x.grid()->dim(g));
    q += mass * (x.fiber(g).adjoint() * (d_.fiber(g) * x.fiber(g)))
                    .trace()
                    .real();
  }
  return q;
}

double QuadraticForm::derivative(const ModuleVector& x,
                                 const ModuleVector& v) const {
  const AlgebraField dxv = inner(d_.apply(x), v);
  return 2.0 * trace_tau(dxv).real();
}

ModuleVector project_to_unit_ball(const ModuleVector& x) {
  const AlgebraField gram = inner(x, x);
  const AlgebraField factor = functional_calculus(
      Complex(0.5) * (gram + gram.adjoint()),
      [](double t) { return t > 1.0 ? 1.0 / std::sqrt(t) : 1.0; });
  return x * factor;
}

namespace {

ModuleVector random_start(const GridPtr& grid, int truncation,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Mat> fibers(grid->size());
  for (std::size_t g = 0; g < grid->size(); ++g) {
    const int n = grid->dim(g);
    Mat m(Eigen::Index(truncation) * n, n);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        m(r, c) = Complex(gauss(rng), gauss(rng));
    fibers[g] = m;
  }
  return project_to_unit_ball(ModuleVector(grid, truncation, std::move(fibers)));
}

} // namespace

MaximizeResult maximize_on_ball(const QuadraticForm& form, int iters,
                                double tol, std::uint64_t seed) {
  const ModuleOperator& d = form.op();
  const double floor = min_eigenvalue(d);
  if (floor <= 1e-10)
    throw std::invalid_argument(
        "maximize: operator must be positive and kernel-free, min eigenvalue " +
        std::to_string(floor));
  const double step = 1.0 / std::max(form.norm_bound(), 1e-300);

  ModuleVector x = random_start(d.grid(), d.truncation(), seed);
  double q = form.evaluate(x);
  int stationary_streak = 0;
  bool certified = false;
  int it = 0;
  for (; it < iters; ++it) {
    x = project_to_unit_ball(x + Complex(step) * d.apply(x));
    const double q_next = form.evaluate(x);
    if (std::abs(q_next - q) <= tol * std::max(1.0, std::abs(q_next)))
      ++stationary_streak;
    else
      stationary_streak = 0;
    q = q_next;
    if (stationary_streak >= 3) {
      certified = true;
      ++it;
      break;
    }
  }

  const AlgebraField gram = inner(x, x);
  const double unit_defect = sup_norm(gram - AlgebraField::identity(x.grid()));
  double projection_defect = 0.0;
  for (std::size_t g = 0; g < x.points(); ++g) {
    const HermEig eig = herm_eig(gram.fiber(g));
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      const double e = eig.values(i);
      projection_defect =
          std::max(projection_defect, std::min(std::abs(e), std::abs(e - 1.0)));
    }
  }
  const ModuleVector dx = d.apply(x);
  const double gradient_residual = norm(dx - x * inner(x, dx));
  return MaximizeResult{std::move(x),    q,                 it,
                        certified,       gradient_residual, projection_defect,
                        unit_defect};
}

InvariantReport verify_invariant_subspace(const QuadraticForm& form,
                                          const ModuleVector& x, double tol) {
  InvariantReport report;
  for (std::size_t g = 0; g < x.points(); ++g) {
    // P_L = X X* projects onto the submodule generated by x.
    const Mat xf = x.fiber(g);
    const Mat pl = xf * xf.adjoint();
    const Mat id = Mat::Identity(pl.rows(), pl.cols());
    const Mat off = (id - pl) * form.op().fiber(g) * pl;
    report.off_block_norm = std::max(report.off_block_norm, spectral_norm(off));
  }
  report.pass = report.off_block_norm <= tol;
  return report;
}

KyFanResult kyfan_value(const QuadraticForm& form) {
  const ModuleOperator& d = form.op();
  if (min_eigenvalue(d) <= 1e-10)
    throw std::invalid_argument("kyfan: operator must be positive");
  const int terms = std::min(2, d.truncation());
  const SpectralDecomposition dec = diagonalize(d, terms);
  KyFanResult result;
  result.value = trace_tau(dec.terms().front().lambda).real();
  result.separation_ok = true;
  if (dec.terms().size() >= 2) {
    for (std::size_t g = 0; g < d.points(); ++g) {
      const HermEig top = herm_eig(dec.terms()[0].lambda.fiber(g));
      const HermEig next = herm_eig(dec.terms()[1].lambda.fiber(g));
      if (top.values.minCoeff() < next.values.maxCoeff() - 1e-8) {
        result.separation_ok = false;
        break;
      }
    }
  }
  return result;
}

} // namespace modspec
