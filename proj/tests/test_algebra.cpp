// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "modspec/algebra.hpp"
#include "test_support.hpp"

using namespace modspec;
using namespace modspec::testing;

namespace {

AlgebraField scalar3(const std::vector<double>& values) {
  return AlgebraField::scalar(make_uniform_scalar_grid(3), values);
}

} // namespace

TEST_CASE("normalized trace") {
  const GridPtr grid = make_uniform_scalar_grid(3);
  CHECK(trace_tau(AlgebraField::identity(grid)).real() == doctest::Approx(1.0));
  CHECK(std::abs(trace_tau(AlgebraField::zeros(grid))) == 0.0);

  // Hand sum oracle: (0.6 + 1 + 1) / 3.
  const AlgebraField a = scalar3({0.6, 1.0, 1.0});
  CHECK(trace_tau(a).real() == doctest::Approx(13.0 / 15.0).epsilon(1e-12));

  Rng rng(11);
  const GridPtr mixed = random_grid(rng, 6, 3);
  const AlgebraField h = random_hermitian_field(rng, mixed, -2.0, 2.0);
  CHECK(std::abs(trace_tau(h).imag()) < 1e-12);
}

TEST_CASE("trace is faithful on the model") {
  Rng rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    const GridPtr grid = random_grid(rng, 5, 3);
    const AlgebraField a = random_field(rng, grid);
    double floor = 1.0;
    for (std::size_t g = 0; g < grid->size(); ++g)
      floor = std::min(floor, grid->weight(g) / grid->dim(g));
    const double tau = trace_tau(a.adjoint() * a).real();
    const double nrm = sup_norm(a);
    CHECK(tau >= floor * nrm * nrm / double(4 * 3 * 3) - 1e-12);
    if (tau <= 1e-16) CHECK(nrm <= 1e-8);
  }
}

TEST_CASE("center-valued trace") {
  // Scalar fibers: the algebra is commutative and T is the identity.
  const AlgebraField a = scalar3({0.3, -1.0, 2.0});
  CHECK(sup_norm(center_trace(a) - a) < 1e-15);

  const GridPtr m2 = make_grid({0.0}, {1.0}, {2});
  Mat f(2, 2);
  f << 4.0, 0.0, 0.0, 0.0;
  const AlgebraField b(m2, {f});
  const AlgebraField tb = center_trace(b);
  CHECK((tb.fiber(0) - 2.0 * Mat::Identity(2, 2)).norm() < 1e-15);

  const GridPtr grid = make_uniform_scalar_grid(4);
  CHECK(sup_norm(center_trace(AlgebraField::identity(grid)) -
                 AlgebraField::identity(grid)) < 1e-15);
}

TEST_CASE("center trace is idempotent and tracial") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const GridPtr grid = random_grid(rng, 4, 3);
    const AlgebraField a = random_field(rng, grid);
    const AlgebraField b = random_field(rng, grid);
    CHECK(sup_norm(center_trace(center_trace(a)) - center_trace(a)) < 1e-12);
    CHECK(sup_norm(center_trace(a * b) - center_trace(b * a)) < 1e-9);
  }
}

TEST_CASE("functional calculus") {
  const GridPtr m2 = make_grid({0.0}, {1.0}, {2});
  Mat d(2, 2);
  d << 0.6, 0.0, 0.0, 0.2;
  const AlgebraField a(m2, {d});

  const AlgebraField ident = functional_calculus(a, [](double t) { return t; });
  CHECK(sup_norm(ident - a) < 1e-14);

  const AlgebraField chi = indicator_above(a, 0.5);
  Mat expected(2, 2);
  expected << 1.0, 0.0, 0.0, 0.0;
  CHECK((chi.fiber(0) - expected).norm() < 1e-14);

  Mat d2(2, 2);
  d2 << 4.0, 0.0, 0.0, 0.25;
  const AlgebraField b(m2, {d2});
  const AlgebraField roots =
      functional_calculus(b, [](double t) { return 1.0 / std::sqrt(t); });
  Mat expected2(2, 2);
  expected2 << 0.5, 0.0, 0.0, 2.0;
  CHECK((roots.fiber(0) - expected2).norm() < 1e-14);

  const GridPtr grid = make_uniform_scalar_grid(2);
  std::vector<Mat> bad(2);
  bad[0] = Mat::Zero(1, 1);
  bad[1] = Mat::Zero(1, 1);
  bad[1](0, 0) = Complex(0.0, 1.0);
  CHECK_THROWS(functional_calculus(AlgebraField(grid, bad),
                                   [](double t) { return t; }));
}

TEST_CASE("functional calculus multiplicativity") {
  Rng rng(14);
  auto f = [](double t) { return t * t - 0.5; };
  auto g = [](double t) { return std::exp(0.3 * t); };
  auto fg = [&](double t) { return f(t) * g(t); };
  for (int trial = 0; trial < 15; ++trial) {
    const GridPtr grid = random_grid(rng, 4, 3);
    const AlgebraField a = random_hermitian_field(rng, grid, -1.5, 1.5);
    const AlgebraField lhs = functional_calculus(a, f) * functional_calculus(a, g);
    const AlgebraField rhs = functional_calculus(a, fg);
    CHECK(sup_norm(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("projection certification") {
  const GridPtr grid = make_uniform_scalar_grid(2);
  CHECK_NOTHROW(Projection::certify(AlgebraField::identity(grid)));
  CHECK_NOTHROW(Projection::certify(AlgebraField::zeros(grid)));
  CHECK_THROWS(Projection::certify(AlgebraField::scalar(grid, {0.5, 1.0})));
}

TEST_CASE("cutoff projection on the identity") {
  const GridPtr grid = make_uniform_scalar_grid(3);
  const auto r = cutoff_projection(AlgebraField::identity(grid), 0.1);
  CHECK(trace_tau(r.p.field()).real() == doctest::Approx(1.0));
  CHECK(r.level > 0.0);
  CHECK(r.level < 1.0);
  CHECK(r.hypothesis_ok);
}

TEST_CASE("cutoff projection keeps the whole range when it can") {
  // tau(a) = 0.8667 > 1 - 0.15; the scan settles at the canonical cut 1/2
  // and the compression spectrum stays above it.
  const AlgebraField a = scalar3({0.6, 1.0, 1.0});
  const auto r = cutoff_projection(a, 0.3);
  CHECK(trace_tau(r.p.field()).real() == doctest::Approx(1.0));
  CHECK(r.level == doctest::Approx(0.5));
  CHECK(r.hypothesis_ok);
  const AlgebraField pap = r.p.field() * a * r.p.field();
  const AlgebraField lifted =
      pap + (AlgebraField::identity(a.grid()) - r.p.field());
  CHECK(min_eigenvalue(lifted) >= r.level - 1e-12);
  CHECK(min_eigenvalue(lifted) == doctest::Approx(0.6));
}

TEST_CASE("cutoff projection excludes a small fiber") {
  // The sufficient trace hypothesis fails here (tau(a) = 0.67 <= 0.8), but a
  // valid cut exists; the violation is reported through the flag.
  const AlgebraField a = scalar3({1.0, 1.0, 0.01});
  const auto r = cutoff_projection(a, 0.4);
  CHECK(trace_tau(r.p.field()).real() == doctest::Approx(2.0 / 3.0));
  CHECK(r.level >= 0.01);
  CHECK(std::abs(r.p.field().fiber(2)(0, 0)) < 1e-12);  // the 0.01 fiber is cut
  CHECK_FALSE(r.hypothesis_ok);
  CHECK(r.input_trace == doctest::Approx(0.67));
}

TEST_CASE("cutoff hypothesis violation is reported") {
  // Mass sitting at zero caps every achievable indicator trace at 1/3, so
  // no cut reaches 1 - eps and the trace-hypothesis violation is surfaced.
  const AlgebraField a = scalar3({1.0, 0.0, 0.0});
  CHECK_THROWS_WITH_AS(cutoff_projection(a, 0.2),
                       doctest::Contains("trace hypothesis also violated"),
                       std::runtime_error);
  // A fully positive contraction always admits a cut below its smallest
  // eigenvalue, even when the sufficient hypothesis fails.
  const auto weak = cutoff_projection(scalar3({0.5, 0.5, 0.5}), 0.2);
  CHECK_FALSE(weak.hypothesis_ok);
  CHECK(trace_tau(weak.p.field()).real() == doctest::Approx(1.0));
  CHECK(weak.level < 0.5);
  CHECK_THROWS(cutoff_projection(AlgebraField::identity(a.grid()), 1.5));
  CHECK_THROWS(cutoff_projection(scalar3({2.0, 1.0, 1.0}), 0.2));
}

TEST_CASE("cutoff postconditions on random positive contractions") {
  Rng rng(15);
  std::uniform_real_distribution<double> eps_draw(0.1, 0.9);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const GridPtr grid = random_grid(rng, 5, 3);
    const double eps = eps_draw(rng);
    std::vector<std::vector<double>> spectra(grid->size());
    std::vector<Mat> fibers(grid->size());
    for (std::size_t g = 0; g < grid->size(); ++g) {
      std::vector<double> eigs(grid->dim(g));
      for (double& e : eigs) e = 1.0 - 0.4 * eps * unif(rng);
      fibers[g] = hermitian_with_spectrum(rng, eigs);
    }
    const AlgebraField a(grid, std::move(fibers));
    if (!(trace_tau(a).real() > 1.0 - eps / 2.0)) continue;
    const auto r = cutoff_projection(a, eps);
    CHECK(r.hypothesis_ok);
    CHECK(trace_tau(r.p.field()).real() > 1.0 - eps);
    const AlgebraField pap = r.p.field() * a * r.p.field();
    const AlgebraField lifted =
        pap + (AlgebraField::identity(grid) - r.p.field());
    CHECK(min_eigenvalue(lifted) >= r.level - 1e-9);
  }
}

TEST_CASE("lattice join and meet") {
  Rng rng(16);

  // p = q is a fixed point of both operations.
  const GridPtr grid = random_grid(rng, 3, 3);
  std::vector<int> ranks(grid->size());
  for (std::size_t g = 0; g < grid->size(); ++g)
    ranks[g] = grid->dim(g) / 2 + (grid->dim(g) > 1 ? 1 : 0);
  for (std::size_t g = 0; g < grid->size(); ++g)
    ranks[g] = std::min(ranks[g], grid->dim(g));
  const Projection p = random_projection(rng, grid, ranks);
  const auto [jj, mm] = lattice_join_meet(p, p);
  CHECK(sup_norm(jj.field() - p.field()) < 1e-9);
  CHECK(sup_norm(mm.field() - p.field()) < 1e-9);

  // Orthogonal rank-one projections in M2 sum to the identity.
  const GridPtr m2 = make_grid({0.0}, {1.0}, {2});
  Mat e1 = Mat::Zero(2, 2), e2 = Mat::Zero(2, 2);
  e1(0, 0) = 1.0;
  e2(1, 1) = 1.0;
  const auto [j2, m2r] = lattice_join_meet(
      Projection::certify(AlgebraField(m2, {e1})),
      Projection::certify(AlgebraField(m2, {e2})));
  CHECK(sup_norm(j2.field() - AlgebraField::identity(m2)) < 1e-12);
  CHECK(sup_norm(m2r.field()) < 1e-12);
}

TEST_CASE("lattice example in M3 with the trace identity") {
  const GridPtr m3 = make_grid({0.0}, {1.0}, {3});
  Mat pf = Mat::Zero(3, 3);
  pf(0, 0) = 1.0;
  Mat qf = Mat::Zero(3, 3);
  qf(0, 0) = qf(0, 1) = qf(1, 0) = qf(1, 1) = 0.5;
  const Projection p = Projection::certify(AlgebraField(m3, {pf}));
  const Projection q = Projection::certify(AlgebraField(m3, {qf}));
  const auto [join, meet] = lattice_join_meet(p, q);
  CHECK(join.rank(0) == 2);
  CHECK(meet.rank(0) == 0);
  CHECK(trace_tau(join.field()).real() == doctest::Approx(2.0 / 3.0));
  const double lhs = trace_tau(p.field()).real() + trace_tau(q.field()).real();
  const double rhs =
      trace_tau(join.field()).real() + trace_tau(meet.field()).real();
  CHECK(std::abs(lhs - rhs) < 1e-9);
}

TEST_CASE("lattice trace identity on random pairs") {
  Rng rng(17);
  std::uniform_int_distribution<int> rank_draw(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const GridPtr grid = random_grid(rng, 4, 3);
    std::vector<int> rp(grid->size()), rq(grid->size());
    for (std::size_t g = 0; g < grid->size(); ++g) {
      rp[g] = rank_draw(rng) % (grid->dim(g) + 1);
      rq[g] = rank_draw(rng) % (grid->dim(g) + 1);
    }
    const Projection p = random_projection(rng, grid, rp);
    const Projection q = random_projection(rng, grid, rq);
    const auto [join, meet] = lattice_join_meet(p, q);
    const double lhs =
        trace_tau(p.field()).real() + trace_tau(q.field()).real();
    const double rhs =
        trace_tau(join.field()).real() + trace_tau(meet.field()).real();
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("subprojection splicing") {
  // q <= p already: identity unitary.
  const GridPtr m2 = make_grid({0.0}, {1.0}, {2});
  Mat qf = Mat::Zero(2, 2), pf = Mat::Identity(2, 2);
  qf(0, 0) = 1.0;
  {
    const auto r = equivalent_subprojection(
        Projection::certify(AlgebraField(m2, {qf})),
        Projection::certify(AlgebraField(m2, {pf})));
    CHECK(sup_norm(r.sub.field() - AlgebraField(m2, {qf})) < 1e-12);
    CHECK(sup_norm(r.unitary - AlgebraField::identity(m2)) < 1e-12);
  }

  // Orthogonal ranges: the intertwiner is the swap.
  Mat pf2 = Mat::Zero(2, 2);
  pf2(1, 1) = 1.0;
  {
    const auto r = equivalent_subprojection(
        Projection::certify(AlgebraField(m2, {qf})),
        Projection::certify(AlgebraField(m2, {pf2})));
    CHECK(sup_norm(r.sub.field() - AlgebraField(m2, {pf2})) < 1e-10);
    Mat swap(2, 2);
    swap << 0.0, 1.0, 1.0, 0.0;
    CHECK((r.unitary.fiber(0) - swap).norm() < 1e-10);
  }

  // q = 0.
  {
    const auto r = equivalent_subprojection(
        Projection::certify(AlgebraField::zeros(m2)),
        Projection::certify(AlgebraField(m2, {pf2})));
    CHECK(sup_norm(r.sub.field()) < 1e-12);
    CHECK(sup_norm(r.unitary - AlgebraField::identity(m2)) < 1e-12);
  }

  // Rank precondition.
  CHECK_THROWS(equivalent_subprojection(
      Projection::certify(AlgebraField::identity(m2)),
      Projection::certify(AlgebraField(m2, {qf}))));
}

TEST_CASE("splicing properties on random pairs") {
  Rng rng(18);
  std::uniform_int_distribution<int> rank_draw(0, 3);
  for (int trial = 0; trial < 60; ++trial) {
    const GridPtr grid = random_grid(rng, 4, 3);
    std::vector<int> rp(grid->size()), rq(grid->size());
    for (std::size_t g = 0; g < grid->size(); ++g) {
      rp[g] = rank_draw(rng) % (grid->dim(g) + 1);
      rq[g] = rank_draw(rng) % (rp[g] + 1);
    }
    const Projection p = random_projection(rng, grid, rp);
    const Projection q = random_projection(rng, grid, rq);
    const auto r = equivalent_subprojection(q, p);
    const AlgebraField& u = r.unitary;
    const AlgebraField ident = AlgebraField::identity(grid);
    CHECK(sup_norm(u.adjoint() * u - ident) < 1e-9);
    CHECK(sup_norm(u * u.adjoint() - ident) < 1e-9);
    CHECK(sup_norm(r.sub.field() - u.adjoint() * q.field() * u) < 1e-9);
    CHECK(sup_norm(q.field() * u - u * r.sub.field()) < 1e-9);
    // q' <= p.
    CHECK(sup_norm(p.field() * r.sub.field() * p.field() - r.sub.field()) <
          1e-9);
    for (std::size_t g = 0; g < grid->size(); ++g)
      CHECK(r.sub.rank(g) == q.rank(g));
  }
}
