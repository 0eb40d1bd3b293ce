// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "modspec/dyadic_model.hpp"
#include "modspec/hilbert_module.hpp"
#include "test_support.hpp"

using namespace modspec;
using namespace modspec::testing;

namespace {

ModuleVector random_vector(Rng& rng, const GridPtr& grid, int truncation) {
  std::vector<Mat> fibers(grid->size());
  for (std::size_t g = 0; g < grid->size(); ++g)
    fibers[g] = random_gaussian(rng, truncation * grid->dim(g), grid->dim(g));
  return ModuleVector(grid, truncation, std::move(fibers));
}

// Phase-insensitive comparison of unit vectors on scalar grids.
double phase_distance(const ModuleVector& x, const ModuleVector& y,
                      std::size_t g) {
  const Mat a = x.fiber(g), b = y.fiber(g);
  Complex phase = 1.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    if (std::abs(b(r, 0)) > 1e-8 && std::abs(a(r, 0)) > 1e-8) {
      phase = a(r, 0) / b(r, 0);
      phase /= std::abs(phase);
      break;
    }
  return (a - phase * b).norm();
}

} // namespace

TEST_CASE("inner product on the standard basis") {
  const GridPtr grid = make_uniform_scalar_grid(3);
  const int n = 4;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const AlgebraField prod = inner(ModuleVector::basis(grid, n, i),
                                      ModuleVector::basis(grid, n, j));
      if (i == j)
        CHECK(sup_norm(prod - AlgebraField::identity(grid)) < 1e-15);
      else
        CHECK(sup_norm(prod) < 1e-15);
    }
  const ModuleVector z = ModuleVector::zeros(grid, n);
  CHECK(sup_norm(inner(z, z)) == 0.0);
}

TEST_CASE("inner product is A-sesquilinear") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const GridPtr grid = random_grid(rng, 4, 3);
    const ModuleVector x = random_vector(rng, grid, 3);
    const ModuleVector y = random_vector(rng, grid, 3);
    const AlgebraField a = random_field(rng, grid);
    CHECK(sup_norm(inner(x, y * a) - inner(x, y) * a) < 1e-10);
    CHECK(sup_norm(inner(y, x) - inner(x, y).adjoint()) < 1e-12);
  }
}

TEST_CASE("dyadic eigenvector has unit inner square") {
  const ModuleVector x = dyadic_top_eigenvector(10);
  CHECK(sup_norm(inner(x, x) - AlgebraField::identity(x.grid())) < 1e-15);
}

TEST_CASE("Cauchy-Schwarz and trace norm contraction") {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const GridPtr grid = random_grid(rng, 4, 3);
    const ModuleVector x = random_vector(rng, grid, 3);
    const ModuleVector y = random_vector(rng, grid, 3);
    CHECK(sup_norm(inner(x, y)) <= norm(x) * norm(y) + 1e-9);
    CHECK(trace_norm(x) <= norm(x) + 1e-12);
  }
}

TEST_CASE("projection onto a span") {
  const GridPtr point = make_uniform_scalar_grid(1);
  const ModuleVector g1 = ModuleVector::basis(point, 2, 0);
  Mat xf(2, 1);
  xf << 3.0, 4.0;
  const ModuleVector x(point, 2, {xf});
  const ModuleVector proj = project_onto_span(x, {g1});
  CHECK(std::abs(proj.fiber(0)(0, 0) - 3.0) < 1e-14);
  CHECK(std::abs(proj.fiber(0)(1, 0)) < 1e-14);

  // Idempotence on elements of the span and annihilation of the complement.
  Rng rng(23);
  const GridPtr grid = random_grid(rng, 3, 2);
  const ModuleVector e0 = ModuleVector::basis(grid, 3, 0);
  const AlgebraField a = random_field(rng, grid);
  const ModuleVector in_span = e0 * a;
  CHECK(norm(project_onto_span(in_span, {e0}) - in_span) < 1e-10);
  const ModuleVector e2 = ModuleVector::basis(grid, 3, 2);
  CHECK(norm(project_onto_span(e2, {e0})) < 1e-12);

  // Residual orthogonality.
  const ModuleVector y = random_vector(rng, grid, 3);
  const ModuleVector res = y - project_onto_span(y, {e0, e2});
  CHECK(sup_norm(inner(e0, res)) < 1e-9);
  CHECK(sup_norm(inner(e2, res)) < 1e-9);

  // Non-orthonormalized generators are rejected.
  CHECK_THROWS(project_onto_span(y, {in_span, e0}));
}

TEST_CASE("span projection is self-adjoint for the trace pairing") {
  Rng rng(24);
  const GridPtr grid = random_grid(rng, 3, 2);
  std::vector<ModuleVector> gens = {ModuleVector::basis(grid, 4, 1),
                                    ModuleVector::basis(grid, 4, 3)};
  const ModuleVector x = random_vector(rng, grid, 4);
  const ModuleVector y = random_vector(rng, grid, 4);
  const Complex lhs = trace_tau(inner(project_onto_span(x, gens), y));
  const Complex rhs = trace_tau(inner(x, project_onto_span(y, gens)));
  CHECK(std::abs(lhs - rhs) < 1e-9);
}

TEST_CASE("normalizing a vector whose inner square is a projection") {
  const GridPtr grid = make_uniform_scalar_grid(4);
  // x = e_1 * indicator of half the grid.
  const AlgebraField chi = AlgebraField::scalar(grid, {1.0, 1.0, 0.0, 0.0});
  const ModuleVector x = ModuleVector::basis(grid, 3, 0) * chi;
  const auto r = normalize_to_projection(x, 0.6);
  CHECK(norm(r.x - x) < 1e-12);
  CHECK(sup_norm(r.p.field() - chi) < 1e-12);
  CHECK(trace_tau(r.p.field()).real() == doctest::Approx(0.5));
}

TEST_CASE("normalizing a strictly positive scalar profile") {
  const GridPtr grid = make_uniform_scalar_grid(2);
  const AlgebraField f = AlgebraField::scalar(grid, {0.8, 1.0});
  const ModuleVector x = ModuleVector::basis(grid, 3, 0) * f;
  const auto r = normalize_to_projection(x, 0.3);
  CHECK(norm(r.x - ModuleVector::basis(grid, 3, 0)) < 1e-12);
  CHECK(sup_norm(r.p.field() - AlgebraField::identity(grid)) < 1e-12);
}

TEST_CASE("normalize rejects the zero vector and impossible targets") {
  const GridPtr grid = make_uniform_scalar_grid(2);
  CHECK_THROWS(normalize_to_projection(ModuleVector::zeros(grid, 2), 0.5));
  // Support on half the grid cannot reach trace > 0.9.
  const AlgebraField chi = AlgebraField::scalar(grid, {1.0, 0.0});
  const ModuleVector x = ModuleVector::basis(grid, 2, 0) * chi;
  CHECK_THROWS_WITH_AS(normalize_to_projection(x, 0.1),
                       doctest::Contains("achieved trace"), std::runtime_error);
}

TEST_CASE("complement of a basis vector") {
  const GridPtr grid = make_uniform_scalar_grid(2);
  const auto h = complement_basis(grid, 4, {ModuleVector::basis(grid, 4, 0)}, 2);
  REQUIRE(h.size() == 2);
  for (std::size_t g = 0; g < grid->size(); ++g) {
    CHECK(phase_distance(h[0], ModuleVector::basis(grid, 4, 1), g) < 1e-12);
    CHECK(phase_distance(h[1], ModuleVector::basis(grid, 4, 2), g) < 1e-12);
  }
}

TEST_CASE("complement with no generators starts at the first coordinate") {
  const GridPtr grid = make_uniform_scalar_grid(3);
  const auto h = complement_basis(grid, 2, {}, 1);
  REQUIRE(h.size() == 1);
  for (std::size_t g = 0; g < grid->size(); ++g)
    CHECK(phase_distance(h[0], ModuleVector::basis(grid, 2, 0), g) < 1e-12);
}

TEST_CASE("complement of a diagonal direction") {
  const GridPtr point = make_uniform_scalar_grid(1);
  Mat gf(2, 1);
  gf << std::sqrt(0.5), std::sqrt(0.5);
  const ModuleVector gen(point, 2, {gf});
  const auto h = complement_basis(point, 2, {gen}, 1);
  REQUIRE(h.size() == 1);
  Mat expect(2, 1);
  expect << std::sqrt(0.5), -std::sqrt(0.5);
  const ModuleVector want(point, 2, {expect});
  CHECK(phase_distance(h[0], want, 0) < 1e-10);
}

TEST_CASE("complement basis properties") {
  Rng rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    const GridPtr grid = random_grid(rng, 3, 3);
    const int truncation = 4;
    std::vector<ModuleVector> gens = {ModuleVector::basis(grid, truncation, 1)};
    const int count = 3;
    const auto h = complement_basis(grid, truncation, gens, count);
    // Mutual orthogonality, orthogonality to generators, projection inner
    // squares with full traces while rank lasts.
    for (int i = 0; i < count; ++i) {
      const AlgebraField sq = inner(h[i], h[i]);
      CHECK(sup_norm(sq * sq - sq) < 1e-10);
      CHECK(trace_tau(sq).real() > 0.5);
      CHECK(sup_norm(inner(h[i], gens[0])) < 1e-10);
      for (int j = i + 1; j < count; ++j)
        CHECK(sup_norm(inner(h[i], h[j])) < 1e-10);
    }
    // Joint span projection stays below the identity: project a random
    // vector and compare norms.
    std::vector<ModuleVector> all = gens;
    all.insert(all.end(), h.begin(), h.end());
    const ModuleVector y = random_vector(rng, grid, truncation);
    CHECK(norm(project_onto_span(y, all)) <= norm(y) + 1e-9);
  }
}

TEST_CASE("complement basis exhausts the rank budget") {
  const GridPtr grid = make_uniform_scalar_grid(2);
  CHECK_THROWS_WITH_AS(
      complement_basis(grid, 2, {ModuleVector::basis(grid, 2, 0)}, 2),
      doctest::Contains("residual rank"), std::runtime_error);
}

TEST_CASE("tail profile of a basis vector") {
  const GridPtr grid = make_uniform_scalar_grid(3);
  const TailProfile profile = tail_profile(ModuleVector::basis(grid, 4, 0));
  CHECK(profile.sup_tails[0] == doctest::Approx(1.0));
  for (int m = 1; m < 4; ++m) CHECK(profile.sup_tails[m] == 0.0);
  CHECK(profile.h_like);
  CHECK(profile.decay_index == 1);
  CHECK(profile.verdict() == "H-like");
}

TEST_CASE("tail profile of the dyadic eigenvector") {
  const int levels = 12;
  const ModuleVector x = dyadic_top_eigenvector(levels);
  const TailProfile profile = tail_profile(x);
  CHECK(profile.sup_tails[0] == doctest::Approx(1.0));
  for (int m = 1; m < levels; ++m)
    CHECK(profile.sup_tails[m] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(profile.h_like);
  CHECK(profile.verdict() == "H*-only at this truncation");

  // Trace-norm tails collapse geometrically: the two norms genuinely
  // disagree about decay. tau tail after m = sum_{k>m} mu_k / 2.
  const double total = 1.0 - std::ldexp(1.0, -levels);
  for (int m = 1; m < levels; ++m) {
    double expected = 0.0;
    for (int k = m + 1; k <= levels; ++k)
      expected += 0.5 * std::ldexp(1.0, -k) / total;
    CHECK(profile.trace_tails[m] == doctest::Approx(expected).epsilon(1e-10));
  }
  CHECK(profile.trace_tails[levels - 1] < 2e-4);
}

TEST_CASE("tail profile vanishes exactly at the support bound") {
  const GridPtr grid = make_uniform_scalar_grid(3);
  // Finitely supported vector with an uneven profile.
  const AlgebraField f = AlgebraField::scalar(grid, {0.9, 1.0, 0.7});
  const ModuleVector x = ModuleVector::basis(grid, 5, 1) * f;
  const auto normalized = normalize_to_projection(x, 0.5);
  const TailProfile profile = tail_profile(normalized.x);
  CHECK(profile.sup_tails[2] == 0.0);
  CHECK(profile.sup_tails[3] == 0.0);
  CHECK(profile.sup_tails[1] > 0.0);
}
