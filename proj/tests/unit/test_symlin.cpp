#include <doctest.h>

#include <cmath>
#include <limits>

#include "isotropy/symlin.hpp"
#include "test_util.hpp"

using namespace isotropy;
using isotropy::test::random_spd;
using isotropy::test::random_symmetric;
using isotropy::test::random_vector;

TEST_CASE("rank_one_accumulate examples") {
  SUBCASE("coordinate projector") {
    const SymMatrix s = rank_one_accumulate(SymMatrix(2), Vector{1, 0}, 1.0);
    CHECK(s == SymMatrix::diagonal(Vector{1, 0}));
  }
  SUBCASE("identity plus half of (1,1)(1,1)^T") {
    const SymMatrix s = rank_one_accumulate(SymMatrix::identity(2), Vector{1, 1}, 0.5);
    CHECK(s == SymMatrix::from_rows({{1.5, 0.5}, {0.5, 1.5}}));
  }
  SUBCASE("resolution of identity") {
    SymMatrix s(3);
    for (std::size_t i = 0; i < 3; ++i) {
      Vector e(3, 0.0);
      e[i] = 1.0;
      s = rank_one_accumulate(std::move(s), e, 1.0);
    }
    CHECK(s == SymMatrix::identity(3));
  }
}

TEST_CASE("rank_one_accumulate errors") {
  CHECK_THROWS_AS(rank_one_accumulate(SymMatrix(2), Vector{1, 2, 3}, 1.0), LinAlgError);
  CHECK_THROWS_AS(rank_one_accumulate(SymMatrix(2), Vector{1, std::nan("")}, 1.0), LinAlgError);
  CHECK_THROWS_AS(rank_one_accumulate(SymMatrix(2), Vector{1, 0}, std::numeric_limits<double>::infinity()),
                  LinAlgError);
}

TEST_CASE("accumulation order is fixed") {
  RandomStream rng(3);
  std::vector<Vector> ys;
  for (int i = 0; i < 50; ++i) ys.push_back(random_vector(5, rng));
  RankOneAccumulator a(5), b(5);
  for (const auto& y : ys) a.add(y, 0.3);
  for (const auto& y : ys) b.add(y, 0.3);
  CHECK(a.sum() == b.sum());
  CHECK(a.count() == 50);
}

TEST_CASE("symmetric storage") {
  SymMatrix a(3);
  a.set(2, 0, 4.0);
  CHECK(a(0, 2) == 4.0);
  CHECK(a(2, 0) == 4.0);
  const DenseMatrix d = a.to_dense();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(d(i, j) == d(j, i));
  CHECK_THROWS_AS(SymMatrix::from_rows({{1, 2}, {3, 1}}), LinAlgError);
}

TEST_CASE("eigen examples") {
  SUBCASE("diagonal") {
    const EigenDecomposition e = eigen(SymMatrix::diagonal(Vector{3, 1}));
    CHECK(e.eigenvalues == Vector{3, 1});
    CHECK(DenseMatrix::max_abs_diff(e.eigenvectors, DenseMatrix::identity(2)) == 0.0);
  }
  SUBCASE("2x2 by hand") {
    const EigenDecomposition e = eigen(SymMatrix::from_rows({{2, 1}, {1, 2}}));
    CHECK(e.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(e.eigenvectors(0, 0) - r) < 1e-14);
    CHECK(std::abs(e.eigenvectors(1, 0) - r) < 1e-14);
    CHECK(std::abs(e.eigenvectors(0, 1) - r) < 1e-14);
    CHECK(std::abs(e.eigenvectors(1, 1) + r) < 1e-14);
  }
  SUBCASE("random 4x4 reconstruction") {
    RandomStream rng(44);
    const SymMatrix a = random_symmetric(4, rng);
    const EigenDecomposition e = eigen(a);
    const DenseMatrix& q = e.eigenvectors;
    CHECK(DenseMatrix::max_abs_diff(q * isotropy::test::diag(e.eigenvalues) * q.transpose(), a.to_dense()) <= 1e-10);
  }
}

TEST_CASE("eigen accuracy on random matrices") {
  RandomStream rng(2024);
  double worst_rec = 0.0, worst_orth = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.below(15);
    const SymMatrix a = random_symmetric(n, rng);
    const EigenDecomposition e = eigen(a);
    const DenseMatrix& q = e.eigenvectors;
    worst_rec = std::max(worst_rec, DenseMatrix::max_abs_diff(q * isotropy::test::diag(e.eigenvalues) * q.transpose(),
                                                              a.to_dense()) /
                                        (1.0 + a.max_abs()));
    worst_orth = std::max(worst_orth, DenseMatrix::max_abs_diff(q.transpose() * q, DenseMatrix::identity(n)));
    for (std::size_t k = 1; k < n; ++k) CHECK(e.eigenvalues[k - 1] >= e.eigenvalues[k]);
  }
  CHECK(worst_rec <= 1e-10);
  CHECK(worst_orth <= 1e-10);
}

TEST_CASE("eigen handles degenerate input") {
  const EigenDecomposition z = eigen(SymMatrix(3));
  CHECK(z.eigenvalues == Vector{0, 0, 0});
  const EigenDecomposition one = eigen(SymMatrix::diagonal(Vector{-2}));
  CHECK(one.eigenvalues == Vector{-2});
  Vector bad{1, std::nan(""), 1};
  CHECK_THROWS_AS(eigen(SymMatrix::diagonal(bad)), LinAlgError);
}

TEST_CASE("operator_norm examples") {
  CHECK(operator_norm(SymMatrix::identity(5)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(operator_norm(SymMatrix::diagonal(Vector{3, -5, 1})) == 5.0);
  CHECK(operator_norm(SymMatrix::from_rows({{2, 1}, {1, 2}})) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("operator_norm properties") {
  RandomStream rng(7);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.below(8);
    const SymMatrix a = random_symmetric(n, rng);
    const double na = operator_norm(a);
    CHECK(std::abs(operator_norm(-a) - na) <= 1e-12 * (1.0 + na));
    const double c = rng.normal();
    SymMatrix shifted = a;
    shifted.shift_diagonal(c);
    CHECK(operator_norm(shifted) <= na + std::abs(c) + 1e-12 * (1.0 + na));

    const Vector y = random_vector(n, rng);
    const double sq = dot(y, y);
    CHECK(std::abs(operator_norm(rank_one_accumulate(SymMatrix(n), y, 1.0)) - sq) <= 1e-12 * sq);
  }
}

TEST_CASE("inv_sqrt examples") {
  CHECK(DenseMatrix::max_abs_diff(inv_sqrt(SymMatrix::identity(3)).to_dense(), DenseMatrix::identity(3)) <= 1e-15);
  const SymMatrix w = inv_sqrt(SymMatrix::diagonal(Vector{4, 9}));
  CHECK(w(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(w(0, 1) == 0.0);
}

TEST_CASE("inv_sqrt on random SPD matrices") {
  RandomStream rng(99);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.below(12);
    const SymMatrix a = random_spd(n, rng);
    const SymMatrix w = inv_sqrt(a);
    const DenseMatrix wd = w.to_dense(), ad = a.to_dense();
    CHECK(DenseMatrix::max_abs_diff(wd * ad * wd, DenseMatrix::identity(n)) <= 1e-9);
    CHECK(DenseMatrix::max_abs_diff(wd * ad, ad * wd) <= 1e-9 * operator_norm(a));
    CHECK(eigenvalues(w).back() > 0.0);
  }
}

TEST_CASE("inv_sqrt floor and indefinite input") {
  const SymMatrix w = inv_sqrt(SymMatrix::diagonal(Vector{1, 0}), 1e-8);
  CHECK(w(1, 1) == doctest::Approx(1e4).epsilon(1e-12));
  CHECK_NOTHROW(inv_sqrt(SymMatrix::diagonal(Vector{1, -1e-9}), 1e-8));
  CHECK_THROWS_WITH_AS(inv_sqrt(SymMatrix::diagonal(Vector{1, -0.5})),
                       doctest::Contains("not positive semidefinite within tolerance"), LinAlgError);
  CHECK_THROWS_AS(inv_sqrt(SymMatrix::identity(2), 0.0), LinAlgError);
}
