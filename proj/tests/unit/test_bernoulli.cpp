#include <doctest.h>

#include <cmath>

#include "isotropy/bernoulli.hpp"
#include "isotropy/geometry.hpp"
#include "isotropy/samplers.hpp"

using namespace isotropy;

namespace {

std::vector<Vector> cube_points(std::size_t n, std::size_t m, RandomStream& rng) {
  Sampler s = direct_sampler(isotropic_normalization(BodyFamily::Cube, n));
  return draw_batch(s, m, rng).to_vectors();
}

}  // namespace

TEST_CASE("rademacher_exact examples") {
  CHECK(rademacher_exact({{3.0, 4.0}}) == doctest::Approx(25.0).epsilon(1e-15));
  CHECK(rademacher_exact({{1, 0}, {0, 1}}) == doctest::Approx(1.0).epsilon(1e-15));
  // |e1(x)e1 + e1(x)e1 + e2(x)e2| over signs: 2 w.p. 1/2, 1 w.p. 1/2.
  CHECK(rademacher_exact({{1, 0}, {1, 0}, {0, 1}}) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(rademacher_exact(std::vector<Vector>(kMaxExactPoints + 1, Vector{1.0})), std::invalid_argument);
  CHECK_THROWS(rademacher_exact({}));
}

TEST_CASE("rademacher_exact is 2-homogeneous and order free") {
  RandomStream rng(1);
  std::vector<Vector> pts = cube_points(3, 9, rng);
  const double base = rademacher_exact(pts);
  std::vector<Vector> scaled = pts;
  for (auto& p : scaled)
    for (double& v : p) v *= 1.5;
  CHECK(rademacher_exact(scaled) == doctest::Approx(2.25 * base).epsilon(1e-12));
  std::vector<Vector> rev(pts.rbegin(), pts.rend());
  CHECK(rademacher_exact(rev) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("rademacher_estimate agrees with the exact value") {
  RandomStream rng(2);
  for (int set = 0; set < 5; ++set) {
    const std::vector<Vector> pts = cube_points(3, 10, rng);
    const double exact = rademacher_exact(pts);
    const MonteCarloEstimate e = rademacher_estimate(pts, 20000, rng);
    CHECK(e.trials == 20000);
    CHECK(std::abs(e.mean - exact) <= 4.0 * e.std_error);
  }
}

TEST_CASE("summarize") {
  const MonteCarloEstimate e = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(e.mean == 2.5);
  CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(e.trials == 4);
}

TEST_CASE("lemma_ratio") {
  SUBCASE("fields") {
    RandomStream rng(3);
    const std::vector<Vector> pts = cube_points(4, 64, rng);
    const LemmaReport r = lemma_ratio(pts, 500, rng);
    double q = 0;
    for (const auto& p : pts) q = std::max(q, norm(p));
    CHECK(r.m == 64);
    CHECK(r.n == 4);
    CHECK(r.q == q);
    CHECK(r.bound_shape == doctest::Approx(std::sqrt(std::log(64.0)) * q * std::sqrt(r.base_norm)).epsilon(1e-14));
    CHECK(r.ratio == doctest::Approx(r.estimate / r.bound_shape).epsilon(1e-14));
    CHECK(r.estimate_se > 0.0);
  }
  SUBCASE("cube n=8, M=256: ratio at most 4") {
    RandomStream rng(4);
    const LemmaReport r = lemma_ratio(cube_points(8, 256, rng), 1000, rng);
    CHECK(r.ratio > 0.0);
    CHECK(r.ratio <= 4.0);
  }
  SUBCASE("ratio stays within a factor 2 between M=64 and M=1024") {
    RandomStream rng(5);
    const double a = lemma_ratio(cube_points(8, 64, rng), 1000, rng).ratio;
    const double b = lemma_ratio(cube_points(8, 1024, rng), 1000, rng).ratio;
    CHECK(std::max(a, b) / std::min(a, b) <= 2.0);
  }
  RandomStream rng(6);
  CHECK_THROWS_AS(lemma_ratio({{1.0}, {1.0}}, 10, rng), std::invalid_argument);
}

TEST_CASE("symmetrization") {
  SUBCASE("cube n=4") {
    RandomStream rng(7);
    Sampler s = direct_sampler(isotropic_normalization(BodyFamily::Cube, 4));
    for (std::size_t m : {16u, 128u}) {
      const SymmetrizationResult r = symmetrization_check(s, m, 400, rng);
      CHECK(r.holds());
      CHECK(r.lhs.mean < r.rhs.mean);
    }
  }
  SUBCASE("M=1, n=1 cube: lhs is E|y^2 - 1| = 4 / (3 sqrt 3)") {
    RandomStream rng(8);
    Sampler s = direct_sampler(isotropic_normalization(BodyFamily::Cube, 1));
    const SymmetrizationResult r = symmetrization_check(s, 1, 20000, rng);
    CHECK(std::abs(r.lhs.mean - 4.0 / (3.0 * std::sqrt(3.0))) <= 4.0 * r.lhs.std_error);
    // rhs is 2 E y^2 = 2 exactly, up to Monte Carlo noise
    CHECK(std::abs(r.rhs.mean - 2.0) <= 4.0 * r.rhs.std_error);
    CHECK(r.holds());
  }
  SUBCASE("John cross-polytope") {
    RandomStream rng(9);
    Sampler s = john_sampler(canonical_john(JohnFixture::CrossPolytope, 3));
    const SymmetrizationResult r = symmetrization_check(s, 32, 400, rng);
    CHECK(r.holds());
  }
}
