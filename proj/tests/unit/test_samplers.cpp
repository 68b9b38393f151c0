#include <doctest.h>

#include <cmath>
#include <map>

#include "isotropy/bernoulli.hpp"
#include "isotropy/moments.hpp"
#include "isotropy/samplers.hpp"
#include "test_util.hpp"

using namespace isotropy;

namespace {

// Mean and standard error of f(y) over m draws.
template <class F>
MonteCarloEstimate mean_of(Sampler& s, std::size_t m, RandomStream& rng, F f) {
  std::vector<double> v(m);
  for (auto& x : v) x = f(s.draw(rng));
  return summarize(v);
}

double sq_norm(const Vector& y) { return dot(y, y); }

}  // namespace

TEST_CASE("direct sampler supports") {
  RandomStream rng(1);
  const Body cube = Body::cube(2, std::sqrt(3.0));
  for (int i = 0; i < 10000; ++i) {
    const Vector y = sample_direct(cube, rng);
    CHECK(std::abs(y[0]) <= std::sqrt(3.0));
    CHECK(std::abs(y[1]) <= std::sqrt(3.0));
  }
  const Body ball = Body::ball(3, 1.0);
  for (int i = 0; i < 10000; ++i) CHECK(norm(sample_direct(ball, rng)) <= 1.0);
  const Body simplex = isotropic_normalization(BodyFamily::Simplex, 5);
  const Body ellipsoid = Body::ellipsoid(SymMatrix::from_rows({{3, 1}, {1, 1}}));
  for (int i = 0; i < 5000; ++i) {
    CHECK(membership(simplex, sample_direct(simplex, rng)));
    CHECK(membership(ellipsoid, sample_direct(ellipsoid, rng)));
  }
  CHECK_THROWS_AS(sample_direct(Body::hpolytope({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}, {1, 1, 1, 1}), rng),
                  SamplerError);
}

TEST_CASE("isotropic cube coordinate second moments") {
  // Var(t^2) for t uniform on [-sqrt3, sqrt3] is E t^4 - 1 = 9/5 - 1 = 4/5;
  // 3 sigma at M = 1e5 is 3 sqrt(0.8 / 1e5) = 0.0085, inside the 0.02 band.
  RandomStream rng(2);
  const Body cube = isotropic_normalization(BodyFamily::Cube, 4);
  const std::size_t m = 100000;
  Vector second(4, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const Vector y = sample_direct(cube, rng);
    for (std::size_t k = 0; k < 4; ++k) second[k] += y[k] * y[k];
  }
  for (double s : second) CHECK(std::abs(s / double(m) - 1.0) <= 0.02);
}

TEST_CASE("simplex normalization cross-checked by Monte Carlo") {
  RandomStream rng(3);
  for (std::size_t n : {2u, 3u}) {
    Sampler s = direct_sampler(isotropic_normalization(BodyFamily::Simplex, n));
    const SampleBatch b = draw_batch(s, 200000, rng);
    CHECK(deviation(empirical_second_moment(b)) <= 0.03);
  }
}

TEST_CASE("ball radial distribution") {
  RandomStream rng(4);
  const std::size_t n = 5, m = 100000;
  const Body ball = Body::ball(n, 2.0);
  for (double q : {0.5, 0.9}) {
    std::size_t inside = 0;
    for (std::size_t i = 0; i < m; ++i) inside += norm(sample_direct(ball, rng)) <= 2.0 * q;
    const double p = std::pow(q, double(n));
    const double sigma = std::sqrt(p * (1 - p) / double(m));
    CHECK(std::abs(double(inside) / double(m) - p) <= 3 * sigma);
  }
}

TEST_CASE("trace law on isotropic samplers") {
  RandomStream rng(5);
  const std::size_t n = 6, m = 100000;
  std::vector<Sampler> samplers;
  for (auto f : {BodyFamily::Cube, BodyFamily::Ball, BodyFamily::Simplex})
    samplers.push_back(direct_sampler(isotropic_normalization(f, n)));
  for (auto& s : samplers) {
    const MonteCarloEstimate e = mean_of(s, m, rng, sq_norm);
    CAPTURE(s.id());
    CHECK(std::abs(e.mean - double(n)) <= 3 * e.std_error);
  }
  Sampler john = john_sampler(canonical_john(JohnFixture::CrossPolytope, n));
  for (int i = 0; i < 1000; ++i) CHECK(std::abs(sq_norm(john.draw(rng)) - double(n)) <= 1e-12);
}

TEST_CASE("hit-and-run stays inside") {
  RandomStream rng(6);
  const Body ball = Body::ball(2, 1.0);
  for (const auto& y : sample_hit_and_run(ball, Vector{0, 0}, 100, 2, 2000, rng)) CHECK(membership(ball, y));

  const Body cube = Body::cube(2, 1.0);
  const auto one = sample_hit_and_run(cube, Vector{0, 0}, 0, 1, 1, rng);
  REQUIRE(one.size() == 1);
  CHECK(membership(cube, one[0]));

  CHECK_THROWS_AS(sample_hit_and_run(cube, Vector{2, 0}, 0, 1, 1, rng), SamplerError);
  CHECK_THROWS_AS(sample_hit_and_run(cube, Vector{0, 0}, 0, 0, 1, rng), SamplerError);
}

TEST_CASE("hit-and-run on a rotated square is centred") {
  const double c = std::cos(M_PI / 6), s = std::sin(M_PI / 6);
  // Unit square rotated by 30 degrees: |<r1,x>| <= 1, |<r2,x>| <= 1.
  const Body sq = Body::hpolytope({{c, s}, {-c, -s}, {-s, c}, {s, -c}}, {1, 1, 1, 1});
  RandomStream rng(7);
  const auto pts = sample_hit_and_run(sq, Vector{0, 0}, 1000, 5, 10000, rng);
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<double> coord;
    for (const auto& p : pts) coord.push_back(p[k]);
    const MonteCarloEstimate e = summarize(coord);
    CHECK(std::abs(e.mean) <= 3 * e.std_error);
  }
}

TEST_CASE("hit-and-run matches the exact cube sampler in distribution") {
  RandomStream rng(8);
  Sampler hr = hit_and_run_sampler(isotropic_normalization(BodyFamily::Cube, 3));
  const SampleBatch b = draw_batch(hr, 40000, rng);
  CHECK(deviation(empirical_second_moment(b)) <= 0.05);
}

TEST_CASE("truncated sampling") {
  SUBCASE("vacuous truncation uses rejection with full acceptance") {
    RandomStream pilot(9), rng(10);
    const Body cube = isotropic_normalization(BodyFamily::Cube, 4);
    TruncatedSampler t(cube, 2.0, pilot);
    CHECK(t.mode() == TruncatedSampler::Mode::Rejection);
    CHECK(t.acceptance() == 1.0);
    // Same stream, same draws as the direct sampler.
    RandomStream a(11), b(11);
    for (int i = 0; i < 100; ++i) CHECK(t.draw(a) == sample_direct(cube, b));
  }
  SUBCASE("ball support") {
    RandomStream rng(12);
    const Body ball = isotropic_normalization(BodyFamily::Ball, 10);
    TruncatedSampler t(ball, 1.0, rng);
    for (int i = 0; i < 5000; ++i) CHECK(norm(t.draw(rng)) <= std::sqrt(10.0) * (1 + 1e-12));
  }
  SUBCASE("cube n=16, R=1 shrinks the second moment uniformly") {
    // Oracle: E[y_1^2 | |y|^2 <= 16] = 0.8249 for the isotropic 16-cube,
    // from 1e7 independent draws with a separate generator.
    constexpr double kShrink = 0.8249;
    RandomStream rng(13);
    TruncatedSampler t(isotropic_normalization(BodyFamily::Cube, 16), 1.0, rng);
    CHECK(t.acceptance() == doctest::Approx(0.511).epsilon(0.1));
    SampleBatch b(16);
    for (int i = 0; i < 100000; ++i) b.push_back(t.draw(rng));
    SymMatrix m = empirical_second_moment(b);
    CHECK(std::abs(m.trace() / 16.0 - kShrink) <= 0.003);
    m *= 1.0 / kShrink;
    CHECK(deviation(m) <= 0.05);
  }
  SUBCASE("low acceptance switches to hit-and-run") {
    RandomStream rng(14);
    const Body cube = isotropic_normalization(BodyFamily::Cube, 16);
    TruncatedSampler t(cube, 0.6, rng);
    CHECK(t.acceptance() < 1e-3);
    CHECK(t.mode() == TruncatedSampler::Mode::HitAndRun);
    for (int i = 0; i < 200; ++i) CHECK(membership(t.truncated_body(), t.draw(rng)));
  }
  SUBCASE("truncation too aggressive") {
    RandomStream rng(15);
    CHECK_THROWS_WITH_AS(TruncatedSampler(isotropic_normalization(BodyFamily::Cube, 40), 0.3, rng),
                         doctest::Contains("truncation too aggressive"), SamplerError);
    CHECK_THROWS_AS(sample_truncated(Body::cube(2, 1), 0.0, rng), SamplerError);
  }
}

TEST_CASE("John distribution") {
  SUBCASE("cross-polytope n=2 exact enumeration") {
    const JohnDecomposition jd = canonical_john(JohnFixture::CrossPolytope, 2);
    const SampleBatch all = john_outcomes(jd);
    REQUIRE(all.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(all.weight(i) == 0.25);
      CHECK(norm(all[i]) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    }
    CHECK(deviation(empirical_second_moment(all)) <= 1e-15);
  }
  SUBCASE("every output has norm sqrt(n)") {
    RandomStream rng(16);
    for (auto f : {JohnFixture::CrossPolytope, JohnFixture::CubeVertices, JohnFixture::Simplex}) {
      const JohnDecomposition jd = canonical_john(f, 5);
      for (int i = 0; i < 500; ++i) CHECK(norm(sample_john(jd, rng)) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
    }
  }
  SUBCASE("cube vertices n=3 frequencies") {
    RandomStream rng(17);
    const JohnDecomposition jd = canonical_john(JohnFixture::CubeVertices, 3);
    const std::size_t m = 100000;
    std::vector<std::size_t> counts(jd.size(), 0);
    for (std::size_t i = 0; i < m; ++i) ++counts[sample_john_index(jd, rng)];
    const double p = 3.0 / 8.0 / 3.0;  // c_i / n
    const double sigma = std::sqrt(p * (1 - p) / double(m));
    for (auto c : counts) CHECK(std::abs(double(c) / double(m) - p) <= 3 * sigma);
  }
  SUBCASE("exact E y (x) y = id for every fixture") {
    for (auto f : {JohnFixture::CrossPolytope, JohnFixture::CubeVertices, JohnFixture::Simplex})
      for (std::size_t n : {2u, 3u, 4u, 8u})
        CHECK(deviation(empirical_second_moment(john_outcomes(canonical_john(f, n)))) <= 1e-12);
  }
}

TEST_CASE("reproducibility and provenance") {
  Sampler a = direct_sampler(isotropic_normalization(BodyFamily::Ball, 4));
  Sampler b = direct_sampler(isotropic_normalization(BodyFamily::Ball, 4));
  RandomStream r1(21, 3), r2(21, 3);
  const SampleBatch x = draw_batch(a, 500, r1);
  const SampleBatch y = draw_batch(b, 500, r2);
  CHECK(x == y);
  CHECK(x.provenance().sampler == a.id());
  CHECK(x.provenance().seed == 21);
  CHECK(x.provenance().stream == 3);
  CHECK_THROWS_AS(draw_batch(a, 0, r1), SamplerError);
}

TEST_CASE("sample batch validation") {
  SampleBatch b(2);
  CHECK_THROWS_AS(b.push_back(Vector{1, 2, 3}), SamplerError);
  CHECK_THROWS_AS(b.push_back(Vector{1, std::nan("")}), SamplerError);
  CHECK_THROWS_AS(SampleBatch(0), SamplerError);
  CHECK_THROWS_AS(SampleBatch::weighted({{1.0}}, Vector{-1.0}), SamplerError);
  const SampleBatch w = SampleBatch::weighted({{1.0}, {2.0}}, Vector{1, 3});
  CHECK(w.weight(0) == 0.25);
  CHECK(w.weight(1) == 0.75);
}

TEST_CASE("linear image sampler") {
  RandomStream rng(22);
  Sampler s = linear_image_sampler(direct_sampler(isotropic_normalization(BodyFamily::Cube, 2)),
                                   isotropy::test::diag({2.0, 0.5}));
  const SymMatrix t = empirical_second_moment(draw_batch(s, 100000, rng));
  CHECK(t(0, 0) == doctest::Approx(4.0).epsilon(0.03));
  CHECK(t(1, 1) == doctest::Approx(0.25).epsilon(0.03));
}
