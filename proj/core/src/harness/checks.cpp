#include "isotropy/harness/checks.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "isotropy/bernoulli.hpp"
#include "isotropy/format.hpp"
#include "isotropy/geometry.hpp"
#include "isotropy/john_sparsify.hpp"
#include "isotropy/moments.hpp"
#include "isotropy/samplers.hpp"
#include "isotropy/symlin.hpp"

namespace isotropy::harness {

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

SymMatrix random_symmetric(std::size_t n, RandomStream& rng) {
  SymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a.set(i, j, rng.normal());
  return a;
}

Outcome philox_known_answer(RandomStream&) {
  const auto zero = RandomStream::philox_block({0, 0}, {0, 0, 0, 0});
  const auto ones = RandomStream::philox_block({0xffffffffu, 0xffffffffu},
                                               {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
  const bool ok = zero == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u} &&
                  ones == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu};
  return {ok, ok ? "2 vectors" : "block mismatch"};
}

Outcome eigen_accuracy(RandomStream& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const SymMatrix a = random_symmetric(n, rng);
    const EigenDecomposition e = eigen(a);
    const DenseMatrix& v = e.eigenvectors;
    DenseMatrix lambda(n);
    for (std::size_t i = 0; i < n; ++i) lambda(i, i) = e.eigenvalues[i];
    worst = std::max(worst, DenseMatrix::max_abs_diff(v * lambda * v.transpose(), a.to_dense()));
    worst = std::max(worst, DenseMatrix::max_abs_diff(v.transpose() * v, DenseMatrix::identity(n)));
  }
  return {worst <= 1e-10, "max error " + format_double(worst)};
}

Outcome inv_sqrt_accuracy(RandomStream& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    RankOneAccumulator acc(n);
    for (std::size_t k = 0; k < 2 * n; ++k) {
      Vector y(n);
      for (double& v : y) v = rng.normal();
      acc.add(y);
    }
    SymMatrix a = acc.sum();
    a.shift_diagonal(0.1);
    const DenseMatrix w = inv_sqrt(a).to_dense();
    worst = std::max(worst, DenseMatrix::max_abs_diff(w * a.to_dense() * w, DenseMatrix::identity(n)));
  }
  return {worst <= 1e-9, "max error " + format_double(worst)};
}

Outcome john_identities(RandomStream&) {
  double worst = 0.0;
  const std::pair<JohnFixture, std::size_t> cases[] = {
      {JohnFixture::CrossPolytope, 2}, {JohnFixture::CrossPolytope, 8}, {JohnFixture::CubeVertices, 2},
      {JohnFixture::CubeVertices, 4},  {JohnFixture::Simplex, 2},       {JohnFixture::Simplex, 4}};
  for (const auto& [fixture, n] : cases) {
    const JohnDecomposition jd = canonical_john(fixture, n);
    const auto r = JohnDecomposition::residuals(jd.points(), jd.weights());
    worst = std::max({worst, r.max_unit_error, r.identity_error, r.centroid_error, r.weight_sum_error});
    // exact second moment of the John distribution
    worst = std::max(worst, deviation(empirical_second_moment(john_outcomes(jd))));
  }
  return {worst <= 1e-10, "max residual " + format_double(worst)};
}

Outcome trace_law(RandomStream& rng) {
  const std::size_t n = 6;
  const std::size_t m = 20000;
  std::vector<Sampler> samplers;
  for (auto family : {BodyFamily::Cube, BodyFamily::Ball, BodyFamily::Simplex})
    samplers.push_back(direct_sampler(isotropic_normalization(family, n)));
  samplers.push_back(john_sampler(canonical_john(JohnFixture::Simplex, n)));
  std::ostringstream detail;
  bool ok = true;
  for (auto& s : samplers) {
    std::vector<double> sq(m);
    for (auto& v : sq) {
      const Vector y = s.draw(rng);
      v = dot(y, y);
    }
    const MonteCarloEstimate e = summarize(sq);
    const double z = e.std_error > 0.0 ? std::abs(e.mean - double(n)) / e.std_error : std::abs(e.mean - double(n));
    const bool pass = e.std_error > 0.0 ? z <= 4.0 : z <= 1e-12;
    ok = ok && pass;
    if (detail.tellp() > 0) detail << ' ';
    detail << s.id().substr(0, s.id().find('(')) << " z=" << two_decimals(z);
  }
  return {ok, detail.str()};
}

Outcome hpolytope_chord(RandomStream&) {
  // Square |x|,|y| <= 1, chord through an off-centre point.
  const Body sq = Body::hpolytope({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}, {1, 1, 1, 1});
  const Vector x{0.5, 0.0};
  const Vector d{1.0, 0.0};
  const Chord c = chord(sq, x, d);
  const bool ok = std::abs(c.t_lo + 1.5) <= 1e-12 && std::abs(c.t_hi - 0.5) <= 1e-12;
  return {ok, "[" + format_double(c.t_lo) + ", " + format_double(c.t_hi) + "]"};
}

Outcome rademacher_oracle(RandomStream& rng) {
  double worst_z = 0.0;
  for (int set = 0; set < 4; ++set) {
    const std::size_t n = 2 + rng.below(3);
    const std::size_t m = 6 + rng.below(5);
    std::vector<Vector> pts(m, Vector(n));
    for (auto& p : pts)
      for (double& v : p) v = rng.normal();
    const double exact = rademacher_exact(pts);
    const MonteCarloEstimate est = rademacher_estimate(pts, 4000, rng);
    worst_z = std::max(worst_z, std::abs(est.mean - exact) / est.std_error);
  }
  return {worst_z <= 4.0, "max z " + two_decimals(worst_z)};
}

Outcome sparsifier_certificate(RandomStream& rng) {
  const JohnDecomposition jd = canonical_john(JohnFixture::Simplex, 4);
  const ApproxJohn a = sparsify(jd, 0.25, rng);
  const JohnVerification v = verify(a);
  const double m = static_cast<double>(a.m);
  const bool ok = v.residual_norm < 0.25 && v.centroid_norm <= 1e-10 * std::sqrt(m) && v.shift_sqrt_m <= 4.0 &&
                  std::abs(v.residual_norm - a.residual_norm) <= 1e-12;
  return {ok, "M=" + std::to_string(a.m) + " residual " + format_double(v.residual_norm)};
}

Outcome whitening_round_trip(RandomStream& rng) {
  const std::size_t n = 4;
  DenseMatrix a = DenseMatrix::identity(n);
  a(0, 0) = 3.0;
  a(n - 1, n - 1) = 0.25;
  Sampler s = linear_image_sampler(direct_sampler(isotropic_normalization(BodyFamily::Cube, n)), a);
  const SampleBatch batch = draw_batch(s, 5000, rng);
  const SymMatrix t = empirical_second_moment(batch);
  const double self = deviation(empirical_second_moment(whiten(t, batch)));
  return {self <= 1e-10, "self-whitened deviation " + format_double(self)};
}

}  // namespace

std::vector<CheckResult> run_checks(std::uint64_t seed) {
  using Fn = std::function<Outcome(RandomStream&)>;
  const std::pair<const char*, Fn> suite[] = {
      {"philox_known_answer", philox_known_answer},
      {"eigen_reconstruction", eigen_accuracy},
      {"inv_sqrt_multiply_back", inv_sqrt_accuracy},
      {"john_exact_identities", john_identities},
      {"trace_law", trace_law},
      {"hpolytope_chord", hpolytope_chord},
      {"rademacher_oracle", rademacher_oracle},
      {"sparsifier_certificate", sparsifier_certificate},
      {"whitening_round_trip", whitening_round_trip},
  };
  std::vector<CheckResult> out;
  std::uint64_t index = 0;
  for (const auto& [name, fn] : suite) {
    RandomStream rng(seed, hash_combine(hash_string("check"), index++));
    CheckResult r{name, false, {}};
    try {
      const Outcome o = fn(rng);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("threw: ") + e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace isotropy::harness
