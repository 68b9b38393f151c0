#pragma once

// Random sources: exact uniform samplers for the standard bodies,
// hit-and-run for general bodies, sampling from K intersected with the
// ball of radius R sqrt(n), and the discrete distribution on John points.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "isotropy/geometry.hpp"
#include "isotropy/random_stream.hpp"
#include "isotropy/symlin.hpp"

namespace isotropy {

class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Provenance {
  std::string sampler;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string parameters;
};

/// M vectors in R^n stored contiguously, optionally with probability
/// weights (used for exact enumeration of finite distributions).
class SampleBatch {
 public:
  explicit SampleBatch(std::size_t n, Provenance provenance = {});

  static SampleBatch from_vectors(const std::vector<Vector>& vectors, Provenance provenance = {});
  /// Weights are normalized to sum to one.
  static SampleBatch weighted(const std::vector<Vector>& vectors, std::span<const double> weights,
                              Provenance provenance = {});

  void reserve(std::size_t m) { data_.reserve(m * n_); }
  void push_back(std::span<const double> y);

  std::size_t dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return n_ == 0 ? 0 : data_.size() / n_; }
  bool empty() const noexcept { return data_.empty(); }
  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * n_, n_}; }

  bool is_weighted() const noexcept { return !weights_.empty(); }
  /// Probability of row i (1/M when unweighted).
  double weight(std::size_t i) const { return weights_.empty() ? 1.0 / static_cast<double>(size()) : weights_[i]; }

  const Provenance& provenance() const noexcept { return provenance_; }
  Provenance& provenance() noexcept { return provenance_; }

  std::vector<Vector> to_vectors() const;
  /// Copy with every row mapped through `map`.
  SampleBatch transformed(const std::function<Vector(std::span<const double>)>& map) const;

  friend bool operator==(const SampleBatch& a, const SampleBatch& b) {
    return a.n_ == b.n_ && a.data_ == b.data_ && a.weights_ == b.weights_;
  }

 private:
  std::size_t n_;
  std::vector<double> data_;
  Vector weights_;
  Provenance provenance_;
};

/// Uniform direction on the unit sphere.
Vector random_direction(std::size_t n, RandomStream& rng);

/// One exact uniform draw from a cube, ball, simplex or ellipsoid.
/// Throws SamplerError for other variants (use hit-and-run).
Vector sample_direct(const Body& body, RandomStream& rng);
bool supports_direct_sampling(const Body& body) noexcept;

struct HitAndRunOptions {
  std::size_t burn_in;
  std::size_t thin;

  /// burn_in = 50 n, thin = 2 n.
  static HitAndRunOptions defaults(std::size_t n) { return {50 * n, 2 * n}; }
};

/// Hit-and-run Markov chain: random direction, chord through the current
/// point, uniform point on the chord.
class HitAndRunChain {
 public:
  HitAndRunChain(Body body, Vector x0, HitAndRunOptions options);

  /// Discards the burn-in on first use, then advances `thin` steps.
  Vector next(RandomStream& rng);
  const Vector& state() const noexcept { return x_; }
  const Body& body() const noexcept { return body_; }

 private:
  void step(RandomStream& rng);

  Body body_;
  Vector x_;
  HitAndRunOptions options_;
  bool burned_in_ = false;
};

/// `count` emitted states of a hit-and-run chain started at x0.
std::vector<Vector> sample_hit_and_run(const Body& body, std::span<const double> x0, std::size_t burn_in,
                                       std::size_t thin, std::size_t count, RandomStream& rng);

struct TruncationOptions {
  std::size_t pilot_max_draws = std::size_t{1} << 22;
  std::size_t pilot_target_accepts = 64;
  /// Below this measured acceptance, switch from rejection to hit-and-run.
  double mcmc_switch = 1e-3;
  /// Below this measured acceptance, refuse to sample.
  double min_acceptance = 1e-6;
  std::optional<HitAndRunOptions> hit_and_run;
};

/// Uniform sampling from body intersected with (R sqrt(n)) B. A pilot run
/// measures the rejection acceptance rate and picks the method.
class TruncatedSampler {
 public:
  enum class Mode { Rejection, HitAndRun };

  TruncatedSampler(Body body, double R, RandomStream& pilot_rng, TruncationOptions options = {});

  Vector draw(RandomStream& rng);

  Mode mode() const noexcept { return mode_; }
  double acceptance() const noexcept { return acceptance_; }
  double ball_radius() const noexcept { return radius_; }
  const Body& truncated_body() const noexcept { return truncated_; }

 private:
  Body base_;
  Body truncated_;
  double radius_;
  double acceptance_ = 0.0;
  Mode mode_ = Mode::Rejection;
  std::unique_ptr<HitAndRunChain> chain_;
};

std::string to_string(TruncatedSampler::Mode mode);

/// Single truncated draw. Runs a fresh pilot on every call; batch callers
/// should hold a TruncatedSampler instead.
Vector sample_truncated(const Body& body, double R, RandomStream& rng);

/// sqrt(n) z_i with probability c_i / n, by inverse CDF over the
/// cumulative weights in point order.
Vector sample_john(const JohnDecomposition& jd, RandomStream& rng);

/// Index i drawn with probability c_i / n; sample_john returns
/// sqrt(n) * points()[sample_john_index(...)].
std::size_t sample_john_index(const JohnDecomposition& jd, RandomStream& rng);

/// The full John distribution as a weighted batch (exact enumeration).
SampleBatch john_outcomes(const JohnDecomposition& jd);

/// Type-erased source of i.i.d. vectors. May hold chain state, so a
/// Sampler is single-owner like the RandomStream it consumes.
class Sampler {
 public:
  using DrawFn = std::function<Vector(RandomStream&)>;

  Sampler(std::string id, std::size_t n, DrawFn draw) : id_(std::move(id)), n_(n), draw_(std::move(draw)) {}

  const std::string& id() const noexcept { return id_; }
  std::size_t dim() const noexcept { return n_; }
  Vector draw(RandomStream& rng) { return draw_(rng); }

 private:
  std::string id_;
  std::size_t n_;
  DrawFn draw_;
};

Sampler direct_sampler(Body body);
Sampler hit_and_run_sampler(Body body, std::optional<HitAndRunOptions> options = std::nullopt);
Sampler john_sampler(JohnDecomposition jd, std::string id = "john");
Sampler truncated_sampler(Body body, double R, RandomStream& pilot_rng, TruncationOptions options = {});
/// Linear image y = A x of another sampler's output.
Sampler linear_image_sampler(Sampler inner, DenseMatrix a);

/// M draws recorded with provenance (sampler id, seed, stream).
SampleBatch draw_batch(Sampler& sampler, std::size_t m, RandomStream& rng);

}  // namespace isotropy
