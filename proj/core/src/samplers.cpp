#include "isotropy/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace isotropy {

// ---------------------------------------------------------------------------
// SampleBatch

SampleBatch::SampleBatch(std::size_t n, Provenance provenance) : n_(n), provenance_(std::move(provenance)) {
  if (n == 0) throw SamplerError("SampleBatch: dimension must be positive");
}

SampleBatch SampleBatch::from_vectors(const std::vector<Vector>& vectors, Provenance provenance) {
  if (vectors.empty()) throw SamplerError("SampleBatch: no vectors");
  SampleBatch batch(vectors.front().size(), std::move(provenance));
  batch.reserve(vectors.size());
  for (const auto& v : vectors) batch.push_back(v);
  return batch;
}

SampleBatch SampleBatch::weighted(const std::vector<Vector>& vectors, std::span<const double> weights,
                                  Provenance provenance) {
  SampleBatch batch = from_vectors(vectors, std::move(provenance));
  if (weights.size() != vectors.size()) throw SamplerError("SampleBatch: weights/vectors count mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw SamplerError("SampleBatch: weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw SamplerError("SampleBatch: weights sum to zero");
  batch.weights_.reserve(weights.size());
  for (double w : weights) batch.weights_.push_back(w / total);
  return batch;
}

void SampleBatch::push_back(std::span<const double> y) {
  if (y.size() != n_) throw SamplerError("SampleBatch: dimension mismatch");
  if (!all_finite(y)) throw SamplerError("SampleBatch: non-finite vector");
  if (!weights_.empty()) throw SamplerError("SampleBatch: cannot append to a weighted batch");
  data_.insert(data_.end(), y.begin(), y.end());
}

std::vector<Vector> SampleBatch::to_vectors() const {
  std::vector<Vector> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.emplace_back((*this)[i].begin(), (*this)[i].end());
  return out;
}

SampleBatch SampleBatch::transformed(const std::function<Vector(std::span<const double>)>& map) const {
  std::optional<SampleBatch> out;
  for (std::size_t i = 0; i < size(); ++i) {
    Vector y = map((*this)[i]);
    if (!out) {
      out.emplace(y.size(), provenance_);
      out->reserve(size());
    }
    out->data_.insert(out->data_.end(), y.begin(), y.end());
  }
  if (!out) throw SamplerError("SampleBatch: cannot transform an empty batch");
  out->weights_ = weights_;
  return std::move(*out);
}

// ---------------------------------------------------------------------------
// Direct samplers

Vector random_direction(std::size_t n, RandomStream& rng) {
  Vector d(n);
  double len = 0.0;
  do {
    for (double& v : d) v = rng.normal();
    len = norm(d);
  } while (len == 0.0);
  for (double& v : d) v /= len;
  return d;
}

bool supports_direct_sampling(const Body& body) noexcept {
  switch (body.kind()) {
    case BodyKind::Cube:
    case BodyKind::Ball:
    case BodyKind::Simplex:
    case BodyKind::Ellipsoid:
      return true;
    default:
      return false;
  }
}

namespace {

Vector unit_ball_point(std::size_t n, RandomStream& rng, double radius) {
  Vector x = random_direction(n, rng);
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
  for (double& v : x) v *= r;
  return x;
}

}  // namespace

Vector sample_direct(const Body& body, RandomStream& rng) {
  const std::size_t n = body.dim();
  switch (body.kind()) {
    case BodyKind::Cube: {
      const double a = body.as<Cube>().halfwidth;
      Vector x(n);
      for (double& v : x) v = a * (2.0 * rng.uniform() - 1.0);
      return x;
    }
    case BodyKind::Ball:
      return unit_ball_point(n, rng, body.as<Ball>().radius);
    case BodyKind::Simplex: {
      // Normalized exponential spacings are uniform on the standard simplex.
      const auto& vertices = body.as<Simplex>().vertices;
      Vector lambda(vertices.size());
      double total = 0.0;
      for (double& l : lambda) {
        l = rng.exponential();
        total += l;
      }
      Vector x(n, 0.0);
      for (std::size_t i = 0; i < vertices.size(); ++i)
        for (std::size_t k = 0; k < n; ++k) x[k] += (lambda[i] / total) * vertices[i][k];
      return x;
    }
    case BodyKind::Ellipsoid:
      return body.as<Ellipsoid>().shape.apply(unit_ball_point(n, rng, 1.0));
    default:
      throw SamplerError("sample_direct: no exact sampler for " + to_string(body.kind()) + "; use hit-and-run");
  }
}

// ---------------------------------------------------------------------------
// Hit-and-run

HitAndRunChain::HitAndRunChain(Body body, Vector x0, HitAndRunOptions options)
    : body_(std::move(body)), x_(std::move(x0)), options_(options) {
  if (x_.size() != body_.dim()) throw SamplerError("hit-and-run: start point has wrong dimension");
  if (!membership(body_, x_)) throw SamplerError("hit-and-run: start point lies outside the body");
  if (options_.thin == 0) throw SamplerError("hit-and-run: thin must be at least 1");
}

void HitAndRunChain::step(RandomStream& rng) {
  const Vector d = random_direction(x_.size(), rng);
  Chord c;
  try {
    c = chord(body_, x_, d);
  } catch (const GeometryError& e) {
    throw SamplerError(std::string("hit-and-run: chord failed: ") + e.what());
  }
  const double t = rng.uniform(c.t_lo, c.t_hi);
  for (std::size_t k = 0; k < x_.size(); ++k) x_[k] += t * d[k];
}

Vector HitAndRunChain::next(RandomStream& rng) {
  if (!burned_in_) {
    for (std::size_t i = 0; i < options_.burn_in; ++i) step(rng);
    burned_in_ = true;
  }
  for (std::size_t i = 0; i < options_.thin; ++i) step(rng);
  return x_;
}

std::vector<Vector> sample_hit_and_run(const Body& body, std::span<const double> x0, std::size_t burn_in,
                                       std::size_t thin, std::size_t count, RandomStream& rng) {
  HitAndRunChain chain(body, Vector(x0.begin(), x0.end()), {burn_in, thin});
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(chain.next(rng));
  return out;
}

// ---------------------------------------------------------------------------
// Truncated sampling

namespace {

double truncation_radius(double R, std::size_t n) {
  if (!(R > 0.0) || !std::isfinite(R)) throw SamplerError("truncated sampling: R must be positive");
  return R * std::sqrt(static_cast<double>(n));
}

}  // namespace

std::string to_string(TruncatedSampler::Mode mode) {
  return mode == TruncatedSampler::Mode::Rejection ? "rejection" : "hit-and-run";
}

TruncatedSampler::TruncatedSampler(Body body, double R, RandomStream& pilot_rng, TruncationOptions options)
    : base_(body),
      truncated_(Body::truncated(body, truncation_radius(R, body.dim()))),
      radius_(truncation_radius(R, body.dim())) {
  const std::size_t n = base_.dim();
  const HitAndRunOptions hr = options.hit_and_run.value_or(HitAndRunOptions::defaults(n));

  std::size_t draws = 0;
  std::size_t accepted = 0;
  if (supports_direct_sampling(base_)) {
    std::size_t round = 1024;
    while (draws < options.pilot_max_draws && accepted < options.pilot_target_accepts) {
      const std::size_t todo = std::min(round, options.pilot_max_draws - draws);
      for (std::size_t i = 0; i < todo; ++i)
        if (norm(sample_direct(base_, pilot_rng)) <= radius_) ++accepted;
      draws += todo;
      round *= 2;
    }
  } else {
    // Fraction of a (correlated) hit-and-run trajectory inside the ball.
    HitAndRunChain pilot(base_, Vector(n, 0.0), {hr.burn_in, 1});
    const std::size_t budget = std::min<std::size_t>(options.pilot_max_draws, std::size_t{1} << 18);
    while (draws < budget && accepted < options.pilot_target_accepts) {
      if (norm(pilot.next(pilot_rng)) <= radius_) ++accepted;
      ++draws;
    }
  }
  acceptance_ = draws == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(draws);

  if (acceptance_ < options.min_acceptance) {
    std::ostringstream msg;
    msg << "truncation too aggressive: estimated acceptance " << acceptance_ << " (" << accepted << "/" << draws
        << ") for R=" << R << ", n=" << n;
    throw SamplerError(msg.str());
  }
  if (!supports_direct_sampling(base_) || acceptance_ < options.mcmc_switch) {
    mode_ = Mode::HitAndRun;
    chain_ = std::make_unique<HitAndRunChain>(truncated_, Vector(n, 0.0), hr);
  }
}

Vector TruncatedSampler::draw(RandomStream& rng) {
  if (mode_ == Mode::HitAndRun) return chain_->next(rng);
  for (;;) {
    Vector x = sample_direct(base_, rng);
    if (norm(x) <= radius_) return x;
  }
}

Vector sample_truncated(const Body& body, double R, RandomStream& rng) {
  TruncatedSampler sampler(body, R, rng);
  return sampler.draw(rng);
}

// ---------------------------------------------------------------------------
// John distribution

std::size_t sample_john_index(const JohnDecomposition& jd, RandomStream& rng) {
  const auto& weights = jd.weights();
  double total = 0.0;
  for (double c : weights) total += c;
  const double target = rng.uniform() * total;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cumulative += weights[i];
    if (target < cumulative) return i;
  }
  return weights.size() - 1;
}

Vector sample_john(const JohnDecomposition& jd, RandomStream& rng) {
  const double scale = std::sqrt(static_cast<double>(jd.dim()));
  Vector y = jd.points()[sample_john_index(jd, rng)];
  for (double& v : y) v *= scale;
  return y;
}

SampleBatch john_outcomes(const JohnDecomposition& jd) {
  const double scale = std::sqrt(static_cast<double>(jd.dim()));
  std::vector<Vector> support;
  support.reserve(jd.size());
  for (const auto& z : jd.points()) {
    Vector y = z;
    for (double& v : y) v *= scale;
    support.push_back(std::move(y));
  }
  Vector probs(jd.size());
  for (std::size_t i = 0; i < jd.size(); ++i) probs[i] = jd.weights()[i] / static_cast<double>(jd.dim());
  return SampleBatch::weighted(support, probs, {"john-exact", 0, 0, ""});
}

// ---------------------------------------------------------------------------
// Type-erased samplers

Sampler direct_sampler(Body body) {
  if (!supports_direct_sampling(body))
    throw SamplerError("direct sampler: unsupported body " + to_string(body.kind()));
  const std::size_t n = body.dim();
  std::string id = body.describe();
  return Sampler(std::move(id), n, [b = std::move(body)](RandomStream& rng) { return sample_direct(b, rng); });
}

Sampler hit_and_run_sampler(Body body, std::optional<HitAndRunOptions> options) {
  const std::size_t n = body.dim();
  std::string id = "hit-and-run:" + body.describe();
  auto chain = std::make_shared<HitAndRunChain>(std::move(body), Vector(n, 0.0),
                                                options.value_or(HitAndRunOptions::defaults(n)));
  return Sampler(std::move(id), n, [chain](RandomStream& rng) { return chain->next(rng); });
}

Sampler john_sampler(JohnDecomposition jd, std::string id) {
  const std::size_t n = jd.dim();
  return Sampler(std::move(id), n, [j = std::move(jd)](RandomStream& rng) { return sample_john(j, rng); });
}

Sampler truncated_sampler(Body body, double R, RandomStream& pilot_rng, TruncationOptions options) {
  const std::size_t n = body.dim();
  std::ostringstream id;
  id << "truncated:" << body.describe() << ":R=" << R;
  auto sampler = std::make_shared<TruncatedSampler>(std::move(body), R, pilot_rng, options);
  return Sampler(id.str(), n, [sampler](RandomStream& rng) { return sampler->draw(rng); });
}

Sampler linear_image_sampler(Sampler inner, DenseMatrix a) {
  if (a.n() != inner.dim()) throw SamplerError("linear image: matrix dimension mismatch");
  const std::size_t n = inner.dim();
  std::string id = "linear:" + inner.id();
  auto shared = std::make_shared<Sampler>(std::move(inner));
  return Sampler(std::move(id), n, [shared, m = std::move(a)](RandomStream& rng) { return m.apply(shared->draw(rng)); });
}

SampleBatch draw_batch(Sampler& sampler, std::size_t m, RandomStream& rng) {
  if (m == 0) throw SamplerError("draw_batch: M must be at least 1");
  SampleBatch batch(sampler.dim(), {sampler.id(), rng.seed(), rng.stream_id(), ""});
  batch.reserve(m);
  for (std::size_t i = 0; i < m; ++i) batch.push_back(sampler.draw(rng));
  return batch;
}

}  // namespace isotropy
