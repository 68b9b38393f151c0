#include "isotropy/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "isotropy/format.hpp"

namespace isotropy {

SymMatrix empirical_second_moment(const SampleBatch& batch) {
  if (batch.empty()) throw std::invalid_argument("empirical_second_moment: empty batch");
  RankOneAccumulator acc(batch.dim());
  if (batch.is_weighted()) {
    for (std::size_t i = 0; i < batch.size(); ++i) acc.add(batch[i], batch.weight(i));
    return std::move(acc).take();
  }
  for (std::size_t i = 0; i < batch.size(); ++i) acc.add(batch[i]);
  SymMatrix t = std::move(acc).take();
  t *= 1.0 / static_cast<double>(batch.size());
  return t;
}

double deviation(const SymMatrix& t) {
  SymMatrix d = t;
  d.shift_diagonal(-1.0);
  return operator_norm(d);
}

double default_moment_order(std::size_t m) {
  return std::max(2.0, std::log(static_cast<double>(m)));
}

namespace {

// ln |y| without forming |y|^2, which overflows past ~1e154.
double log_norm(std::span<const double> y) {
  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return -std::numeric_limits<double>::infinity();
  double ss = 0.0;
  for (double v : y) ss += (v / scale) * (v / scale);
  return std::log(scale) + 0.5 * std::log(ss);
}

}  // namespace

double log_moment(const SampleBatch& batch, std::optional<double> p_opt) {
  if (batch.empty()) throw std::invalid_argument("log_moment: empty batch");
  const double p = p_opt.value_or(default_moment_order(batch.size()));
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("log_moment: p must be positive");

  std::vector<double> logs(batch.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    logs[i] = log_norm(batch[i]);
    top = std::max(top, logs[i]);
  }
  if (top == -std::numeric_limits<double>::infinity()) return 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) mean += batch.weight(i) * std::exp(p * (logs[i] - top));
  return std::exp(top + std::log(mean) / p);
}

std::string DeviationReport::csv_header() { return "n,M,seed,sampler,deviation,log_moment,rhs_shape,ratio"; }

std::string DeviationReport::csv_row() const {
  return std::to_string(n) + ',' + std::to_string(m) + ',' + std::to_string(seed) + ',' + csv_escape(sampler) +
         ',' + format_double(deviation) + ',' + format_double(log_moment) + ',' + format_double(rhs_shape) + ',' +
         format_double(ratio);
}

DeviationReport theorem1_report(const SampleBatch& batch) {
  if (batch.size() < 3) throw std::invalid_argument("theorem1_report: need M >= 3");
  DeviationReport r;
  r.n = batch.dim();
  r.m = batch.size();
  r.seed = batch.provenance().seed;
  r.sampler = batch.provenance().sampler;
  const double log_m = std::log(static_cast<double>(r.m));
  r.deviation = deviation(empirical_second_moment(batch));
  r.log_moment = log_moment(batch, log_m);
  r.rhs_shape = std::sqrt(log_m / static_cast<double>(r.m)) * r.log_moment;
  r.ratio = r.rhs_shape > 0.0 ? r.deviation / r.rhs_shape : 0.0;
  r.in_regime = r.rhs_shape < 1.0;
  return r;
}

bool epsilon_isotropy_check(const SymMatrix& t, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("epsilon_isotropy_check: eps must lie in (0, 1)");
  const Vector ev = eigenvalues(t);
  return ev.front() <= 1.0 + eps && ev.back() >= 1.0 - eps;
}

Whitening::Whitening(const SymMatrix& t, double floor) : inv_sqrt_(inv_sqrt(t, floor)) {}

SampleBatch Whitening::apply(const SampleBatch& batch) const {
  SampleBatch out = batch.transformed([&](std::span<const double> y) { return inv_sqrt_.apply(y); });
  out.provenance().sampler = "whitened:" + batch.provenance().sampler;
  return out;
}

SampleBatch whiten(const SymMatrix& t, const SampleBatch& batch) { return Whitening(t).apply(batch); }

std::vector<Vector> whiten(const SymMatrix& t, const std::vector<Vector>& points) {
  const Whitening w(t);
  std::vector<Vector> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(w.apply(p));
  return out;
}

}  // namespace isotropy
