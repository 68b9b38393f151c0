#include "isotropy/bernoulli.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isotropy/format.hpp"

namespace isotropy {

namespace {

// Packed y (x) y for each point, so a sign pattern is a weighted sum of rows.
std::vector<SymMatrix> outer_products(const std::vector<Vector>& points) {
  std::vector<SymMatrix> out;
  out.reserve(points.size());
  const std::size_t n = points.front().size();
  for (const auto& y : points) out.push_back(rank_one_accumulate(SymMatrix(n), y, 1.0));
  return out;
}

SymMatrix signed_sum(const std::vector<SymMatrix>& outers, const std::vector<double>& signs) {
  SymMatrix s(outers.front().n());
  for (std::size_t i = 0; i < outers.size(); ++i) {
    if (signs[i] > 0.0) {
      s += outers[i];
    } else {
      s -= outers[i];
    }
  }
  return s;
}

void require_points(const std::vector<Vector>& points, const char* what) {
  if (points.empty()) throw std::invalid_argument(std::string(what) + ": no points");
  const std::size_t n = points.front().size();
  for (const auto& p : points)
    if (p.size() != n || n == 0) throw std::invalid_argument(std::string(what) + ": inconsistent dimensions");
}

}  // namespace

MonteCarloEstimate summarize(const std::vector<double>& values) {
  MonteCarloEstimate e;
  e.trials = values.size();
  if (values.empty()) return e;
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return e;
}

MonteCarloEstimate rademacher_estimate(const std::vector<Vector>& points, std::size_t trials, RandomStream& rng) {
  require_points(points, "rademacher_estimate");
  if (trials == 0) throw std::invalid_argument("rademacher_estimate: trials must be positive");
  const auto outers = outer_products(points);
  std::vector<double> signs(points.size());
  std::vector<double> norms(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    for (double& s : signs) s = rng.sign();
    norms[t] = operator_norm(signed_sum(outers, signs));
  }
  return summarize(norms);
}

double rademacher_exact(const std::vector<Vector>& points) {
  require_points(points, "rademacher_exact");
  const std::size_t m = points.size();
  if (m > kMaxExactPoints) throw std::invalid_argument("rademacher_exact: M > 20 (2^M patterns)");
  const auto outers = outer_products(points);
  const std::uint64_t half = std::uint64_t{1} << (m - 1);
  std::vector<double> signs(m);
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < half; ++mask) {
    signs[0] = 1.0;
    for (std::size_t i = 1; i < m; ++i) signs[i] = (mask >> (i - 1)) & 1u ? -1.0 : 1.0;
    const double value = operator_norm(signed_sum(outers, signs));
    if ((mask & 1023u) == 0) {
      for (double& s : signs) s = -s;
      const double mirrored = operator_norm(signed_sum(outers, signs));
      if (std::abs(mirrored - value) > 1e-12 * std::max(1.0, value))
        throw std::logic_error("rademacher_exact: sign symmetry violated");
    }
    total += value;
  }
  return total / static_cast<double>(half);
}

std::string LemmaReport::csv_header() { return "M,n,trials,seed,estimate,Q,base_norm,bound_shape,ratio"; }

std::string LemmaReport::csv_row() const {
  return std::to_string(m) + ',' + std::to_string(n) + ',' + std::to_string(trials) + ',' + std::to_string(seed) +
         ',' + format_double(estimate) + ',' + format_double(q) + ',' + format_double(base_norm) + ',' +
         format_double(bound_shape) + ',' + format_double(ratio);
}

LemmaReport lemma_ratio(const std::vector<Vector>& points, std::size_t trials, RandomStream& rng) {
  require_points(points, "lemma_ratio");
  if (points.size() < 3) throw std::invalid_argument("lemma_ratio: need M >= 3");
  LemmaReport r;
  r.m = points.size();
  r.n = points.front().size();
  r.trials = trials;
  r.seed = rng.seed();
  const MonteCarloEstimate est = rademacher_estimate(points, trials, rng);
  r.estimate = est.mean;
  r.estimate_se = est.std_error;
  RankOneAccumulator base(r.n);
  for (const auto& y : points) {
    r.q = std::max(r.q, norm(y));
    base.add(y);
  }
  r.base_norm = operator_norm(base.sum());
  r.bound_shape = std::sqrt(std::log(static_cast<double>(r.m))) * r.q * std::sqrt(r.base_norm);
  r.ratio = r.bound_shape > 0.0 ? r.estimate / r.bound_shape : 0.0;
  return r;
}

double SymmetrizationResult::combined_se() const {
  return std::sqrt(lhs.std_error * lhs.std_error + rhs.std_error * rhs.std_error);
}

bool SymmetrizationResult::holds() const { return lhs.mean <= rhs.mean * (1.0 + 3.0 * combined_se()); }

SymmetrizationResult symmetrization_check(Sampler& sampler, std::size_t m, std::size_t trials, RandomStream& rng) {
  if (m == 0 || trials == 0) throw std::invalid_argument("symmetrization_check: M and trials must be positive");
  const std::size_t n = sampler.dim();
  const double inv_m = 1.0 / static_cast<double>(m);
  std::vector<double> lhs(trials), rhs(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    RankOneAccumulator plain(n), signed_acc(n);
    for (std::size_t i = 0; i < m; ++i) {
      const Vector y = sampler.draw(rng);
      plain.add(y);
      signed_acc.add(y, rng.sign());
    }
    SymMatrix dev = plain.sum();
    dev *= inv_m;
    dev.shift_diagonal(-1.0);
    SymMatrix rad = signed_acc.sum();
    rad *= inv_m;
    lhs[t] = operator_norm(dev);
    rhs[t] = 2.0 * operator_norm(rad);
  }
  return {summarize(lhs), summarize(rhs)};
}

}  // namespace isotropy
