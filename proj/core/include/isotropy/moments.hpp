#pragma once

// Empirical second moments, deviation from the identity, the log-M moment
// of |y|, the deviation-bound ratio, epsilon-isotropy and whitening.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isotropy/samplers.hpp"
#include "isotropy/symlin.hpp"

namespace isotropy {

/// T = sum_i w_i y_i (x) y_i with w_i = 1/M unless the batch is weighted.
/// Accumulated in batch order.
SymMatrix empirical_second_moment(const SampleBatch& batch);

/// |T - id| in operator norm.
double deviation(const SymMatrix& t);

/// max(2, ln M).
double default_moment_order(std::size_t m);

/// (mean |y_i|^p)^{1/p}, evaluated as
/// exp(L* + ln(mean exp(p (L_i - L*))) / p) with L_i = ln |y_i|.
double log_moment(const SampleBatch& batch, std::optional<double> p = std::nullopt);

/// One draw's worth of both sides of the deviation bound
///   E|T - id| <= C sqrt(ln M / M) (E|y|^{ln M})^{1/ln M}.
/// `ratio` is the empirical constant C for this draw.
struct DeviationReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::string sampler;
  double deviation = 0.0;
  double log_moment = 0.0;
  double rhs_shape = 0.0;
  double ratio = 0.0;
  /// rhs_shape < 1: the regime where the bound is asserted. Reported,
  /// not enforced.
  bool in_regime = false;

  static std::string csv_header();
  std::string csv_row() const;
};

/// Requires M >= 3. Uses p = ln M for the moment (natural log).
DeviationReport theorem1_report(const SampleBatch& batch);

/// Every eigenvalue of T in [1 - eps, 1 + eps]; requires 0 < eps < 1.
bool epsilon_isotropy_check(const SymMatrix& t, double eps);

/// x -> T^{-1/2} x for a fixed second moment T.
class Whitening {
 public:
  explicit Whitening(const SymMatrix& t, double floor = kDefaultEigenFloor);

  const SymMatrix& matrix() const noexcept { return inv_sqrt_; }
  Vector apply(std::span<const double> x) const { return inv_sqrt_.apply(x); }
  SampleBatch apply(const SampleBatch& batch) const;

 private:
  SymMatrix inv_sqrt_;
};

SampleBatch whiten(const SymMatrix& t, const SampleBatch& batch);
std::vector<Vector> whiten(const SymMatrix& t, const std::vector<Vector>& points);

}  // namespace isotropy
