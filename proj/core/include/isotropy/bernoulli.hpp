#pragma once

// Rademacher rank-one process |sum_i eps_i y_i (x) y_i|: Monte Carlo and
// exact (all 2^M sign patterns) expectations, the empirical constant in
//   E|sum eps_i y_i (x) y_i| <= C sqrt(ln M) max|y_i| |sum y_i (x) y_i|^{1/2},
// and the symmetrization inequality
//   E|(1/M) sum y_i (x) y_i - id| <= 2 E|(1/M) sum eps_i y_i (x) y_i|.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "isotropy/random_stream.hpp"
#include "isotropy/samplers.hpp"
#include "isotropy/symlin.hpp"

namespace isotropy {

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

/// Mean of a sequence of per-trial values, accumulated in trial order.
MonteCarloEstimate summarize(const std::vector<double>& values);

/// Fresh signs per trial.
MonteCarloEstimate rademacher_estimate(const std::vector<Vector>& points, std::size_t trials, RandomStream& rng);

inline constexpr std::size_t kMaxExactPoints = 20;

/// Exact expectation over all 2^M sign patterns (M <= 20). Patterns are
/// paired with their negation, so only those with eps_1 = +1 are formed.
double rademacher_exact(const std::vector<Vector>& points);

struct LemmaReport {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double estimate_se = 0.0;
  double q = 0.0;            // max_i |y_i|
  double base_norm = 0.0;    // |sum y_i (x) y_i|
  double bound_shape = 0.0;  // sqrt(ln M) Q sqrt(base_norm)
  double ratio = 0.0;

  static std::string csv_header();
  std::string csv_row() const;
};

/// Requires M >= 3.
LemmaReport lemma_ratio(const std::vector<Vector>& points, std::size_t trials, RandomStream& rng);

struct SymmetrizationResult {
  MonteCarloEstimate lhs;  // E|(1/M) sum y (x) y - id|
  MonteCarloEstimate rhs;  // 2 E|(1/M) sum eps y (x) y|
  double combined_se() const;
  /// lhs <= rhs (1 + 3 combined_se)
  bool holds() const;
};

SymmetrizationResult symmetrization_check(Sampler& sampler, std::size_t m, std::size_t trials, RandomStream& rng);

}  // namespace isotropy
