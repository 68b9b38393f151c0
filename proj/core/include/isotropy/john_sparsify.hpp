#pragma once

// Randomized sparsification of a John decomposition: draw M contact
// points from the John distribution, keep the draw when the empirical
// second moment is within eps/2 of the identity and the sum is small,
// then recenter:
//
//   id = (n/M) sum_i (x_i + u) (x) (x_i + u) + S,   sum_i (x_i + u) = 0,
//
// with |S| < eps and |u| <= C / sqrt(M).

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "isotropy/geometry.hpp"
#include "isotropy/random_stream.hpp"
#include "isotropy/symlin.hpp"

namespace isotropy {

struct ApproxJohn {
  std::size_t n = 0;
  std::size_t m = 0;
  double eps = 0.0;
  std::vector<Vector> points;  // contact points x_i, each a point of the source decomposition
  Vector shift;                // u
  double residual_norm = 0.0;  // |S|
  int attempts = 0;
  int deviation_failures = 0;  // rejected draws, per condition
  int sum_failures = 0;
};

/// ceil((C / eps^2) n ln(n / eps)), floored at n + 1.
std::size_t choose_m(std::size_t n, double eps, double c);

struct SparsifyOptions {
  double c = 2.0;
  int max_attempts = 16;
};

/// Thrown when every attempt was rejected. Counts are per condition; a
/// single draw may fail both.
class SparsifyError : public std::runtime_error {
 public:
  SparsifyError(const std::string& what, int attempts, int deviation_failures, int sum_failures)
      : std::runtime_error(what),
        attempts_(attempts),
        deviation_failures_(deviation_failures),
        sum_failures_(sum_failures) {}

  int attempts() const noexcept { return attempts_; }
  int deviation_failures() const noexcept { return deviation_failures_; }
  int sum_failures() const noexcept { return sum_failures_; }

 private:
  int attempts_;
  int deviation_failures_;
  int sum_failures_;
};

/// An accepted draw whose residual still reached eps: M too small for
/// the eps/2 + 4n/M budget. A configuration problem, never retried.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Acceptance test for one draw y_1..y_M of the John distribution.
struct DrawCheck {
  double deviation;  // |(1/M) sum y (x) y - id|
  double sum_norm;   // |sum y_i|
  bool deviation_ok;
  bool sum_ok;
};

/// deviation <= eps/2 and |sum y_i| <= 2 sqrt(n M).
DrawCheck check_draw(const std::vector<Vector>& ys, double eps);

ApproxJohn sparsify(const JohnDecomposition& jd, double eps, RandomStream& rng, SparsifyOptions options = {});

struct JohnVerification {
  double residual_norm;  // |id - (n/M) sum (x_i+u)(x)(x_i+u)|, recomputed
  double centroid_norm;  // |sum (x_i + u)|
  double shift_sqrt_m;   // |u| sqrt(M)
  double max_unit_error; // max_i | |x_i| - 1 |
};

/// Recomputes every certificate quantity from the points and shift alone.
JohnVerification verify(const ApproxJohn& a);

/// Header "n M eps residual |u|", then M coordinate lines, then u.
void write_approx_john(std::ostream& out, const ApproxJohn& a);
ApproxJohn read_approx_john(std::istream& in);

}  // namespace isotropy
