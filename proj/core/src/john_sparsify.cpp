#include "isotropy/john_sparsify.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "isotropy/format.hpp"
#include "isotropy/samplers.hpp"

namespace isotropy {

std::size_t choose_m(std::size_t n, double eps, double c) {
  if (n == 0) throw std::invalid_argument("choose_m: n must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("choose_m: eps must lie in (0, 1)");
  if (!(c > 0.0)) throw std::invalid_argument("choose_m: C must be positive");
  const double dn = static_cast<double>(n);
  const double raw = std::ceil(c / (eps * eps) * dn * std::log(dn / eps));
  const auto m = static_cast<std::size_t>(raw);
  return std::max(m, n + 1);
}

DrawCheck check_draw(const std::vector<Vector>& ys, double eps) {
  const std::size_t m = ys.size();
  const std::size_t n = ys.front().size();
  RankOneAccumulator acc(n);
  Vector sum(n, 0.0);
  for (const auto& y : ys) {
    acc.add(y);
    for (std::size_t k = 0; k < n; ++k) sum[k] += y[k];
  }
  SymMatrix diff = acc.sum();
  diff *= 1.0 / static_cast<double>(m);
  diff.shift_diagonal(-1.0);

  DrawCheck c{};
  c.deviation = operator_norm(diff);
  c.sum_norm = norm(sum);
  c.deviation_ok = c.deviation <= eps / 2.0;
  // Chebyshev: E|sum y_i|^2 = M E|y|^2 = n M.
  c.sum_ok = c.sum_norm <= 2.0 * std::sqrt(static_cast<double>(n) * static_cast<double>(m));
  return c;
}

ApproxJohn sparsify(const JohnDecomposition& jd, double eps, RandomStream& rng, SparsifyOptions options) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("sparsify: eps must lie in (0, 1)");
  if (options.max_attempts < 1) throw std::invalid_argument("sparsify: max_attempts must be at least 1");
  const std::size_t n = jd.dim();
  const std::size_t m = choose_m(n, eps, options.c);
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double root_n = std::sqrt(dn);

  int deviation_failures = 0;
  int sum_failures = 0;
  std::vector<std::size_t> picks(m);
  std::vector<Vector> ys(m);
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    for (std::size_t i = 0; i < m; ++i) {
      picks[i] = sample_john_index(jd, rng);
      ys[i] = jd.points()[picks[i]];
      for (double& v : ys[i]) v *= root_n;
    }
    const DrawCheck check = check_draw(ys, eps);
    deviation_failures += check.deviation_ok ? 0 : 1;
    sum_failures += check.sum_ok ? 0 : 1;
    if (!check.deviation_ok || !check.sum_ok) continue;

    ApproxJohn out;
    out.n = n;
    out.m = m;
    out.eps = eps;
    out.attempts = attempt;
    out.deviation_failures = deviation_failures;
    out.sum_failures = sum_failures;
    out.points.reserve(m);
    Vector mean(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      out.points.push_back(jd.points()[picks[i]]);
      for (std::size_t k = 0; k < n; ++k) mean[k] += out.points.back()[k];
    }
    out.shift.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.shift[k] = -mean[k] / dm;

    // S = id - (n/M) sum x (x) x + n u (x) u, since sum x_i = -M u.
    RankOneAccumulator acc(n);
    for (const auto& x : out.points) acc.add(x);
    SymMatrix s = acc.sum();
    s *= -dn / dm;
    s.shift_diagonal(1.0);
    s = rank_one_accumulate(std::move(s), out.shift, dn);
    out.residual_norm = operator_norm(s);

    if (!(out.residual_norm < eps)) {
      std::ostringstream msg;
      msg << "certificate failed: residual " << out.residual_norm << " >= eps " << eps << " with M=" << m
          << " (increase C)";
      throw CertificateError(msg.str());
    }
    return out;
  }
  std::ostringstream msg;
  msg << "sparsify: all " << options.max_attempts << " attempts rejected (deviation > eps/2: " << deviation_failures
      << ", |sum y| too large: " << sum_failures << ")";
  throw SparsifyError(msg.str(), options.max_attempts, deviation_failures, sum_failures);
}

JohnVerification verify(const ApproxJohn& a) {
  JohnVerification v{};
  const std::size_t n = a.shift.size();
  const double m = static_cast<double>(a.points.size());
  SymMatrix frame(n);
  Vector centroid(n, 0.0);
  Vector shifted(n);
  for (const auto& x : a.points) {
    v.max_unit_error = std::max(v.max_unit_error, std::abs(norm(x) - 1.0));
    for (std::size_t k = 0; k < n; ++k) {
      shifted[k] = x[k] + a.shift[k];
      centroid[k] += shifted[k];
    }
    frame = rank_one_accumulate(std::move(frame), shifted, static_cast<double>(n) / m);
  }
  SymMatrix s = SymMatrix::identity(n) - frame;
  v.residual_norm = operator_norm(s);
  v.centroid_norm = norm(centroid);
  v.shift_sqrt_m = norm(a.shift) * std::sqrt(m);
  return v;
}

void write_approx_john(std::ostream& out, const ApproxJohn& a) {
  out << a.n << ' ' << a.m << ' ' << format_double(a.eps) << ' ' << format_double(a.residual_norm) << ' '
      << format_double(norm(a.shift)) << '\n';
  auto write_row = [&](const Vector& v) {
    for (std::size_t k = 0; k < v.size(); ++k) out << (k ? " " : "") << format_double(v[k]);
    out << '\n';
  };
  for (const auto& x : a.points) write_row(x);
  write_row(a.shift);
}

ApproxJohn read_approx_john(std::istream& in) {
  ApproxJohn a;
  double shift_norm = 0.0;
  if (!(in >> a.n >> a.m >> a.eps >> a.residual_norm >> shift_norm) || a.n == 0)
    throw std::runtime_error("read_approx_john: malformed header");
  auto read_row = [&]() {
    Vector v(a.n);
    for (double& c : v)
      if (!(in >> c)) throw std::runtime_error("read_approx_john: truncated coordinates");
    return v;
  };
  a.points.reserve(a.m);
  for (std::size_t i = 0; i < a.m; ++i) a.points.push_back(read_row());
  a.shift = read_row();
  return a;
}

}  // namespace isotropy
