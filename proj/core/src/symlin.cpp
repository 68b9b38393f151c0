#include "isotropy/symlin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace isotropy {

namespace {

void require_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (expected " << expected << ", got " << got << ")";
    throw LinAlgError(msg.str());
  }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require_dim(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// DenseMatrix

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector DenseMatrix::column(std::size_t j) const {
  Vector c(n_);
  for (std::size_t i = 0; i < n_; ++i) c[i] = (*this)(i, j);
  return c;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vector DenseMatrix::apply(std::span<const double> x) const {
  require_dim(n_, x.size(), "DenseMatrix::apply");
  Vector out(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
    out[i] = s;
  }
  return out;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  require_dim(a.n(), b.n(), "DenseMatrix product");
  const std::size_t n = a.n();
  DenseMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double DenseMatrix::max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require_dim(a.n(), b.n(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data_.size(); ++i) m = std::max(m, std::abs(a.data_[i] - b.data_[i]));
  return m;
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(std::size_t n) : n_(n), packed_(n * (n + 1) / 2, 0.0) {}

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
  return m;
}

SymMatrix SymMatrix::from_rows(const std::vector<Vector>& rows) {
  const std::size_t n = rows.size();
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    require_dim(n, rows[i].size(), "SymMatrix::from_rows");
    for (std::size_t j = i; j < n; ++j) {
      if (rows[i][j] != rows[j][i]) throw LinAlgError("SymMatrix::from_rows: input is not symmetric");
      m.set(i, j, rows[i][j]);
    }
  }
  if (!m.all_finite()) throw LinAlgError("SymMatrix::from_rows: non-finite entry");
  return m;
}

SymMatrix SymMatrix::from_dense(const DenseMatrix& a) {
  SymMatrix m(a.n());
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t j = i; j < a.n(); ++j) m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
  return m;
}

void SymMatrix::set(std::size_t i, std::size_t j, double v) { packed_[index(i, j)] = v; }

DenseMatrix SymMatrix::to_dense() const {
  DenseMatrix d(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) {
      d(i, j) = (*this)(i, j);
      d(j, i) = d(i, j);
    }
  return d;
}

Vector SymMatrix::apply(std::span<const double> x) const {
  require_dim(n_, x.size(), "SymMatrix::apply");
  Vector out(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
    out[i] = s;
  }
  return out;
}

double SymMatrix::quadratic_form(std::span<const double> x) const { return dot(x, apply(x)); }

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : packed_) m = std::max(m, std::abs(v));
  return m;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

bool SymMatrix::all_finite() const { return isotropy::all_finite(packed_); }

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  require_dim(n_, other.n_, "SymMatrix +");
  for (std::size_t k = 0; k < packed_.size(); ++k) packed_[k] += other.packed_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  require_dim(n_, other.n_, "SymMatrix -");
  for (std::size_t k = 0; k < packed_.size(); ++k) packed_[k] -= other.packed_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& v : packed_) v *= s;
  return *this;
}

SymMatrix& SymMatrix::shift_diagonal(double c) {
  for (std::size_t i = 0; i < n_; ++i) packed_[index(i, i)] += c;
  return *this;
}

// ---------------------------------------------------------------------------
// Rank-one accumulation

void RankOneAccumulator::add(std::span<const double> y, double w) {
  const std::size_t n = acc_.n();
  require_dim(n, y.size(), "rank_one_accumulate");
  if (!std::isfinite(w) || !all_finite(y)) throw LinAlgError("rank_one_accumulate: non-finite input");
  // Row-major walk over the packed triangle, matching SymMatrix storage.
  std::vector<double>& packed = acc_.packed_;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wy = w * y[i];
    for (std::size_t j = i; j < n; ++j) packed[k++] += wy * y[j];
  }
  ++count_;
}

SymMatrix rank_one_accumulate(SymMatrix acc, std::span<const double> y, double w) {
  RankOneAccumulator builder(std::move(acc));
  builder.add(y, w);
  return std::move(builder).take();
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi

namespace {

struct OffDiag {
  double max_off = 0.0;
  double max_diag = 0.0;
  double frobenius_off = 0.0;
};

OffDiag measure(const DenseMatrix& a) {
  OffDiag m;
  const std::size_t n = a.n();
  for (std::size_t i = 0; i < n; ++i) {
    m.max_diag = std::max(m.max_diag, std::abs(a(i, i)));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::abs(a(i, j));
      m.max_off = std::max(m.max_off, v);
      m.frobenius_off += 2.0 * v * v;
    }
  }
  m.frobenius_off = std::sqrt(m.frobenius_off);
  return m;
}

void rotate(DenseMatrix& a, DenseMatrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.n();

  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(p, k) = a(k, p);
    a(k, q) = s * akp + c * akq;
    a(q, k) = a(k, q);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

EigenDecomposition eigen(const SymMatrix& input) {
  if (!input.all_finite()) throw LinAlgError("eigen: non-finite matrix");
  const std::size_t n = input.n();
  DenseMatrix a = input.to_dense();
  DenseMatrix v = DenseMatrix::identity(n);

  int sweeps = 0;
  for (;;) {
    const OffDiag m = measure(a);
    if (m.max_off <= kJacobiTolerance * m.max_diag) break;
    if (sweeps == kJacobiMaxSweeps) {
      std::ostringstream msg;
      msg << "eigen: Jacobi did not converge in " << kJacobiMaxSweeps
          << " sweeps (off-diagonal norm " << m.frobenius_off << ")";
      throw ConvergenceError(msg.str(), m.frobenius_off);
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    ++sweeps;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out;
  out.sweeps = sweeps;
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = a(src, src);
    // Sign convention: first non-negligible component positive.
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(v(i, src)) > 1e-12) {
        sign = v(i, src) < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = sign * v(i, src);
  }
  return out;
}

Vector eigenvalues(const SymMatrix& a) { return eigen(a).eigenvalues; }

double operator_norm(const SymMatrix& a) {
  if (a.n() == 0) return 0.0;
  const Vector ev = eigenvalues(a);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

SymMatrix inv_sqrt(const SymMatrix& a, double floor) {
  if (!(floor > 0.0)) throw LinAlgError("inv_sqrt: floor must be positive");
  const EigenDecomposition ed = eigen(a);
  const std::size_t n = a.n();
  Vector scale(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = ed.eigenvalues[k];
    if (lambda < 0.0 && -lambda > floor) {
      std::ostringstream msg;
      msg << "inv_sqrt: not positive semidefinite within tolerance (eigenvalue " << lambda << ")";
      throw LinAlgError(msg.str());
    }
    scale[k] = 1.0 / std::sqrt(std::max(lambda, floor));
  }
  SymMatrix out(n);
  const DenseMatrix& q = ed.eigenvectors;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += q(i, k) * scale[k] * q(j, k);
      out.set(i, j, s);
    }
  return out;
}

}  // namespace isotropy
