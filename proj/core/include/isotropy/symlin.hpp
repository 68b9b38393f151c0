#pragma once

// Dense symmetric linear algebra used by every other module: packed
// symmetric storage, rank-one accumulation, cyclic Jacobi spectra, the
// operator norm and the regularized inverse square root.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace isotropy {

using Vector = std::vector<double>;

/// Raised on dimension mismatches and non-finite inputs.
class LinAlgError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when Jacobi sweeps hit the cap; carries the off-diagonal residual.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Row-major dense square matrix. Used for eigenvector bases and
/// general products; symmetric data lives in SymMatrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  Vector column(std::size_t j) const;

  DenseMatrix transpose() const;
  Vector apply(std::span<const double> x) const;

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

  /// max_ij |a_ij - b_ij|
  static double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Symmetric n x n matrix storing the upper triangle (row-major, i <= j).
class SymMatrix {
 public:
  SymMatrix() = default;
  /// Zero matrix.
  explicit SymMatrix(std::size_t n);

  static SymMatrix zero(std::size_t n) { return SymMatrix(n); }
  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> d);
  /// Rows must form an exactly symmetric square matrix.
  static SymMatrix from_rows(const std::vector<Vector>& rows);
  /// Symmetrizes (a + a^T) / 2.
  static SymMatrix from_dense(const DenseMatrix& a);

  std::size_t n() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return packed_[index(i, j)]; }
  void set(std::size_t i, std::size_t j, double v);

  /// Packed upper triangle in accumulation order.
  std::span<const double> packed() const noexcept { return packed_; }

  DenseMatrix to_dense() const;
  Vector apply(std::span<const double> x) const;
  double quadratic_form(std::span<const double> x) const;
  double max_abs() const;
  double trace() const;
  bool all_finite() const;

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double s);
  /// Adds c to every diagonal entry.
  SymMatrix& shift_diagonal(double c);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }
  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  friend class RankOneAccumulator;

  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i + 1) / 2 + j;
  }

  std::size_t n_ = 0;
  std::vector<double> packed_;
};

/// Single-owner builder for sum_k w_k y_k (x) y_k. The triangle is
/// traversed row-major for every update, so a fixed input order gives
/// bit-identical results.
class RankOneAccumulator {
 public:
  explicit RankOneAccumulator(std::size_t n) : acc_(n) {}
  explicit RankOneAccumulator(SymMatrix start) : acc_(std::move(start)) {}

  void add(std::span<const double> y, double w = 1.0);

  std::size_t count() const noexcept { return count_; }
  const SymMatrix& sum() const noexcept { return acc_; }
  SymMatrix take() && { return std::move(acc_); }

 private:
  SymMatrix acc_;
  std::size_t count_ = 0;
};

/// acc + w * (y (x) y)
SymMatrix rank_one_accumulate(SymMatrix acc, std::span<const double> y, double w);

struct EigenDecomposition {
  Vector eigenvalues;       // descending
  DenseMatrix eigenvectors; // column k pairs with eigenvalues[k]
  int sweeps = 0;
};

/// Cyclic Jacobi. Converged once every off-diagonal magnitude is at most
/// kJacobiTolerance times the largest diagonal magnitude.
inline constexpr double kJacobiTolerance = 1e-12;
inline constexpr int kJacobiMaxSweeps = 64;

EigenDecomposition eigen(const SymMatrix& a);

/// Eigenvalues only (descending).
Vector eigenvalues(const SymMatrix& a);

/// l2 -> l2 norm, max_i |lambda_i|.
double operator_norm(const SymMatrix& a);

inline constexpr double kDefaultEigenFloor = 1e-8;

/// Q diag(max(lambda, floor)^{-1/2}) Q^T. Throws LinAlgError when an
/// eigenvalue is below -floor.
SymMatrix inv_sqrt(const SymMatrix& a, double floor = kDefaultEigenFloor);

// Vector helpers.
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
bool all_finite(std::span<const double> a);

}  // namespace isotropy
