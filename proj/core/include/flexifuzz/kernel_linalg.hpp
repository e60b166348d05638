#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flexifuzz {

/// Gaussian kernel parameters. The kernel is
///   K(x, z) = exp(-||x - z||^2 / sigma^2),
/// i.e. sigma^2 in the denominator, not the 2*sigma^2 convention.
struct KernelSpec {
  explicit KernelSpec(double sigma_value);
  double sigma;
};

/// Dense row-major matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {entries_.data() + i * cols_, cols_};
  }

  double* data() noexcept { return entries_.data(); }
  const double* data() const noexcept { return entries_.data(); }
  const std::vector<double>& entries() const noexcept { return entries_; }

  /// New matrix containing the given rows, in the given order.
  DenseMatrix select_rows(std::span<const std::size_t> indices) const;

  bool all_finite() const noexcept;

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

double squared_distance(std::span<const double> x, std::span<const double> y);
double euclidean_distance(std::span<const double> x, std::span<const double> y);

/// exp(-||x-y||^2 / sigma^2); in (0, 1], exactly 1 for x == y.
double gaussian_kernel(std::span<const double> x, std::span<const double> y,
                       const KernelSpec& spec);

/// Symmetric matrix of pairwise squared Euclidean distances between rows of X.
DenseMatrix pairwise_squared_distances(const DenseMatrix& X);

/// Elementwise exp(-d2 / sigma^2) of a squared-distance matrix.
DenseMatrix kernel_matrix_from_squared_distances(const DenseMatrix& d2,
                                                 const KernelSpec& spec);

/// n x n Gaussian kernel matrix over the rows of X. Symmetric with an exact
/// unit diagonal.
DenseMatrix kernel_matrix(const DenseMatrix& X, const KernelSpec& spec);

/// rows(A) x rows(B) kernel block, entry (i, j) = K(A_i, B_j).
DenseMatrix cross_kernel(const DenseMatrix& A, const DenseMatrix& B,
                         const KernelSpec& spec);

/// Omega_ij = y_i * y_j * K_ij. Labels must be -1 or +1.
DenseMatrix labelled_kernel_matrix(const DenseMatrix& K, std::span<const int> y);

/// Solves A z = rhs by LU factorization with partial pivoting.
/// Throws SingularSystemError when a pivot falls below
/// 1e-12 * max|A_ij|, carrying the pivot index.
std::vector<double> solve_dense(const DenseMatrix& A, std::span<const double> rhs);

/// Max-norm of the residual A*z - rhs.
double residual_inf_norm(const DenseMatrix& A, std::span<const double> z,
                         std::span<const double> rhs);

}  // namespace flexifuzz
