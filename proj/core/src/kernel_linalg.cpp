#include "flexifuzz/kernel_linalg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

#include "flexifuzz/errors.hpp"

namespace flexifuzz {

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require(bool cond, const std::string& msg) {
  if (!cond) throw ArgumentError(msg);
}

}  // namespace

KernelSpec::KernelSpec(double sigma_value) : sigma(sigma_value) {
  require(std::isfinite(sigma) && sigma > 0.0, "kernel sigma must be positive");
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == m.cols(), "ragged row list");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> indices) const {
  DenseMatrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    require(indices[i] < rows_, "row index out of range");
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(indices[i], j);
  }
  return out;
}

bool DenseMatrix::all_finite() const noexcept {
  for (double v : entries_)
    if (!std::isfinite(v)) return false;
  return true;
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
  return std::sqrt(squared_distance(x, y));
}

double gaussian_kernel(std::span<const double> x, std::span<const double> y,
                       const KernelSpec& spec) {
  return std::exp(-squared_distance(x, y) / (spec.sigma * spec.sigma));
}

DenseMatrix pairwise_squared_distances(const DenseMatrix& X) {
  require(!X.empty(), "empty sample matrix");
  const std::size_t n = X.rows();
  DenseMatrix d2(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = squared_distance(X.row(i), X.row(j));
      d2(i, j) = d;
      d2(j, i) = d;
    }
  }
  return d2;
}

DenseMatrix kernel_matrix_from_squared_distances(const DenseMatrix& d2,
                                                 const KernelSpec& spec) {
  const double inv = 1.0 / (spec.sigma * spec.sigma);
  DenseMatrix k(d2.rows(), d2.cols());
  for (std::size_t i = 0; i < d2.rows(); ++i)
    for (std::size_t j = 0; j < d2.cols(); ++j) k(i, j) = std::exp(-d2(i, j) * inv);
  return k;
}

DenseMatrix kernel_matrix(const DenseMatrix& X, const KernelSpec& spec) {
  return kernel_matrix_from_squared_distances(pairwise_squared_distances(X), spec);
}

DenseMatrix cross_kernel(const DenseMatrix& A, const DenseMatrix& B,
                         const KernelSpec& spec) {
  require(A.cols() == B.cols(), "dimension mismatch");
  DenseMatrix k(A.rows(), B.rows());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < B.rows(); ++j)
      k(i, j) = gaussian_kernel(A.row(i), B.row(j), spec);
  return k;
}

DenseMatrix labelled_kernel_matrix(const DenseMatrix& K, std::span<const int> y) {
  require(K.rows() == K.cols(), "kernel matrix must be square");
  require(y.size() == K.rows(), "label vector length mismatch");
  for (int label : y)
    require(label == 1 || label == -1, "labels must be -1 or +1");
  DenseMatrix omega(K.rows(), K.cols());
  for (std::size_t i = 0; i < K.rows(); ++i)
    for (std::size_t j = 0; j < K.cols(); ++j)
      omega(i, j) = static_cast<double>(y[i] * y[j]) * K(i, j);
  return omega;
}

std::vector<double> solve_dense(const DenseMatrix& A, std::span<const double> rhs) {
  require(A.rows() == A.cols() && A.rows() > 0, "matrix must be square and non-empty");
  require(rhs.size() == A.rows(), "rhs length mismatch");
  require(A.all_finite(), "matrix entries must be finite");

  const auto n = static_cast<Eigen::Index>(A.rows());
  Eigen::Map<const RowMajorMatrix> a(A.data(), n, n);
  const double max_abs = a.cwiseAbs().maxCoeff();

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double pivot_floor = 1e-12 * max_abs;
  const auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(diag(i)) <= pivot_floor) {
      throw SingularSystemError(
          "singular or near-singular system: pivot " + std::to_string(i) +
              " has magnitude " + std::to_string(std::abs(diag(i))),
          static_cast<std::size_t>(i));
    }
  }

  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
  Eigen::VectorXd z = lu.solve(b);
  return {z.data(), z.data() + n};
}

double residual_inf_norm(const DenseMatrix& A, std::span<const double> z,
                         std::span<const double> rhs) {
  require(A.rows() == rhs.size() && A.cols() == z.size(), "dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < A.cols(); ++j) acc += A(i, j) * z[j];
    worst = std::max(worst, std::abs(acc - rhs[i]));
  }
  return worst;
}

}  // namespace flexifuzz
