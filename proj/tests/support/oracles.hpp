#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written from the definitions, without
// calling into the code under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "flexifuzz/kernel_linalg.hpp"
#include "flexifuzz/rng.hpp"

namespace oracle {

inline double gaussian(std::span<const double> x, std::span<const double> y,
                       double sigma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    d2 += d * d;
  }
  return std::exp(-d2 / (sigma * sigma));
}

/// Plain Gaussian elimination with partial pivoting; independent of the
/// library solver.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    if (std::abs(a[piv][k]) == 0.0) throw std::runtime_error("oracle: singular");
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii][j] * x[j];
    x[ii] = s / a[ii][ii];
  }
  return x;
}

/// Smallest eigenvalue of a symmetric matrix by the cyclic Jacobi method.
inline double smallest_eigenvalue(const flexifuzz::DenseMatrix& m) {
  const std::size_t n = m.rows();
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m(i, j);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-18) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
      }
    }
  }
  double smallest = a[0][0];
  for (std::size_t i = 1; i < n; ++i) smallest = std::min(smallest, a[i][i]);
  return smallest;
}

/// KNN class probability by full sort on (squared distance, index).
inline double knn_probability(const flexifuzz::DenseMatrix& X,
                              const std::vector<int>& y, std::size_t i, int k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t j = 0; j < X.rows(); ++j) {
    if (j == i) continue;
    double s = 0.0;
    for (std::size_t f = 0; f < X.cols(); ++f) {
      const double diff = X(i, f) - X(j, f);
      s += diff * diff;
    }
    d.emplace_back(s, j);
  }
  std::sort(d.begin(), d.end());
  int own = 0;
  for (int t = 0; t < k; ++t)
    if (y[d[static_cast<std::size_t>(t)].second] == y[i]) ++own;
  return static_cast<double>(own) / static_cast<double>(k);
}

/// Random Gaussian matrix built on the library's portable RNG.
inline flexifuzz::DenseMatrix random_matrix(flexifuzz::SeededRng& rng,
                                            std::size_t rows, std::size_t cols,
                                            double scale = 1.0) {
  flexifuzz::DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  return m;
}

/// Two-blob binary fixture: majority class -1 at the origin, minority class
/// +1 offset by `separation` in every coordinate.
struct BlobFixture {
  flexifuzz::DenseMatrix X;
  std::vector<int> y;
};

inline BlobFixture make_blobs(flexifuzz::SeededRng& rng, std::size_t n_majority,
                              std::size_t n_minority, std::size_t dim,
                              double separation) {
  BlobFixture fx;
  fx.X = flexifuzz::DenseMatrix(n_majority + n_minority, dim);
  for (std::size_t i = 0; i < n_majority + n_minority; ++i) {
    const bool minority = i >= n_majority;
    for (std::size_t j = 0; j < dim; ++j)
      fx.X(i, j) = rng.normal() + (minority ? separation : 0.0);
    fx.y.push_back(minority ? +1 : -1);
  }
  // Interleave so splits and folds see both classes everywhere.
  const std::vector<std::size_t> perm = rng.permutation(fx.y.size());
  flexifuzz::DenseMatrix xs(fx.X.rows(), fx.X.cols());
  std::vector<int> ys(fx.y.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = 0; j < fx.X.cols(); ++j) xs(i, j) = fx.X(perm[i], j);
    ys[i] = fx.y[perm[i]];
  }
  fx.X = std::move(xs);
  fx.y = std::move(ys);
  return fx;
}

}  // namespace oracle
