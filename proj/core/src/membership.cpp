#include "flexifuzz/membership.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "flexifuzz/errors.hpp"

namespace flexifuzz {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw ArgumentError(msg);
}

void require_binary_labels(std::span<const int> y) {
  for (int label : y) require(label == 1 || label == -1, "labels must be -1 or +1");
}

DenseMatrix class_rows(const DenseMatrix& X, std::span<const int> y, int label) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] == label) idx.push_back(i);
  return X.select_rows(idx);
}

/// Geometry for the classes that actually occur; element 0 holds class -1,
/// element 1 holds class +1.
std::pair<ClassGeometry, ClassGeometry> per_class_geometry(
    const DenseMatrix& X, std::span<const int> y, CenterEstimator estimator) {
  DenseMatrix neg = class_rows(X, y, -1);
  DenseMatrix pos = class_rows(X, y, +1);
  require(neg.rows() > 0 && pos.rows() > 0, "empty class");
  return {class_geometry(neg, estimator), class_geometry(pos, estimator)};
}

}  // namespace

void validate(const MembershipConfig& config) {
  require(std::isfinite(config.lambda) && config.lambda >= 1.0,
          "lambda must be >= 1");
  require(config.k >= 1, "k must be >= 1");
  require(std::isfinite(config.delta) && config.delta > 0.0, "delta must be > 0");
  require(std::isfinite(config.gamma) && config.gamma >= 0.0 && config.gamma <= 1.0,
          "gamma must be in [0, 1]");
}

ClassGeometry class_geometry(const DenseMatrix& X_class, CenterEstimator estimator) {
  require(X_class.rows() > 0, "empty class");
  const std::size_t n = X_class.rows();
  const std::size_t p = X_class.cols();
  ClassGeometry g;
  g.center.resize(p);

  if (estimator == CenterEstimator::Mean) {
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += X_class(i, j);
      g.center[j] = s / static_cast<double>(n);
    }
  } else {
    std::vector<double> column(n);
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t i = 0; i < n; ++i) column[i] = X_class(i, j);
      std::sort(column.begin(), column.end());
      g.center[j] = (n % 2 == 1) ? column[n / 2]
                                 : (column[n / 2 - 1] + column[n / 2]) / 2.0;
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    g.radius = std::max(g.radius, euclidean_distance(X_class.row(i), g.center));
  return g;
}

double flexible_weight(double distance, const ClassGeometry& geometry, double lambda) {
  require(std::isfinite(lambda) && lambda >= 1.0, "lambda must be >= 1");
  require(std::isfinite(distance) && distance >= 0.0, "distance must be >= 0");
  require(std::isfinite(geometry.radius) && geometry.radius >= 0.0,
          "radius must be >= 0");
  if (geometry.radius == 0.0) return 1.0;  // all class samples coincide
  if (distance < geometry.radius / lambda) return 1.0;
  return geometry.radius / (lambda * distance);
}

double class_probability(const DenseMatrix& X, std::span<const int> y,
                         std::size_t i, int k) {
  const std::size_t n = X.rows();
  require(y.size() == n, "label vector length mismatch");
  require_binary_labels(y);
  require(i < n, "sample index out of range");
  require(k >= 1, "k must be >= 1");
  require(static_cast<std::size_t>(k) <= n - 1, "k must be at most n - 1");

  // Neighbors ordered by (squared distance, index); the query is excluded.
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    order.emplace_back(squared_distance(X.row(i), X.row(j)), j);
  }
  std::nth_element(order.begin(), order.begin() + (k - 1), order.end());

  int own = 0;
  for (int j = 0; j < k; ++j)
    if (y[order[static_cast<std::size_t>(j)].second] == y[i]) ++own;
  return static_cast<double>(own) / static_cast<double>(k);
}

ImbalanceInfo imbalance_ratio(std::span<const int> y) {
  require_binary_labels(y);
  std::size_t pos = 0, neg = 0;
  for (int label : y) (label == 1 ? pos : neg)++;
  require(pos > 0 && neg > 0, "both classes must be present");
  if (pos == neg) return {1.0, +1};
  if (pos < neg)
    return {static_cast<double>(neg) / static_cast<double>(pos), +1};
  return {static_cast<double>(pos) / static_cast<double>(neg), -1};
}

namespace detail {

std::vector<double> flexi_weights(const DenseMatrix& X, std::span<const int> y,
                                  CenterEstimator center, double lambda) {
  auto [neg, pos] = per_class_geometry(X, y, center);
  std::vector<double> mu(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const ClassGeometry& g = (y[i] == 1) ? pos : neg;
    mu[i] = flexible_weight(euclidean_distance(X.row(i), g.center), g, lambda);
  }
  return mu;
}

DenseMatrix knn_own_counts(const DenseMatrix& X, std::span<const int> y, int k_max) {
  const std::size_t n = X.rows();
  require(k_max >= 1 && static_cast<std::size_t>(k_max) <= n - 1,
          "k_max must be in [1, n-1]");
  DenseMatrix counts(n, static_cast<std::size_t>(k_max));
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      order.emplace_back(squared_distance(X.row(i), X.row(j)), j);
    }
    std::partial_sort(order.begin(), order.begin() + k_max, order.end());
    int own = 0;
    for (int k = 1; k <= k_max; ++k) {
      if (y[order[static_cast<std::size_t>(k - 1)].second] == y[i]) ++own;
      counts(i, static_cast<std::size_t>(k - 1)) = own;
    }
  }
  return counts;
}

double combine_flexi(double mu, double own_count, int k, const ImbalanceInfo& info,
                     int label) {
  const double p = own_count / static_cast<double>(k);
  double value = mu * p;
  value *= (label == info.minority_label) ? info.ratio : 1.0 / info.ratio;
  return std::max(value, kMembershipFloor);
}

}  // namespace detail

MembershipVector flexi_fuzz_membership(const DenseMatrix& X, std::span<const int> y,
                                       const MembershipConfig& config) {
  validate(config);
  const std::size_t n = X.rows();
  require(y.size() == n, "label vector length mismatch");
  require(n >= 2, "need at least two samples");
  require(static_cast<std::size_t>(config.k) <= n - 1, "k must be less than n");

  const ImbalanceInfo info = imbalance_ratio(y);
  const std::vector<double> mu =
      detail::flexi_weights(X, y, config.center, config.lambda);
  const DenseMatrix counts = detail::knn_own_counts(X, y, config.k);

  MembershipVector m;
  m.imbalance_ratio = info.ratio;
  m.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double own = counts(i, static_cast<std::size_t>(config.k - 1));
    m.values[i] = detail::combine_flexi(mu[i], own, config.k, info, y[i]);
  }
  return m;
}

MembershipVector center_lin_membership(const DenseMatrix& X, std::span<const int> y,
                                       double delta, CenterEstimator center) {
  require(std::isfinite(delta) && delta > 0.0, "delta must be > 0");
  require(y.size() == X.rows(), "label vector length mismatch");
  require_binary_labels(y);
  auto [neg, pos] = per_class_geometry(X, y, center);

  MembershipVector m;
  m.values.resize(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const ClassGeometry& g = (y[i] == 1) ? pos : neg;
    const double d = euclidean_distance(X.row(i), g.center);
    m.values[i] = 1.0 - d / (g.radius + delta);
  }
  return m;
}

MembershipVector center_exp_membership(const DenseMatrix& X, std::span<const int> y,
                                       double gamma, CenterEstimator center) {
  require(std::isfinite(gamma) && gamma >= 0.0 && gamma <= 1.0,
          "gamma must be in [0, 1]");
  require(y.size() == X.rows(), "label vector length mismatch");
  require_binary_labels(y);
  auto [neg, pos] = per_class_geometry(X, y, center);

  MembershipVector m;
  m.values.resize(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const ClassGeometry& g = (y[i] == 1) ? pos : neg;
    const double d = euclidean_distance(X.row(i), g.center);
    m.values[i] = 2.0 / (1.0 + std::exp(gamma * d));
  }
  return m;
}

MembershipVector uniform_membership(std::size_t n) {
  MembershipVector m;
  m.values.assign(n, 1.0);
  return m;
}

MembershipVector compute_membership(const DenseMatrix& X, std::span<const int> y,
                                    const MembershipConfig& config) {
  switch (config.scheme) {
    case MembershipScheme::Uniform:
      return uniform_membership(X.rows());
    case MembershipScheme::CenterLin:
      return center_lin_membership(X, y, config.delta, config.center);
    case MembershipScheme::CenterExp:
      return center_exp_membership(X, y, config.gamma, config.center);
    case MembershipScheme::FlexiFuzz:
      return flexi_fuzz_membership(X, y, config);
  }
  throw ArgumentError("unknown membership scheme");
}

}  // namespace flexifuzz
