#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flexifuzz/kernel_linalg.hpp"

namespace flexifuzz {

/// Class-center estimator. Median is coordinate-wise; even counts use the
/// midpoint of the two central order statistics.
enum class CenterEstimator { Mean, Median };

enum class MembershipScheme { Uniform, CenterLin, CenterExp, FlexiFuzz };

struct MembershipConfig {
  MembershipScheme scheme = MembershipScheme::Uniform;
  CenterEstimator center = CenterEstimator::Mean;
  double lambda = 1.0;  // flexible parameter, >= 1
  int k = 3;            // kNN neighborhood size, >= 1
  double delta = 1e-6;  // linear-decay offset, > 0
  double gamma = 0.5;   // exponential decay strength, in [0, 1]
};

/// Throws ArgumentError when a field is out of range.
void validate(const MembershipConfig& config);

/// Center and radius of one class; radius is the max Euclidean distance of
/// the class samples to the center.
struct ClassGeometry {
  std::vector<double> center;
  double radius = 0.0;
};

/// Per-sample fuzzy weights. imbalance_ratio is the majority/minority count
/// ratio used by the FlexiFuzz scheme (1.0 for the other schemes).
struct MembershipVector {
  std::vector<double> values;
  double imbalance_ratio = 1.0;
};

/// Weights are floored at this value so the weighted-loss diagonal stays
/// finite even when the kNN class probability is exactly zero.
inline constexpr double kMembershipFloor = 1e-6;

struct ImbalanceInfo {
  double ratio;        // majority count / minority count, >= 1
  int minority_label;  // +1 on ties
};

ClassGeometry class_geometry(const DenseMatrix& X_class, CenterEstimator estimator);

/// Piecewise flexible weight: 1 inside radius/lambda, radius/(lambda*d)
/// beyond. A degenerate zero radius yields 1 everywhere.
double flexible_weight(double distance, const ClassGeometry& geometry, double lambda);

/// Fraction of sample i's k nearest neighbors (self excluded, ties broken by
/// ascending index) that share its label.
double class_probability(const DenseMatrix& X, std::span<const int> y,
                         std::size_t i, int k);

ImbalanceInfo imbalance_ratio(std::span<const int> y);

/// Combined scheme: flexible weight x kNN class probability, scaled by the
/// imbalance ratio (minority up, majority down), floored at kMembershipFloor.
MembershipVector flexi_fuzz_membership(const DenseMatrix& X, std::span<const int> y,
                                       const MembershipConfig& config);

/// 1 - d/(r + delta), linear decay from the class center.
MembershipVector center_lin_membership(const DenseMatrix& X, std::span<const int> y,
                                       double delta, CenterEstimator center);

/// 2 / (1 + exp(gamma * d)), exponential decay from the class center.
MembershipVector center_exp_membership(const DenseMatrix& X, std::span<const int> y,
                                       double gamma, CenterEstimator center);

MembershipVector uniform_membership(std::size_t n);

/// Dispatch on config.scheme.
MembershipVector compute_membership(const DenseMatrix& X, std::span<const int> y,
                                    const MembershipConfig& config);

namespace detail {

/// Flexible weights for every sample against its own class geometry.
std::vector<double> flexi_weights(const DenseMatrix& X, std::span<const int> y,
                                  CenterEstimator center, double lambda);

/// own_counts(i, k-1) = number of sample i's k nearest neighbors sharing its
/// label, for k = 1..k_max. Same neighbor ordering as class_probability.
DenseMatrix knn_own_counts(const DenseMatrix& X, std::span<const int> y, int k_max);

/// One sample's combined FlexiFuzz value; shared by the public scheme and the
/// grid-search fast path so both produce bit-identical weights.
double combine_flexi(double mu, double own_count, int k, const ImbalanceInfo& info,
                     int label);

}  // namespace detail

}  // namespace flexifuzz
