#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flexifuzz/classifier.hpp"
#include "flexifuzz/dataio.hpp"

namespace flexifuzz {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t total() const noexcept { return tp + tn + fp + fn; }
};

/// Counts with +1 as the positive class.
ConfusionCounts confusion(std::span<const int> y_true, std::span<const int> y_pred);

/// Metrics are nullopt when their denominator is zero.
struct MetricSet {
  std::optional<double> accuracy;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> precision;
};

MetricSet metrics(const ConfusionCounts& c);

/// Default hyperparameter grids: C and sigma log grids over 10^-5..10^5 and
/// 2^-5..2^5, lambda and k over 1..10, gamma over 0.1..1.0.
struct HyperGrid {
  std::vector<double> C_values;
  std::vector<double> sigma_values;
  std::vector<double> lambda_values;
  std::vector<int> k_values;
  std::vector<double> gamma_values;

  static HyperGrid defaults();
};

enum class ModelFamily {
  PlainLssvm,   // uniform memberships
  FsvmCilLin,   // linear center-distance decay, delta fixed at 1e-6
  FsvmCilExp,   // exponential center-distance decay, gamma swept
  FlexiFuzz1,   // combined scheme, mean centers
  FlexiFuzz2,   // combined scheme, median centers
};

std::string family_name(ModelFamily family);
ModelFamily family_from_name(const std::string& name);
bool family_uses_lambda_k(ModelFamily family);
bool family_uses_gamma(ModelFamily family);

struct GridPoint {
  double C = 1.0;
  double sigma = 1.0;
  double lambda = 1.0;
  int k = 1;
  double gamma = 0.0;
};

TrainConfig make_train_config(ModelFamily family, const GridPoint& point);

struct GridPointResult {
  GridPoint point;
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
  bool failed = false;
  std::string failure;
};

struct GridSearchResult {
  ModelFamily family{};
  GridPoint best;
  TrainConfig best_config;
  double best_mean_accuracy = 0.0;
  std::vector<GridPointResult> table;
};

/// Stratified k-fold sweep over the family's axes of the grid. Mean
/// validation accuracy decides; exact ties go to the smaller C, then sigma,
/// lambda, k, gamma. Failed points are kept in the table but never win.
GridSearchResult grid_search(const Dataset& train, const HyperGrid& grid,
                             ModelFamily family, int folds, std::uint64_t seed,
                             unsigned threads = 0);

struct RankTable {
  std::vector<std::string> model_names;
  std::vector<std::string> dataset_names;
  DenseMatrix accuracy;       // datasets x models
  DenseMatrix ranks;          // same shape; best accuracy gets rank 1
  std::vector<double> average_ranks;
};

/// Per-dataset descending-accuracy ranks with average-rank ties.
RankTable average_ranks(const DenseMatrix& accuracy,
                        std::vector<std::string> model_names,
                        std::vector<std::string> dataset_names);

struct FriedmanResult {
  double chi2;
  double f_stat;  // Iman-Davenport correction
};

/// Chi-squared part alone: 12D/(p(p+1)) * (sum r_j^2 - p(p+1)^2/4).
double friedman_chi2(std::span<const double> avg_ranks, std::size_t p,
                     std::size_t D);

/// Chi-squared plus the Iman-Davenport F statistic. Throws
/// DegenerateStatisticError when D(p-1) - chi2 is not positive.
FriedmanResult friedman_statistic(std::span<const double> avg_ranks, std::size_t p,
                                  std::size_t D);

/// Critical difference q_alpha * sqrt(p (p + 1) / (6 D)).
double nemenyi_cd(std::size_t p, std::size_t D, double q_alpha);

/// Two-tailed Nemenyi critical values at alpha = 0.05 for p in [2, 20].
double nemenyi_q_005(std::size_t p);

struct PairwiseFlag {
  std::size_t first;
  std::size_t second;
  double rank_difference;
  bool significant;
};

std::vector<PairwiseFlag> pairwise_significance(std::span<const double> avg_ranks,
                                                double cd);

}  // namespace flexifuzz
