#include "flexifuzz/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "flexifuzz/errors.hpp"
#include "flexifuzz/parallel.hpp"

namespace flexifuzz {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ArgumentError(msg);
}

}  // namespace

ConfusionCounts confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  require(y_true.size() == y_pred.size(), "label vector length mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    require(y_true[i] == 1 || y_true[i] == -1, "labels must be -1 or +1");
    require(y_pred[i] == 1 || y_pred[i] == -1, "labels must be -1 or +1");
    if (y_true[i] == 1)
      (y_pred[i] == 1 ? c.tp : c.fn)++;
    else
      (y_pred[i] == -1 ? c.tn : c.fp)++;
  }
  return c;
}

MetricSet metrics(const ConfusionCounts& c) {
  require(c.total() > 0, "empty confusion counts");
  MetricSet m;
  const auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.sensitivity = ratio(c.tp, c.tp + c.fn);
  m.specificity = ratio(c.tn, c.fp + c.tn);
  m.precision = ratio(c.tp, c.tp + c.fp);
  return m;
}

HyperGrid HyperGrid::defaults() {
  HyperGrid g;
  for (int i = -5; i <= 5; ++i) g.C_values.push_back(std::pow(10.0, i));
  for (int i = -5; i <= 5; ++i) g.sigma_values.push_back(std::pow(2.0, i));
  for (int i = 1; i <= 10; ++i) g.lambda_values.push_back(static_cast<double>(i));
  for (int i = 1; i <= 10; ++i) g.k_values.push_back(i);
  for (int i = 1; i <= 10; ++i) g.gamma_values.push_back(0.1 * i);
  return g;
}

std::string family_name(ModelFamily family) {
  switch (family) {
    case ModelFamily::PlainLssvm: return "lssvm";
    case ModelFamily::FsvmCilLin: return "fsvm-lin";
    case ModelFamily::FsvmCilExp: return "fsvm-exp";
    case ModelFamily::FlexiFuzz1: return "flexi1";
    case ModelFamily::FlexiFuzz2: return "flexi2";
  }
  throw ArgumentError("unknown model family");
}

ModelFamily family_from_name(const std::string& name) {
  if (name == "lssvm") return ModelFamily::PlainLssvm;
  if (name == "fsvm-lin") return ModelFamily::FsvmCilLin;
  if (name == "fsvm-exp") return ModelFamily::FsvmCilExp;
  if (name == "flexi1") return ModelFamily::FlexiFuzz1;
  if (name == "flexi2") return ModelFamily::FlexiFuzz2;
  throw ArgumentError("unknown model family: " + name);
}

bool family_uses_lambda_k(ModelFamily family) {
  return family == ModelFamily::FlexiFuzz1 || family == ModelFamily::FlexiFuzz2;
}

bool family_uses_gamma(ModelFamily family) {
  return family == ModelFamily::FsvmCilExp;
}

TrainConfig make_train_config(ModelFamily family, const GridPoint& point) {
  TrainConfig config;
  config.C = point.C;
  config.kernel = KernelSpec(point.sigma);
  MembershipConfig& m = config.membership;
  switch (family) {
    case ModelFamily::PlainLssvm:
      m.scheme = MembershipScheme::Uniform;
      break;
    case ModelFamily::FsvmCilLin:
      m.scheme = MembershipScheme::CenterLin;
      m.center = CenterEstimator::Mean;
      m.delta = 1e-6;
      break;
    case ModelFamily::FsvmCilExp:
      m.scheme = MembershipScheme::CenterExp;
      m.center = CenterEstimator::Mean;
      m.gamma = point.gamma;
      break;
    case ModelFamily::FlexiFuzz1:
    case ModelFamily::FlexiFuzz2:
      m.scheme = MembershipScheme::FlexiFuzz;
      m.center = family == ModelFamily::FlexiFuzz1 ? CenterEstimator::Mean
                                                   : CenterEstimator::Median;
      m.lambda = point.lambda;
      m.k = point.k;
      break;
  }
  return config;
}

namespace {

/// Immutable per-fold context shared by all (sigma, point) tasks.
struct FoldContext {
  DenseMatrix train_X;
  std::vector<int> train_y;
  DenseMatrix validation_X;
  std::vector<int> validation_y;
  DenseMatrix train_d2;  // pairwise squared distances, fold-train rows

  // Membership vectors keyed by the family's swept axes; "" for families
  // without membership axes means the single precomputed vector.
  std::map<std::pair<double, int>, std::vector<double>> flexi;  // (lambda, k)
  std::map<double, std::vector<double>> exp_gamma;
  std::vector<double> fixed;  // uniform or center-lin
  std::string membership_error;
};

std::vector<double> membership_for_point(const FoldContext& ctx, ModelFamily family,
                                         const GridPoint& point) {
  if (family_uses_lambda_k(family)) {
    const auto it = ctx.flexi.find({point.lambda, point.k});
    if (it == ctx.flexi.end()) throw TrainingError(ctx.membership_error);
    return it->second;
  }
  if (family_uses_gamma(family)) return ctx.exp_gamma.at(point.gamma);
  return ctx.fixed;
}

}  // namespace

GridSearchResult grid_search(const Dataset& train, const HyperGrid& grid,
                             ModelFamily family, int folds, std::uint64_t seed,
                             unsigned threads) {
  require(!grid.C_values.empty() && !grid.sigma_values.empty(),
          "C and sigma grids must be non-empty");
  const std::vector<double> lambdas =
      family_uses_lambda_k(family) ? grid.lambda_values : std::vector<double>{1.0};
  const std::vector<int> ks =
      family_uses_lambda_k(family) ? grid.k_values : std::vector<int>{1};
  const std::vector<double> gammas =
      family_uses_gamma(family) ? grid.gamma_values : std::vector<double>{0.0};
  require(!lambdas.empty() && !ks.empty() && !gammas.empty(),
          "family grid axes must be non-empty");

  const std::vector<FoldSplit> fold_splits = stratified_kfold(train, folds, seed);

  // Enumeration order doubles as the tie-breaking order: ascending C, sigma,
  // lambda, k, gamma.
  std::vector<GridPoint> points;
  for (double C : grid.C_values)
    for (double sigma : grid.sigma_values)
      for (double lambda : lambdas)
        for (int k : ks)
          for (double gamma : gammas)
            points.push_back({C, sigma, lambda, k, gamma});

  // Per-fold contexts: distances and membership vectors are reused across the
  // whole (C, sigma) sweep.
  const int k_max = family_uses_lambda_k(family)
                        ? *std::max_element(ks.begin(), ks.end())
                        : 1;
  std::vector<FoldContext> contexts(fold_splits.size());
  for (std::size_t f = 0; f < fold_splits.size(); ++f) {
    FoldContext& ctx = contexts[f];
    ctx.train_X = train.X.select_rows(fold_splits[f].train_indices);
    ctx.validation_X = train.X.select_rows(fold_splits[f].validation_indices);
    for (std::size_t i : fold_splits[f].train_indices)
      ctx.train_y.push_back(train.y[i]);
    for (std::size_t i : fold_splits[f].validation_indices)
      ctx.validation_y.push_back(train.y[i]);
    ctx.train_d2 = pairwise_squared_distances(ctx.train_X);

    if (family_uses_lambda_k(family)) {
      try {
        const ImbalanceInfo info = imbalance_ratio(ctx.train_y);
        const DenseMatrix counts = detail::knn_own_counts(
            ctx.train_X, ctx.train_y,
            std::min<int>(k_max, static_cast<int>(ctx.train_y.size()) - 1));
        for (double lambda : lambdas) {
          const std::vector<double> mu = detail::flexi_weights(
              ctx.train_X, ctx.train_y,
              family == ModelFamily::FlexiFuzz1 ? CenterEstimator::Mean
                                                : CenterEstimator::Median,
              lambda);
          for (int k : ks) {
            if (static_cast<std::size_t>(k) >= ctx.train_y.size()) continue;
            std::vector<double> m(ctx.train_y.size());
            for (std::size_t i = 0; i < m.size(); ++i)
              m[i] = detail::combine_flexi(
                  mu[i], counts(i, static_cast<std::size_t>(k - 1)), k, info,
                  ctx.train_y[i]);
            ctx.flexi.emplace(std::make_pair(lambda, k), std::move(m));
          }
        }
        ctx.membership_error = "k must be less than the fold training size";
      } catch (const std::exception& e) {
        ctx.membership_error = e.what();
      }
    } else if (family_uses_gamma(family)) {
      for (double gamma : gammas)
        ctx.exp_gamma[gamma] = center_exp_membership(ctx.train_X, ctx.train_y,
                                                     gamma, CenterEstimator::Mean)
                                   .values;
    } else if (family == ModelFamily::FsvmCilLin) {
      ctx.fixed = center_lin_membership(ctx.train_X, ctx.train_y, 1e-6,
                                        CenterEstimator::Mean)
                      .values;
    } else {
      ctx.fixed.assign(ctx.train_y.size(), 1.0);
    }
  }

  // Work items: one per (fold, sigma); each runs the (lambda, k, C, gamma)
  // subsweep against a single kernel matrix. Results are keyed by point
  // index, so completion order cannot affect the output.
  struct Cell {
    double accuracy = 0.0;
    bool failed = false;
    std::string failure;
  };
  std::vector<std::vector<Cell>> cells(
      points.size(), std::vector<Cell>(fold_splits.size()));

  const std::size_t n_sigma = grid.sigma_values.size();
  parallel_for(fold_splits.size() * n_sigma, [&](std::size_t task) {
    const std::size_t f = task / n_sigma;
    const std::size_t s = task % n_sigma;
    const FoldContext& ctx = contexts[f];
    const double sigma = grid.sigma_values[s];
    const KernelSpec spec{sigma};
    const DenseMatrix K = kernel_matrix_from_squared_distances(ctx.train_d2, spec);
    const DenseMatrix K_cross = cross_kernel(ctx.train_X, ctx.validation_X, spec);

    for (std::size_t idx = 0; idx < points.size(); ++idx) {
      const GridPoint& pt = points[idx];
      if (pt.sigma != sigma) continue;
      Cell& cell = cells[idx][f];
      try {
        const std::vector<double> m = membership_for_point(ctx, family, pt);
        const detail::LssvmSolution sol =
            detail::solve_weighted_lssvm(K, ctx.train_y, m, pt.C);
        std::size_t correct = 0;
        for (std::size_t v = 0; v < ctx.validation_y.size(); ++v) {
          double dec = sol.bias;
          for (std::size_t i = 0; i < ctx.train_y.size(); ++i)
            dec += sol.alpha[i] * static_cast<double>(ctx.train_y[i]) * K_cross(i, v);
          if (sign_label(dec) == ctx.validation_y[v]) ++correct;
        }
        cell.accuracy = static_cast<double>(correct) /
                        static_cast<double>(ctx.validation_y.size());
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.failure = e.what();
      }
    }
  }, threads);

  GridSearchResult result;
  result.family = family;
  result.table.reserve(points.size());
  std::size_t best_idx = points.size();
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    GridPointResult r;
    r.point = points[idx];
    r.fold_accuracies.reserve(fold_splits.size());
    double sum = 0.0;
    for (std::size_t f = 0; f < fold_splits.size(); ++f) {
      const Cell& cell = cells[idx][f];
      if (cell.failed) {
        r.failed = true;
        if (r.failure.empty()) r.failure = cell.failure;
      }
      r.fold_accuracies.push_back(cell.accuracy);
      sum += cell.accuracy;
    }
    r.mean_accuracy = r.failed ? -std::numeric_limits<double>::infinity()
                               : sum / static_cast<double>(fold_splits.size());
    if (!r.failed &&
        (best_idx == points.size() ||
         r.mean_accuracy > result.table[best_idx].mean_accuracy))
      best_idx = idx;
    result.table.push_back(std::move(r));
  }

  if (best_idx == points.size())
    throw TrainingError("every grid point failed: " +
                        (result.table.empty() ? std::string("empty grid")
                                              : result.table.front().failure));
  result.best = result.table[best_idx].point;
  result.best_config = make_train_config(family, result.best);
  result.best_mean_accuracy = result.table[best_idx].mean_accuracy;
  return result;
}

RankTable average_ranks(const DenseMatrix& accuracy,
                        std::vector<std::string> model_names,
                        std::vector<std::string> dataset_names) {
  const std::size_t D = accuracy.rows();
  const std::size_t p = accuracy.cols();
  require(D > 0 && p > 0, "accuracy matrix must be non-empty");
  require(model_names.size() == p, "model name count mismatch");
  require(dataset_names.size() == D, "dataset name count mismatch");
  require(accuracy.all_finite(), "accuracy matrix has missing entries");

  RankTable table;
  table.model_names = std::move(model_names);
  table.dataset_names = std::move(dataset_names);
  table.accuracy = accuracy;
  table.ranks = DenseMatrix(D, p);
  table.average_ranks.assign(p, 0.0);

  std::vector<std::size_t> order(p);
  for (std::size_t i = 0; i < D; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (accuracy(i, a) != accuracy(i, b)) return accuracy(i, a) > accuracy(i, b);
      return a < b;
    });
    std::size_t pos = 0;
    while (pos < p) {
      std::size_t end = pos;
      while (end + 1 < p && accuracy(i, order[end + 1]) == accuracy(i, order[pos]))
        ++end;
      // Ties share the average of the positions they straddle (1-based).
      const double rank =
          (static_cast<double>(pos + 1) + static_cast<double>(end + 1)) / 2.0;
      for (std::size_t t = pos; t <= end; ++t) table.ranks(i, order[t]) = rank;
      pos = end + 1;
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < D; ++i) sum += table.ranks(i, j);
    table.average_ranks[j] = sum / static_cast<double>(D);
  }
  return table;
}

double friedman_chi2(std::span<const double> avg_ranks, std::size_t p,
                     std::size_t D) {
  require(p >= 2 && D >= 2, "need at least two models and two datasets");
  require(avg_ranks.size() == p, "rank vector length must equal p");
  const double pd = static_cast<double>(p);
  const double dd = static_cast<double>(D);
  double sum_sq = 0.0;
  for (double r : avg_ranks) sum_sq += r * r;
  return 12.0 * dd / (pd * (pd + 1.0)) *
         (sum_sq - pd * (pd + 1.0) * (pd + 1.0) / 4.0);
}

FriedmanResult friedman_statistic(std::span<const double> avg_ranks, std::size_t p,
                                  std::size_t D) {
  FriedmanResult out;
  out.chi2 = friedman_chi2(avg_ranks, p, D);
  const double dd = static_cast<double>(D);
  const double denom = dd * (static_cast<double>(p) - 1.0) - out.chi2;
  if (denom <= 0.0)
    throw DegenerateStatisticError(
        "Iman-Davenport denominator D(p-1) - chi2 is not positive");
  out.f_stat = (dd - 1.0) * out.chi2 / denom;
  return out;
}

double nemenyi_cd(std::size_t p, std::size_t D, double q_alpha) {
  require(p >= 2 && D >= 1, "need at least two models and one dataset");
  require(std::isfinite(q_alpha) && q_alpha > 0.0, "q_alpha must be positive");
  const double pd = static_cast<double>(p);
  return q_alpha * std::sqrt(pd * (pd + 1.0) / (6.0 * static_cast<double>(D)));
}

double nemenyi_q_005(std::size_t p) {
  // Two-tailed critical values of the studentized range statistic divided by
  // sqrt(2), infinite degrees of freedom, alpha = 0.05.
  static constexpr double table[] = {
      1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164, 3.219,
      3.268, 3.313, 3.354, 3.391, 3.426, 3.458, 3.489, 3.517, 3.544};
  require(p >= 2 && p <= 20, "q table covers 2..20 models");
  return table[p - 2];
}

std::vector<PairwiseFlag> pairwise_significance(std::span<const double> avg_ranks,
                                                double cd) {
  std::vector<PairwiseFlag> flags;
  for (std::size_t a = 0; a < avg_ranks.size(); ++a)
    for (std::size_t b = a + 1; b < avg_ranks.size(); ++b) {
      const double diff = std::abs(avg_ranks[a] - avg_ranks[b]);
      flags.push_back({a, b, diff, diff > cd});
    }
  return flags;
}

}  // namespace flexifuzz
