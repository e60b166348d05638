#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "flexifuzz/errors.hpp"
#include "flexifuzz/evaluation.hpp"
#include "flexifuzz/rng.hpp"
#include "support/benchmark_table.hpp"
#include "support/oracles.hpp"

using namespace flexifuzz;

namespace {

std::vector<std::string> numbered_names(const std::string& prefix, std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

DenseMatrix benchmark_matrix() {
  DenseMatrix m(fixture::kBenchDatasets, fixture::kBenchModels);
  for (std::size_t i = 0; i < fixture::kBenchDatasets; ++i)
    for (std::size_t j = 0; j < fixture::kBenchModels; ++j)
      m(i, j) = fixture::benchmark_accuracy[i][j];
  return m;
}

Dataset blob_dataset(std::uint64_t seed, std::size_t n_maj, std::size_t n_min,
                     double separation = 3.0) {
  SeededRng rng(seed);
  const auto fx = oracle::make_blobs(rng, n_maj, n_min, 2, separation);
  Dataset ds;
  ds.name = "blobs";
  ds.feature_names = {"f0", "f1"};
  ds.X = fx.X;
  ds.y = fx.y;
  return ds;
}

}  // namespace

TEST_CASE("confusion counts") {
  SUBCASE("spec examples") {
    std::vector<int> t{1, 1, -1}, p{1, 1, -1};
    ConfusionCounts c = confusion(t, p);
    CHECK(c.tp == 2);
    CHECK(c.tn == 1);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);

    t = {1, -1};
    p = {-1, -1};
    c = confusion(t, p);
    CHECK(c.tp == 0);
    CHECK(c.tn == 1);
    CHECK(c.fp == 0);
    CHECK(c.fn == 1);
  }
  SUBCASE("random pair matches a four-way tally") {
    SeededRng rng(3);
    std::vector<int> t, p;
    for (int i = 0; i < 30; ++i) {
      t.push_back(rng.bounded(2) ? 1 : -1);
      p.push_back(rng.bounded(2) ? 1 : -1);
    }
    const ConfusionCounts c = confusion(t, p);
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    for (int i = 0; i < 30; ++i) {
      if (t[static_cast<std::size_t>(i)] == 1 && p[static_cast<std::size_t>(i)] == 1) tp++;
      if (t[static_cast<std::size_t>(i)] == -1 && p[static_cast<std::size_t>(i)] == -1) tn++;
      if (t[static_cast<std::size_t>(i)] == -1 && p[static_cast<std::size_t>(i)] == 1) fp++;
      if (t[static_cast<std::size_t>(i)] == 1 && p[static_cast<std::size_t>(i)] == -1) fn++;
    }
    CHECK(c.tp == tp);
    CHECK(c.tn == tn);
    CHECK(c.fp == fp);
    CHECK(c.fn == fn);
    CHECK(c.total() == 30);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(confusion(std::vector<int>{1}, std::vector<int>{1, -1}),
                    ArgumentError);
  }
}

TEST_CASE("metric formulas") {
  ConfusionCounts c{5, 3, 1, 1};
  MetricSet m = metrics(c);
  CHECK(*m.accuracy == 0.8);
  CHECK(*m.sensitivity == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(*m.specificity == 0.75);
  CHECK(*m.precision == doctest::Approx(5.0 / 6.0).epsilon(1e-15));

  // Undefined precision when tp = fp = 0.
  m = metrics(ConfusionCounts{0, 3, 0, 2});
  CHECK_FALSE(m.precision.has_value());
  CHECK(m.accuracy.has_value());
  CHECK(m.sensitivity.has_value());

  m = metrics(ConfusionCounts{4, 6, 0, 0});
  CHECK(*m.accuracy == 1.0);
  CHECK(*m.sensitivity == 1.0);
  CHECK(*m.specificity == 1.0);
  CHECK(*m.precision == 1.0);

  CHECK_THROWS_AS(metrics(ConfusionCounts{}), ArgumentError);
}

TEST_CASE("accuracy identity 1 - (fp+fn)/total") {
  SeededRng rng(4);
  for (int t = 0; t < 50; ++t) {
    ConfusionCounts c{rng.bounded(20), rng.bounded(20), rng.bounded(20),
                      rng.bounded(20)};
    if (c.total() == 0) continue;
    const MetricSet m = metrics(c);
    const double expected =
        1.0 - static_cast<double>(c.fp + c.fn) / static_cast<double>(c.total());
    CHECK(*m.accuracy == doctest::Approx(expected).epsilon(1e-15));
  }
}

TEST_CASE("default grids") {
  const HyperGrid g = HyperGrid::defaults();
  REQUIRE(g.C_values.size() == 11);
  REQUIRE(g.sigma_values.size() == 11);
  REQUIRE(g.lambda_values.size() == 10);
  REQUIRE(g.k_values.size() == 10);
  REQUIRE(g.gamma_values.size() == 10);
  CHECK(g.C_values.front() == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK(g.C_values.back() == doctest::Approx(1e5).epsilon(1e-12));
  CHECK(g.sigma_values.front() == 0.03125);
  CHECK(g.sigma_values.back() == 32.0);
  CHECK(g.lambda_values.front() == 1.0);
  CHECK(g.lambda_values.back() == 10.0);
  CHECK(g.k_values.front() == 1);
  CHECK(g.k_values.back() == 10);
  CHECK(g.gamma_values.front() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(g.gamma_values.back() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("average ranks") {
  SUBCASE("strict ordering") {
    DenseMatrix acc(1, 3);
    acc(0, 0) = 0.9;
    acc(0, 1) = 0.8;
    acc(0, 2) = 0.7;
    const RankTable t =
        average_ranks(acc, numbered_names("m", 3), numbered_names("d", 1));
    CHECK(t.ranks(0, 0) == 1.0);
    CHECK(t.ranks(0, 1) == 2.0);
    CHECK(t.ranks(0, 2) == 3.0);
  }
  SUBCASE("two-way tie shares the average rank") {
    DenseMatrix acc(1, 3);
    acc(0, 0) = 0.9;
    acc(0, 1) = 0.9;
    acc(0, 2) = 0.7;
    const RankTable t =
        average_ranks(acc, numbered_names("m", 3), numbered_names("d", 1));
    CHECK(t.ranks(0, 0) == 1.5);
    CHECK(t.ranks(0, 1) == 1.5);
    CHECK(t.ranks(0, 2) == 3.0);
  }
  SUBCASE("rows sum to p(p+1)/2 even with ties") {
    SeededRng rng(6);
    DenseMatrix acc(20, 7);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 0; j < 7; ++j)
        acc(i, j) = 0.1 * static_cast<double>(rng.bounded(8));  // force ties
    const RankTable t =
        average_ranks(acc, numbered_names("m", 7), numbered_names("d", 20));
    for (std::size_t i = 0; i < 20; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < 7; ++j) sum += t.ranks(i, j);
      CHECK(sum == 28.0);  // 7 * 8 / 2
    }
  }
  SUBCASE("rank row is invariant under a constant shift of one dataset") {
    SeededRng rng(7);
    DenseMatrix acc(5, 6);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        acc(i, j) = 0.25 * static_cast<double>(1 + rng.bounded(200));
    const RankTable before =
        average_ranks(acc, numbered_names("m", 6), numbered_names("d", 5));
    for (std::size_t j = 0; j < 6; ++j) acc(2, j) += 7.25;
    const RankTable after =
        average_ranks(acc, numbered_names("m", 6), numbered_names("d", 5));
    for (std::size_t j = 0; j < 6; ++j) CHECK(before.ranks(2, j) == after.ranks(2, j));
  }
  SUBCASE("missing entries are rejected") {
    DenseMatrix acc(1, 2);
    acc(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(
        average_ranks(acc, numbered_names("m", 2), numbered_names("d", 1)),
        ArgumentError);
  }
}

TEST_CASE("published benchmark table reproduces the reported average ranks") {
  const RankTable t = average_ranks(benchmark_matrix(),
                                    numbered_names("model", fixture::kBenchModels),
                                    numbered_names("dataset", fixture::kBenchDatasets));
  for (std::size_t j = 0; j < fixture::kBenchModels; ++j) {
    // Column 1 carries the source table's internal inconsistency; every other
    // column agrees to roughly a twentieth of a rank.
    const double tol = (j == 1) ? 0.30 : 0.055;
    CHECK(std::abs(t.average_ranks[j] - fixture::reference_average_ranks[j]) <= tol);
  }
}

TEST_CASE("friedman statistic") {
  SUBCASE("reference nine-model, thirty-dataset ranks") {
    const FriedmanResult r =
        friedman_statistic(fixture::reference_average_ranks, 9, 30);
    CHECK(r.chi2 == doctest::Approx(39.15).epsilon(0.0003));
    CHECK(r.f_stat == doctest::Approx(5.65).epsilon(0.002));
  }
  SUBCASE("identical ranks give chi2 = 0") {
    const std::vector<double> ranks(5, 3.0);  // (p+1)/2 for p = 5
    const FriedmanResult r = friedman_statistic(ranks, 5, 12);
    CHECK(r.chi2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.f_stat == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("p=2 hand evaluation") {
    const std::vector<double> ranks{1.0, 2.0};
    // 12*10/(2*3) * (1 + 4 - 2*9/4) = 20 * 0.5 = 10.
    CHECK(friedman_chi2(ranks, 2, 10) == doctest::Approx(10.0).epsilon(1e-12));
    // Perfect consistency makes chi2 = D(p-1), so the correction degenerates.
    CHECK_THROWS_AS(friedman_statistic(ranks, 2, 10), DegenerateStatisticError);
  }
  SUBCASE("degenerate denominator") {
    // Perfectly consistent two-model ranks: chi2 = D(p-1) exactly.
    const std::vector<double> ranks{1.0, 2.0};
    CHECK_THROWS_AS(friedman_statistic(ranks, 2, 2), DegenerateStatisticError);
  }
  SUBCASE("permutation invariance") {
    const std::vector<double> a{1.5, 3.0, 2.5, 4.0, 4.0};
    const std::vector<double> b{4.0, 4.0, 3.0, 2.5, 1.5};
    CHECK(friedman_statistic(a, 5, 8).chi2 ==
          doctest::Approx(friedman_statistic(b, 5, 8).chi2).epsilon(1e-15));
  }
  SUBCASE("argument validation") {
    CHECK_THROWS_AS(friedman_statistic(std::vector<double>{1.0}, 1, 5),
                    ArgumentError);
    CHECK_THROWS_AS(friedman_statistic(std::vector<double>{1.0, 2.0}, 3, 5),
                    ArgumentError);
  }
}

TEST_CASE("nemenyi critical difference") {
  CHECK(nemenyi_cd(9, 30, 3.102) == doctest::Approx(2.1934).epsilon(0.0002));
  CHECK(nemenyi_cd(2, 6, 1.0) == doctest::Approx(0.40825).epsilon(1e-4));
  // Quadrupling D halves the CD.
  CHECK(nemenyi_cd(7, 40, 2.9) ==
        doctest::Approx(nemenyi_cd(7, 10, 2.9) / 2.0).epsilon(1e-14));
  CHECK(nemenyi_q_005(9) == 3.102);
  CHECK(nemenyi_q_005(2) == 1.960);
  CHECK_THROWS_AS(nemenyi_q_005(1), ArgumentError);
  CHECK_THROWS_AS(nemenyi_q_005(25), ArgumentError);
  CHECK_THROWS_AS(nemenyi_cd(9, 30, 0.0), ArgumentError);
}

TEST_CASE("pairwise significance flags") {
  const std::vector<double> ranks{1.0, 2.0, 5.0};
  const auto flags = pairwise_significance(ranks, 2.5);
  REQUIRE(flags.size() == 3);
  CHECK_FALSE(flags[0].significant);  // |1-2| = 1
  CHECK(flags[1].significant);        // |1-5| = 4
  CHECK(flags[2].significant);        // |2-5| = 3
  CHECK(flags[1].rank_difference == 4.0);
}

TEST_CASE("grid search basics") {
  const Dataset train_ds = blob_dataset(50, 20, 15, 6.0);

  SUBCASE("single-point grid returns that point") {
    HyperGrid g;
    g.C_values = {2.0};
    g.sigma_values = {1.5};
    const GridSearchResult r =
        grid_search(train_ds, g, ModelFamily::PlainLssvm, 5, 1);
    CHECK(r.best.C == 2.0);
    CHECK(r.best.sigma == 1.5);
    CHECK(r.table.size() == 1);
    CHECK_FALSE(r.table[0].failed);
  }
  SUBCASE("exact ties prefer the smaller C") {
    // Fully separable fixture: both C values reach identical fold accuracy.
    HyperGrid g;
    g.C_values = {0.1, 10.0};
    g.sigma_values = {2.0};
    const GridSearchResult r =
        grid_search(train_ds, g, ModelFamily::PlainLssvm, 5, 1);
    REQUIRE(r.table.size() == 2);
    CHECK(r.table[0].mean_accuracy == r.table[1].mean_accuracy);
    CHECK(r.best.C == 0.1);
  }
  SUBCASE("sigma that separates beats sigma that underfits") {
    // Four-cluster XOR layout: only a local kernel can represent it.
    SeededRng rng(60);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    const double centers[4][2] = {{0, 0}, {4, 4}, {0, 4}, {4, 0}};
    for (int c = 0; c < 4; ++c)
      for (int i = 0; i < 12; ++i) {
        rows.push_back({centers[c][0] + 0.4 * rng.normal(),
                        centers[c][1] + 0.4 * rng.normal()});
        y.push_back(c < 2 ? 1 : -1);
      }
    Dataset xor_ds;
    xor_ds.name = "xor";
    xor_ds.feature_names = {"f0", "f1"};
    xor_ds.X = DenseMatrix::from_rows(rows);
    xor_ds.y = y;

    HyperGrid g;
    g.C_values = {1.0};
    g.sigma_values = {1.0, 32.0};
    const GridSearchResult r = grid_search(xor_ds, g, ModelFamily::PlainLssvm, 5, 2);
    CHECK(r.best.sigma == 1.0);
    REQUIRE(r.table.size() == 2);
    CHECK(r.table[0].mean_accuracy > r.table[1].mean_accuracy);
  }
  SUBCASE("deterministic per seed, including across thread counts") {
    HyperGrid g;
    g.C_values = {0.1, 1.0, 10.0};
    g.sigma_values = {0.5, 2.0};
    g.lambda_values = {1.0, 3.0};
    g.k_values = {1, 3};
    const GridSearchResult a =
        grid_search(train_ds, g, ModelFamily::FlexiFuzz2, 5, 9, 1);
    const GridSearchResult b =
        grid_search(train_ds, g, ModelFamily::FlexiFuzz2, 5, 9, 2);
    REQUIRE(a.table.size() == b.table.size());
    CHECK(a.table.size() == 3 * 2 * 2 * 2);
    for (std::size_t i = 0; i < a.table.size(); ++i) {
      CHECK(a.table[i].mean_accuracy == b.table[i].mean_accuracy);
      CHECK(a.table[i].fold_accuracies == b.table[i].fold_accuracies);
    }
    CHECK(a.best.C == b.best.C);
    CHECK(a.best.sigma == b.best.sigma);
    CHECK(a.best.lambda == b.best.lambda);
    CHECK(a.best.k == b.best.k);
  }
  SUBCASE("oversized k is recorded as a failed point, never selected") {
    const Dataset tiny = blob_dataset(51, 6, 6, 6.0);  // folds of ~9 training rows
    HyperGrid g;
    g.C_values = {1.0};
    g.sigma_values = {2.0};
    g.lambda_values = {1.0};
    g.k_values = {2, 50};
    const GridSearchResult r = grid_search(tiny, g, ModelFamily::FlexiFuzz1, 3, 3);
    REQUIRE(r.table.size() == 2);
    CHECK_FALSE(r.table[0].failed);
    CHECK(r.table[1].failed);
    CHECK(r.table[1].mean_accuracy == -std::numeric_limits<double>::infinity());
    CHECK(r.best.k == 2);
  }
  SUBCASE("gamma axis is swept only for the exponential family") {
    HyperGrid g;
    g.C_values = {1.0};
    g.sigma_values = {2.0};
    g.gamma_values = {0.2, 0.8};
    const GridSearchResult lin =
        grid_search(train_ds, g, ModelFamily::FsvmCilLin, 5, 4);
    CHECK(lin.table.size() == 1);
    const GridSearchResult exp_fam =
        grid_search(train_ds, g, ModelFamily::FsvmCilExp, 5, 4);
    CHECK(exp_fam.table.size() == 2);
    CHECK(exp_fam.best_config.membership.scheme == MembershipScheme::CenterExp);
  }
}

TEST_CASE("family names round-trip") {
  for (auto f : {ModelFamily::PlainLssvm, ModelFamily::FsvmCilLin,
                 ModelFamily::FsvmCilExp, ModelFamily::FlexiFuzz1,
                 ModelFamily::FlexiFuzz2})
    CHECK(family_from_name(family_name(f)) == f);
  CHECK_THROWS_AS(family_from_name("svm"), ArgumentError);
}
