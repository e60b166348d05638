#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "flexifuzz/errors.hpp"
#include "flexifuzz/version.hpp"

namespace {

using namespace flexifuzz;
using namespace flexifuzz::cli;

void add_data_flags(CLI::App* app, DataOptions& opt) {
  app->add_option("--data", opt.data, "dataset CSV (header row, comma-separated)")
      ->required();
  app->add_option("--label-column", opt.label_column,
                  "label column, by header name or 0-based index")
      ->required();
  app->add_option("--label-map", opt.label_map,
                  "raw-label mapping, e.g. \"0=-1,1=1\"")
      ->required();
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Flexi-Fuzz weighted least-squares SVM toolkit"};
  app.set_version_flag("--version", std::string("flexifuzz ") + kVersion);
  app.require_subcommand(1);

  TrainOptions train_opt;
  auto* train_cmd = app.add_subcommand("train", "train one model and save it as JSON");
  add_data_flags(train_cmd, train_opt.input);
  train_cmd->add_option("--model", train_opt.model,
                        "flexi1|flexi2|lssvm|fsvm-lin|fsvm-exp");
  train_cmd->add_option("--C", train_opt.C, "regularization parameter");
  train_cmd->add_option("--sigma", train_opt.sigma, "Gaussian kernel width");
  train_cmd->add_option("--lambda", train_opt.lambda, "flexible parameter (flexi)");
  train_cmd->add_option("--k", train_opt.k, "kNN neighborhood size (flexi)");
  train_cmd->add_option("--gamma", train_opt.gamma, "decay strength (fsvm-exp)");
  train_cmd->add_option("--seed", train_opt.seed, "seed recorded in outputs");
  train_cmd->add_option("--out", train_opt.out, "model output path");

  SweepOptions bench_opt;
  auto* bench_cmd =
      app.add_subcommand("benchmark", "grid-search benchmark over a manifest");
  bench_cmd->add_option("--manifest", bench_opt.manifest, "run manifest JSON")
      ->required();
  bench_cmd->add_option("--out", bench_opt.out_dir, "output directory");
  auto* bench_seed = bench_cmd->add_option("--seed", bench_opt.seed, "run seed");
  bench_cmd->add_option("--folds", bench_opt.folds, "CV folds (default 5)");
  bench_cmd->add_option("--train-fraction", bench_opt.train_fraction,
                        "training split fraction (default 0.7)");
  bench_cmd->add_option("--threads", bench_opt.threads,
                        "worker threads (0 = hardware)");

  SweepOptions noise_opt;
  auto* noise_cmd = app.add_subcommand(
      "noise-sweep", "benchmark under training-label noise levels");
  noise_cmd->add_option("--manifest", noise_opt.manifest, "run manifest JSON")
      ->required();
  noise_cmd->add_option("--out", noise_opt.out_dir, "output directory");
  auto* noise_seed = noise_cmd->add_option("--seed", noise_opt.seed, "run seed");
  noise_cmd->add_option("--noise-rates", noise_opt.noise_rates,
                        "noise levels (default 0.05 0.1 0.2 0.3 0.4)");
  noise_cmd->add_option("--folds", noise_opt.folds, "CV folds (default 5)");
  noise_cmd->add_option("--train-fraction", noise_opt.train_fraction,
                        "training split fraction (default 0.7)");
  noise_cmd->add_option("--threads", noise_opt.threads,
                        "worker threads (0 = hardware)");

  SensitivityOptions sens_opt;
  auto* sens_cmd = app.add_subcommand(
      "sensitivity", "accuracy surface over a hyperparameter axis pair");
  add_data_flags(sens_cmd, sens_opt.input);
  sens_cmd->add_option("--model", sens_opt.model, "model family");
  sens_cmd->add_option("--axes", sens_opt.axes, "c-sigma or lambda-k");
  sens_cmd->add_option("--seed", sens_opt.seed, "run seed");
  sens_cmd->add_option("--folds", sens_opt.folds, "CV folds (default 5)");
  sens_cmd->add_option("--train-fraction", sens_opt.train_fraction,
                       "training split fraction (default 0.7)");
  sens_cmd->add_option("--threads", sens_opt.threads, "worker threads");
  sens_cmd->add_option("--out", sens_opt.out, "grid CSV output path");
  sens_cmd->add_option("--C-values", sens_opt.C_values, "override C grid");
  sens_cmd->add_option("--sigma-values", sens_opt.sigma_values,
                       "override sigma grid");
  sens_cmd->add_option("--lambda-values", sens_opt.lambda_values,
                       "override lambda grid");
  sens_cmd->add_option("--k-values", sens_opt.k_values, "override k grid");

  StatsOptions stats_opt;
  auto* stats_cmd = app.add_subcommand(
      "stats", "rank statistics over a dataset x model accuracy matrix");
  stats_cmd->add_option("--matrix", stats_opt.matrix, "accuracy matrix CSV")
      ->required();
  stats_cmd->add_option("--q-alpha", stats_opt.q_alpha,
                        "critical value override (default: bundled 0.05 table)");
  stats_cmd->add_option("--out", stats_opt.out, "stats JSON output path");

  CLI11_PARSE(app, argc, argv);

  bench_opt.seed_set = bench_seed->count() > 0;
  noise_opt.seed_set = noise_seed->count() > 0;

  if (train_cmd->parsed()) return cmd_train(train_opt);
  if (bench_cmd->parsed()) return cmd_benchmark(bench_opt);
  if (noise_cmd->parsed()) return cmd_noise_sweep(noise_opt);
  if (sens_cmd->parsed()) return cmd_sensitivity(sens_opt);
  if (stats_cmd->parsed()) return cmd_stats(stats_opt);
  return kExitInputError;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const TrainingError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const SingularSystemError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const DegenerateStatisticError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
