#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flexifuzz::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNumericalError = 3;
inline constexpr int kExitPartialFailure = 4;

struct DataOptions {
  std::string data;
  std::string label_column;
  std::string label_map;
};

struct TrainOptions {
  DataOptions input;
  std::string model = "flexi1";
  double C = 1.0;
  double sigma = 1.0;
  double lambda = 2.0;
  int k = 3;
  double gamma = 0.5;
  std::uint64_t seed = 0;
  std::string out = "model.json";
};

struct SweepOptions {
  std::string manifest;
  std::string out_dir;            // overrides manifest output_dir
  bool seed_set = false;          // CLI seed overrides manifest seed
  std::uint64_t seed = 0;
  std::vector<double> noise_rates;  // noise-sweep only; empty = default levels
  int folds = 5;
  double train_fraction = 0.7;
  unsigned threads = 0;
};

struct SensitivityOptions {
  DataOptions input;
  std::string model = "flexi1";
  std::string axes = "c-sigma";  // or "lambda-k"
  std::uint64_t seed = 0;
  int folds = 5;
  double train_fraction = 0.7;
  unsigned threads = 0;
  std::string out = "sensitivity.csv";
  // Optional grid overrides (empty = defaults).
  std::vector<double> C_values;
  std::vector<double> sigma_values;
  std::vector<double> lambda_values;
  std::vector<int> k_values;
};

struct StatsOptions {
  std::string matrix;
  double q_alpha = 0.0;  // 0 = look up the bundled alpha=0.05 table
  std::string out = "stats.json";
};

int cmd_train(const TrainOptions& opt);
int cmd_benchmark(const SweepOptions& opt);
int cmd_noise_sweep(const SweepOptions& opt);
int cmd_sensitivity(const SensitivityOptions& opt);
int cmd_stats(const StatsOptions& opt);

}  // namespace flexifuzz::cli
