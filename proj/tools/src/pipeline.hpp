#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flexifuzz/dataio.hpp"
#include "flexifuzz/evaluation.hpp"

namespace flexifuzz::cli {

/// Derived-seed stream tags: every run seed fans out into one stream per
/// randomized stage so stages stay independent but reproducible.
inline constexpr std::uint64_t kSplitStream = 1;
inline constexpr std::uint64_t kNoiseStream = 2;
inline constexpr std::uint64_t kFoldStream = 3;

struct ProtocolOptions {
  double train_fraction = 0.7;
  int folds = 5;
  double noise_rate = 0.0;  // training labels only; test stays clean
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct PreparedSplit {
  Dataset train;  // standardized, labels possibly noisy
  Dataset test;   // standardized, labels clean
  Standardizer standardizer;
  double imbalance_ratio = 1.0;
};

/// split -> inject noise into the training labels -> fit/apply z-scoring.
PreparedSplit prepare_split(const Dataset& ds, const ProtocolOptions& opt);

struct ModelRunResult {
  ModelFamily family{};
  GridPoint best;
  double cv_accuracy = 0.0;
  MetricSet test;
  ConfusionCounts counts;
  GridSearchResult search;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double imbalance_ratio = 1.0;
};

/// Full protocol for one (dataset, model family): grid search on the prepared
/// training split, retrain at the selected configuration, score the clean
/// test partition.
ModelRunResult run_protocol(const Dataset& ds, ModelFamily family,
                            const HyperGrid& grid, const ProtocolOptions& opt);

/// Same, reusing an already prepared split (the noise sweep prepares once per
/// rate and runs every model against it).
ModelRunResult run_protocol_on_split(const PreparedSplit& split, ModelFamily family,
                                     const HyperGrid& grid,
                                     const ProtocolOptions& opt);

/// Run manifest: datasets plus models, grid overrides, seed, noise rates and
/// output directory. CLI flags override manifest values.
struct RunManifest {
  std::vector<ManifestDataset> datasets;
  std::vector<ModelFamily> models;
  HyperGrid grid;
  std::uint64_t seed = 0;
  std::vector<double> noise_rates;
  std::string output_dir;
};

RunManifest load_run_manifest(const std::string& path);

}  // namespace flexifuzz::cli
