#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flexifuzz/kernel_linalg.hpp"

namespace flexifuzz {

/// Numeric feature matrix with binary labels in {-1, +1}.
struct Dataset {
  std::string name;
  std::vector<std::string> feature_names;
  DenseMatrix X;
  std::vector<int> y;

  std::size_t n() const noexcept { return X.rows(); }
  std::size_t dim() const noexcept { return X.cols(); }
};

/// Explicit raw-label -> {-1,+1} mapping. Labels are never inferred from the
/// data; every raw value seen in the file must appear here.
struct LabelMapping {
  std::map<std::string, int> map;

  /// Parses "0=-1,1=1" style flag text.
  static LabelMapping parse(const std::string& text);
};

/// Loads a UTF-8, comma-delimited CSV with a header row. label_column selects
/// the label by header name, or by 0-based index when it is all digits.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const LabelMapping& mapping, const std::string& dataset_name = "");

struct SplitResult {
  Dataset train;
  Dataset test;
};

/// Seed-driven random split; train gets round(n * train_fraction) rows.
/// Throws SplitError when either partition would be single-class.
SplitResult split(const Dataset& ds, double train_fraction, std::uint64_t seed);

/// Per-feature z-score transform fitted on a training partition. Zero
/// standard deviations are replaced by 1 (population std, divide by n).
struct Standardizer {
  std::vector<double> means;
  std::vector<double> stds;

  void apply_inplace(DenseMatrix& X) const;
  DenseMatrix apply(const DenseMatrix& X) const;
  DenseMatrix invert(const DenseMatrix& X) const;
};

Standardizer fit_standardizer(const DenseMatrix& X);

struct StandardizeResult {
  Dataset train;
  std::vector<Dataset> others;
  Standardizer standardizer;
};

/// Fits on train, applies the same transform to train and every other
/// partition.
StandardizeResult standardize_fit_apply(const Dataset& train,
                                        const std::vector<Dataset>& others);

/// Flips exactly round(rate * n) labels at distinct indices chosen uniformly
/// without replacement by seed. Does not touch features.
std::vector<int> inject_label_noise(std::span<const int> y, double rate,
                                    std::uint64_t seed);

struct FoldSplit {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> validation_indices;
};

/// Stratified k-fold partition: per-class counts across validation folds
/// differ by at most one. Deterministic per seed.
std::vector<FoldSplit> stratified_kfold(const Dataset& ds, int folds,
                                        std::uint64_t seed);

/// One entry of a dataset manifest.
struct ManifestDataset {
  std::string name;
  std::string path;
  std::string label_column;
  LabelMapping mapping;
};

/// Reads the datasets of a manifest JSON file: either a top-level array of
/// {name, path, label_column, label_mapping} objects or an object with a
/// "datasets" array. Relative paths are resolved against the manifest's
/// directory.
std::vector<ManifestDataset> load_dataset_manifest(const std::string& path);

Dataset load_dataset(const ManifestDataset& entry);

}  // namespace flexifuzz
