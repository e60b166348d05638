#include "flexifuzz/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flexifuzz/errors.hpp"
#include "flexifuzz/rng.hpp"

namespace flexifuzz {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ArgumentError(msg);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trimmed(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, std::size_t row, std::size_t col) {
  const std::string t = trimmed(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(value)) {
    throw ParseError("non-numeric cell '" + field + "' at row " +
                         std::to_string(row) + ", column " + std::to_string(col),
                     row, col);
  }
  return value;
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> indices) {
  Dataset out;
  out.name = ds.name;
  out.feature_names = ds.feature_names;
  out.X = ds.X.select_rows(indices);
  out.y.reserve(indices.size());
  for (std::size_t i : indices) out.y.push_back(ds.y[i]);
  return out;
}

bool has_both_classes(std::span<const int> y) {
  bool pos = false, neg = false;
  for (int label : y) (label == 1 ? pos : neg) = true;
  return pos && neg;
}

}  // namespace

LabelMapping LabelMapping::parse(const std::string& text) {
  LabelMapping m;
  std::stringstream ss(text);
  std::string pair;
  while (std::getline(ss, pair, ',')) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos)
      throw ArgumentError("label mapping entries must look like raw=-1 or raw=1");
    const std::string raw = trimmed(pair.substr(0, eq));
    const std::string target = trimmed(pair.substr(eq + 1));
    if (target != "1" && target != "+1" && target != "-1")
      throw ArgumentError("label mapping targets must be -1 or +1, got '" + target + "'");
    m.map[raw] = (target == "-1") ? -1 : 1;
  }
  if (m.map.empty()) throw ArgumentError("empty label mapping");
  return m;
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const LabelMapping& mapping, const std::string& dataset_name) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("no data rows in " + path);
  const std::vector<std::string> header = split_fields(line);

  std::size_t label_idx = header.size();
  const bool numeric_selector =
      !label_column.empty() &&
      std::all_of(label_column.begin(), label_column.end(),
                  [](unsigned char c) { return std::isdigit(c); });
  if (numeric_selector) {
    label_idx = static_cast<std::size_t>(std::stoul(label_column));
    if (label_idx >= header.size())
      throw ArgumentError("label column index out of range: " + label_column);
  } else {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (trimmed(header[j]) == label_column) label_idx = j;
    if (label_idx == header.size())
      throw ArgumentError("label column not found: " + label_column);
  }

  Dataset ds;
  ds.name = dataset_name.empty()
                ? std::filesystem::path(path).stem().string()
                : dataset_name;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != label_idx) ds.feature_names.push_back(trimmed(header[j]));

  std::vector<std::vector<double>> rows;
  std::size_t file_row = 1;
  while (std::getline(in, line)) {
    ++file_row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size())
      throw ParseError("row " + std::to_string(file_row) + " has " +
                           std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(header.size()),
                       file_row, 0);
    std::vector<double> features;
    features.reserve(header.size() - 1);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j == label_idx) continue;
      features.push_back(parse_number(fields[j], file_row, j + 1));
    }
    const std::string raw_label = trimmed(fields[label_idx]);
    const auto it = mapping.map.find(raw_label);
    if (it == mapping.map.end())
      throw ParseError("unknown label value '" + raw_label + "' at row " +
                           std::to_string(file_row),
                       file_row, label_idx + 1);
    ds.y.push_back(it->second);
    rows.push_back(std::move(features));
  }

  if (rows.empty()) throw ParseError("no data rows in " + path);
  if (rows.size() < 2) throw ArgumentError("dataset needs at least two rows");
  if (!has_both_classes(ds.y))
    throw ArgumentError("dataset requires both classes: " + path);

  ds.X = DenseMatrix::from_rows(rows);
  return ds;
}

SplitResult split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  require(std::isfinite(train_fraction) && train_fraction > 0.0 &&
              train_fraction < 1.0,
          "train_fraction must be in (0, 1)");
  const std::size_t n = ds.n();
  require(n >= 2, "need at least two samples to split");

  const auto n_train = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * train_fraction));
  if (n_train == 0 || n_train == n)
    throw SplitError("split would leave an empty partition");

  SeededRng rng(seed);
  const std::vector<std::size_t> perm = rng.permutation(n);
  const std::span<const std::size_t> train_idx(perm.data(), n_train);
  const std::span<const std::size_t> test_idx(perm.data() + n_train, n - n_train);

  SplitResult out{subset(ds, train_idx), subset(ds, test_idx)};
  if (!has_both_classes(out.train.y))
    throw SplitError("training partition is single-class (seed " +
                     std::to_string(seed) + ")");
  if (!has_both_classes(out.test.y))
    throw SplitError("test partition is single-class (seed " +
                     std::to_string(seed) + ")");
  return out;
}

void Standardizer::apply_inplace(DenseMatrix& X) const {
  require(X.cols() == means.size(), "standardizer dimension mismatch");
  for (std::size_t i = 0; i < X.rows(); ++i)
    for (std::size_t j = 0; j < X.cols(); ++j)
      X(i, j) = (X(i, j) - means[j]) / stds[j];
}

DenseMatrix Standardizer::apply(const DenseMatrix& X) const {
  DenseMatrix out = X;
  apply_inplace(out);
  return out;
}

DenseMatrix Standardizer::invert(const DenseMatrix& X) const {
  require(X.cols() == means.size(), "standardizer dimension mismatch");
  DenseMatrix out = X;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out(i, j) = out(i, j) * stds[j] + means[j];
  return out;
}

Standardizer fit_standardizer(const DenseMatrix& X) {
  require(X.rows() > 0, "cannot fit standardizer on empty data");
  const std::size_t n = X.rows();
  const std::size_t p = X.cols();
  Standardizer s;
  s.means.resize(p);
  s.stds.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += X(i, j);
    const double mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = X(i, j) - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    s.means[j] = mean;
    s.stds[j] = (sd == 0.0) ? 1.0 : sd;
  }
  return s;
}

StandardizeResult standardize_fit_apply(const Dataset& train,
                                        const std::vector<Dataset>& others) {
  StandardizeResult out;
  out.standardizer = fit_standardizer(train.X);
  out.train = train;
  out.standardizer.apply_inplace(out.train.X);
  out.others.reserve(others.size());
  for (const Dataset& ds : others) {
    Dataset t = ds;
    out.standardizer.apply_inplace(t.X);
    out.others.push_back(std::move(t));
  }
  return out;
}

std::vector<int> inject_label_noise(std::span<const int> y, double rate,
                                    std::uint64_t seed) {
  require(std::isfinite(rate) && rate >= 0.0 && rate < 1.0,
          "noise rate must be in [0, 1)");
  std::vector<int> out(y.begin(), y.end());
  const auto flips = static_cast<std::size_t>(
      std::llround(rate * static_cast<double>(y.size())));
  if (flips == 0) return out;
  SeededRng rng(seed);
  for (std::size_t i : rng.sample_without_replacement(y.size(), flips))
    out[i] = -out[i];
  return out;
}

std::vector<FoldSplit> stratified_kfold(const Dataset& ds, int folds,
                                        std::uint64_t seed) {
  require(folds >= 2, "folds must be >= 2");
  const std::size_t n = ds.n();

  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < n; ++i) (ds.y[i] == 1 ? pos : neg).push_back(i);
  require(pos.size() >= static_cast<std::size_t>(folds) &&
              neg.size() >= static_cast<std::size_t>(folds),
          "each class needs at least `folds` members");

  SeededRng rng(seed);
  rng.shuffle(neg);
  rng.shuffle(pos);

  // Deal each class into folds: the first (count % folds) folds get one extra.
  std::vector<FoldSplit> out(static_cast<std::size_t>(folds));
  auto deal = [&](const std::vector<std::size_t>& cls) {
    const std::size_t base = cls.size() / static_cast<std::size_t>(folds);
    const std::size_t extra = cls.size() % static_cast<std::size_t>(folds);
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < out.size(); ++f) {
      const std::size_t take = base + (f < extra ? 1 : 0);
      for (std::size_t t = 0; t < take; ++t)
        out[f].validation_indices.push_back(cls[cursor++]);
    }
  };
  deal(neg);
  deal(pos);

  for (std::size_t f = 0; f < out.size(); ++f) {
    auto& fold = out[f];
    std::sort(fold.validation_indices.begin(), fold.validation_indices.end());
    std::vector<bool> in_validation(n, false);
    for (std::size_t i : fold.validation_indices) in_validation[i] = true;
    for (std::size_t i = 0; i < n; ++i)
      if (!in_validation[i]) fold.train_indices.push_back(i);
  }
  return out;
}

std::vector<ManifestDataset> load_dataset_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open manifest: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
  }

  const nlohmann::json* list = nullptr;
  if (doc.is_array()) {
    list = &doc;
  } else if (doc.is_object() && doc.contains("datasets") && doc["datasets"].is_array()) {
    list = &doc["datasets"];
  } else {
    throw ParseError("manifest must be an array of datasets or contain a 'datasets' array");
  }

  const auto base_dir = std::filesystem::path(path).parent_path();
  std::vector<ManifestDataset> out;
  for (const auto& item : *list) {
    ManifestDataset entry;
    if (!item.contains("path"))
      throw ParseError("manifest dataset entry missing 'path'");
    entry.path = item["path"].get<std::string>();
    if (std::filesystem::path(entry.path).is_relative())
      entry.path = (base_dir / entry.path).string();
    entry.name = item.value("name",
                            std::filesystem::path(entry.path).stem().string());
    entry.label_column = item.value("label_column", std::string{});
    if (entry.label_column.empty())
      throw ParseError("manifest dataset '" + entry.name + "' missing 'label_column'");
    if (!item.contains("label_mapping"))
      throw ParseError("manifest dataset '" + entry.name + "' missing 'label_mapping'");
    const auto& lm = item["label_mapping"];
    if (lm.is_string()) {
      entry.mapping = LabelMapping::parse(lm.get<std::string>());
    } else if (lm.is_object()) {
      for (const auto& [raw, target] : lm.items()) {
        const int t = target.get<int>();
        if (t != 1 && t != -1)
          throw ParseError("label mapping targets must be -1 or +1");
        entry.mapping.map[raw] = t;
      }
    } else {
      throw ParseError("label_mapping must be an object or a string");
    }
    if (!std::filesystem::exists(entry.path))
      throw ArgumentError("dataset path does not exist: " + entry.path);
    out.push_back(std::move(entry));
  }
  if (out.empty()) throw ParseError("manifest lists no datasets");
  return out;
}

Dataset load_dataset(const ManifestDataset& entry) {
  return load_csv(entry.path, entry.label_column, entry.mapping, entry.name);
}

}  // namespace flexifuzz
