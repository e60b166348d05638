#include "pipeline.hpp"

#include <fstream>

#include <json.hpp>

#include "flexifuzz/errors.hpp"
#include "flexifuzz/rng.hpp"

namespace flexifuzz::cli {

PreparedSplit prepare_split(const Dataset& ds, const ProtocolOptions& opt) {
  SplitResult parts = split(ds, opt.train_fraction, derive_seed(opt.seed, kSplitStream));
  parts.train.y = inject_label_noise(parts.train.y, opt.noise_rate,
                                     derive_seed(opt.seed, kNoiseStream));
  StandardizeResult std_result = standardize_fit_apply(parts.train, {parts.test});

  PreparedSplit out;
  out.train = std::move(std_result.train);
  out.test = std::move(std_result.others.front());
  out.standardizer = std::move(std_result.standardizer);
  out.imbalance_ratio = imbalance_ratio(out.train.y).ratio;
  return out;
}

ModelRunResult run_protocol_on_split(const PreparedSplit& prepared, ModelFamily family,
                                     const HyperGrid& grid,
                                     const ProtocolOptions& opt) {
  ModelRunResult result;
  result.family = family;
  result.n_train = prepared.train.n();
  result.n_test = prepared.test.n();
  result.imbalance_ratio = prepared.imbalance_ratio;

  result.search = grid_search(prepared.train, grid, family, opt.folds,
                              derive_seed(opt.seed, kFoldStream), opt.threads);
  result.best = result.search.best;
  result.cv_accuracy = result.search.best_mean_accuracy;

  const TrainedModel model =
      train(prepared.train.X, prepared.train.y, result.search.best_config);
  const std::vector<int> predictions = predict(model, prepared.test.X);
  result.counts = confusion(prepared.test.y, predictions);
  result.test = metrics(result.counts);
  return result;
}

ModelRunResult run_protocol(const Dataset& ds, ModelFamily family,
                            const HyperGrid& grid, const ProtocolOptions& opt) {
  return run_protocol_on_split(prepare_split(ds, opt), family, grid, opt);
}

namespace {

std::vector<double> json_doubles(const nlohmann::json& arr) {
  return arr.get<std::vector<double>>();
}

}  // namespace

RunManifest load_run_manifest(const std::string& path) {
  RunManifest manifest;
  manifest.datasets = load_dataset_manifest(path);
  manifest.grid = HyperGrid::defaults();

  std::ifstream in(path);
  nlohmann::json doc = nlohmann::json::parse(in);
  if (!doc.is_object()) return manifest;  // bare dataset array

  if (doc.contains("models")) {
    for (const auto& name : doc["models"])
      manifest.models.push_back(family_from_name(name.get<std::string>()));
  }
  if (doc.contains("seed")) manifest.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("noise_rates"))
    manifest.noise_rates = json_doubles(doc["noise_rates"]);
  if (doc.contains("output_dir"))
    manifest.output_dir = doc["output_dir"].get<std::string>();
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    if (g.contains("C")) manifest.grid.C_values = json_doubles(g["C"]);
    if (g.contains("sigma")) manifest.grid.sigma_values = json_doubles(g["sigma"]);
    if (g.contains("lambda")) manifest.grid.lambda_values = json_doubles(g["lambda"]);
    if (g.contains("k")) manifest.grid.k_values = g["k"].get<std::vector<int>>();
    if (g.contains("gamma")) manifest.grid.gamma_values = json_doubles(g["gamma"]);
  }
  return manifest;
}

}  // namespace flexifuzz::cli
