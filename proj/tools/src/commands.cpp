#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "flexifuzz/classifier.hpp"
#include "flexifuzz/errors.hpp"
#include "flexifuzz/evaluation.hpp"
#include "flexifuzz/rng.hpp"
#include "flexifuzz/version.hpp"
#include "pipeline.hpp"
#include "report.hpp"

namespace flexifuzz::cli {

namespace {

using nlohmann::ordered_json;

ordered_json meta_json(std::uint64_t seed, const std::vector<InputDigest>& inputs) {
  ordered_json meta;
  meta["tool_version"] = kVersion;
  meta["seed"] = seed;
  ordered_json files = ordered_json::array();
  for (const InputDigest& d : inputs)
    files.push_back({{"path", d.path}, {"sha256", d.sha256}});
  meta["inputs"] = std::move(files);
  return meta;
}

ordered_json metric_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

ordered_json selected_json(ModelFamily family, const GridPoint& p) {
  ordered_json sel;
  sel["C"] = p.C;
  sel["sigma"] = p.sigma;
  if (family_uses_lambda_k(family)) {
    sel["lambda"] = p.lambda;
    sel["k"] = p.k;
  }
  if (family_uses_gamma(family)) sel["gamma"] = p.gamma;
  return sel;
}

std::string point_csv(ModelFamily family, const GridPoint& p) {
  std::ostringstream row;
  row << format_double(p.C) << ',' << format_double(p.sigma) << ','
      << (family_uses_lambda_k(family) ? format_double(p.lambda) : std::string{})
      << ','
      << (family_uses_lambda_k(family) ? std::to_string(p.k) : std::string{})
      << ','
      << (family_uses_gamma(family) ? format_double(p.gamma) : std::string{});
  return row.str();
}

void write_cv_table(const std::string& path, const GridSearchResult& search,
                    std::uint64_t seed, const std::vector<InputDigest>& inputs) {
  std::ostringstream out;
  out << csv_meta_block(seed, inputs);
  out << "C,sigma,lambda,k,gamma,mean_accuracy";
  const std::size_t folds =
      search.table.empty() ? 0 : search.table.front().fold_accuracies.size();
  for (std::size_t f = 1; f <= folds; ++f) out << ",fold" << f;
  out << ",status\n";
  for (const GridPointResult& r : search.table) {
    out << point_csv(search.family, r.point) << ',';
    if (!r.failed) out << format_double(r.mean_accuracy);
    for (double acc : r.fold_accuracies)
      out << ',' << (r.failed ? std::string{} : format_double(acc));
    out << ',' << (r.failed ? "failed" : "ok") << '\n';
  }
  write_text_file(path, out.str());
}

struct UnitOutcome {
  std::string dataset;
  std::string model;
  bool failed = false;
  std::string error;
  ModelRunResult result;
};

std::vector<ModelFamily> default_models() {
  return {ModelFamily::PlainLssvm, ModelFamily::FsvmCilLin, ModelFamily::FsvmCilExp,
          ModelFamily::FlexiFuzz1, ModelFamily::FlexiFuzz2};
}

void apply_sweep_overrides(RunManifest& manifest, const SweepOptions& opt) {
  if (opt.seed_set) manifest.seed = opt.seed;
  if (!opt.out_dir.empty()) manifest.output_dir = opt.out_dir;
  if (manifest.output_dir.empty()) manifest.output_dir = "flexifuzz-out";
  if (manifest.models.empty()) manifest.models = default_models();
}

std::string results_csv_header() {
  return "dataset,model,C,sigma,lambda,k,gamma,cv_accuracy,test_accuracy,"
         "sensitivity,specificity,precision,status\n";
}

std::string results_csv_row(const UnitOutcome& u) {
  std::ostringstream out;
  out << u.dataset << ',' << u.model << ',';
  if (u.failed) {
    out << ",,,,,,,,,failed\n";
    return out.str();
  }
  const ModelRunResult& r = u.result;
  out << point_csv(r.family, r.best) << ',' << format_double(r.cv_accuracy) << ','
      << metric_cell(r.test.accuracy) << ',' << metric_cell(r.test.sensitivity)
      << ',' << metric_cell(r.test.specificity) << ','
      << metric_cell(r.test.precision) << ",ok\n";
  return out.str();
}

ordered_json outcome_json(const UnitOutcome& u) {
  ordered_json m;
  m["model"] = u.model;
  if (u.failed) {
    m["status"] = "failed";
    m["error"] = u.error;
    return m;
  }
  m["status"] = "ok";
  m["selected"] = selected_json(u.result.family, u.result.best);
  m["cv_accuracy"] = u.result.cv_accuracy;
  m["test"] = {{"accuracy", metric_json(u.result.test.accuracy)},
               {"sensitivity", metric_json(u.result.test.sensitivity)},
               {"specificity", metric_json(u.result.test.specificity)},
               {"precision", metric_json(u.result.test.precision)}};
  m["confusion"] = {{"tp", u.result.counts.tp},
                    {"tn", u.result.counts.tn},
                    {"fp", u.result.counts.fp},
                    {"fn", u.result.counts.fn}};
  return m;
}

}  // namespace

int cmd_train(const TrainOptions& opt) {
  const LabelMapping mapping = LabelMapping::parse(opt.input.label_map);
  const Dataset raw = load_csv(opt.input.data, opt.input.label_column, mapping);
  const std::vector<InputDigest> inputs{{opt.input.data, sha256_file(opt.input.data)}};

  const ModelFamily family = family_from_name(opt.model);
  const GridPoint point{opt.C, opt.sigma, opt.lambda, opt.k, opt.gamma};
  const TrainConfig config = make_train_config(family, point);

  const Standardizer standardizer = fit_standardizer(raw.X);
  const DenseMatrix X = standardizer.apply(raw.X);
  const TrainedModel model = train(X, raw.y, config);

  const ImbalanceInfo info = imbalance_ratio(raw.y);
  std::size_t positives = 0;
  for (int label : raw.y)
    if (label == 1) ++positives;

  save_model(opt.out, model, standardizer, meta_json(opt.seed, inputs).dump());

  std::cout << "trained " << opt.model << " on " << raw.name << ": n=" << raw.n()
            << ", positives=" << positives << ", negatives=" << raw.n() - positives
            << ", imbalance_ratio=" << format_double(info.ratio)
            << ", kkt_residual=" << format_double(model.kkt_residual) << "\n"
            << "model written to " << opt.out << "\n";
  return kExitOk;
}

namespace {

/// Shared engine for benchmark (single rate 0) and the noise sweep.
int run_sweep(const SweepOptions& opt, bool noise_mode) {
  RunManifest manifest = load_run_manifest(opt.manifest);
  apply_sweep_overrides(manifest, opt);

  std::vector<double> rates{0.0};
  if (noise_mode) {
    rates = !opt.noise_rates.empty() ? opt.noise_rates
            : !manifest.noise_rates.empty()
                ? manifest.noise_rates
                : std::vector<double>{0.05, 0.10, 0.20, 0.30, 0.40};
  }

  std::filesystem::create_directories(manifest.output_dir);
  const auto out_path = [&](const std::string& name) {
    return (std::filesystem::path(manifest.output_dir) / name).string();
  };

  std::vector<InputDigest> inputs{{opt.manifest, sha256_file(opt.manifest)}};
  for (const ManifestDataset& d : manifest.datasets)
    inputs.push_back({d.path, sha256_file(d.path)});

  ProtocolOptions proto;
  proto.train_fraction = opt.train_fraction;
  proto.folds = opt.folds;
  proto.seed = manifest.seed;
  proto.threads = opt.threads;

  // outcome[rate][dataset][model]
  std::vector<std::vector<std::vector<UnitOutcome>>> outcomes;
  bool any_failed = false;

  for (double rate : rates) {
    proto.noise_rate = rate;
    std::vector<std::vector<UnitOutcome>> per_dataset;
    for (const ManifestDataset& entry : manifest.datasets) {
      std::vector<UnitOutcome> row;
      try {
        const Dataset ds = load_dataset(entry);
        const PreparedSplit prepared = prepare_split(ds, proto);
        for (ModelFamily family : manifest.models) {
          UnitOutcome u;
          u.dataset = entry.name;
          u.model = family_name(family);
          try {
            u.result = run_protocol_on_split(prepared, family, manifest.grid, proto);
          } catch (const std::exception& e) {
            u.failed = true;
            u.error = e.what();
            any_failed = true;
          }
          row.push_back(std::move(u));
        }
      } catch (const std::exception& e) {
        // Dataset-level failure (unreadable file, bad split): every model of
        // this dataset is recorded as failed and the run continues.
        any_failed = true;
        for (ModelFamily family : manifest.models) {
          UnitOutcome u;
          u.dataset = entry.name;
          u.model = family_name(family);
          u.failed = true;
          u.error = e.what();
          row.push_back(std::move(u));
        }
      }
      per_dataset.push_back(std::move(row));
    }
    outcomes.push_back(std::move(per_dataset));
  }

  if (!noise_mode) {
    const auto& flat = outcomes.front();

    std::ostringstream results;
    results << csv_meta_block(manifest.seed, inputs) << results_csv_header();
    for (const auto& row : flat)
      for (const UnitOutcome& u : row) results << results_csv_row(u);
    write_text_file(out_path("results.csv"), results.str());

    std::ostringstream matrix;
    matrix << csv_meta_block(manifest.seed, inputs) << "dataset";
    for (ModelFamily family : manifest.models) matrix << ',' << family_name(family);
    matrix << '\n';
    for (const auto& row : flat) {
      matrix << row.front().dataset;
      for (const UnitOutcome& u : row)
        matrix << ','
               << (u.failed ? std::string{} : metric_cell(u.result.test.accuracy));
      matrix << '\n';
    }
    write_text_file(out_path("accuracy_matrix.csv"), matrix.str());

    for (std::size_t d = 0; d < flat.size(); ++d) {
      const auto& row = flat[d];
      ordered_json report;
      report["meta"] = meta_json(manifest.seed, inputs);
      const ManifestDataset& entry = manifest.datasets[d];
      ordered_json about;
      about["name"] = entry.name;
      bool have_result = false;
      for (const UnitOutcome& u : row)
        if (!u.failed) {
          about["n_train"] = u.result.n_train;
          about["n_test"] = u.result.n_test;
          about["train_imbalance_ratio"] = u.result.imbalance_ratio;
          have_result = true;
          break;
        }
      (void)have_result;
      report["dataset"] = std::move(about);
      ordered_json models = ordered_json::array();
      for (const UnitOutcome& u : row) {
        models.push_back(outcome_json(u));
        if (!u.failed)
          write_cv_table(out_path("cv_" + u.dataset + "_" + u.model + ".csv"),
                         u.result.search, manifest.seed, inputs);
      }
      report["models"] = std::move(models);
      write_text_file(out_path("report_" + entry.name + ".json"),
                      report.dump(2) + "\n");
    }

    ordered_json summary;
    summary["meta"] = meta_json(manifest.seed, inputs);
    ordered_json units = ordered_json::array();
    for (const auto& row : flat)
      for (const UnitOutcome& u : row) {
        ordered_json j;
        j["dataset"] = u.dataset;
        j["model"] = u.model;
        j["status"] = u.failed ? "failed" : "ok";
        if (u.failed)
          j["error"] = u.error;
        else
          j["test_accuracy"] = metric_json(u.result.test.accuracy);
        units.push_back(std::move(j));
      }
    summary["runs"] = std::move(units);
    write_text_file(out_path("summary.json"), summary.dump(2) + "\n");

    std::cout << "benchmark reports written to " << manifest.output_dir << "\n";
    return any_failed ? kExitPartialFailure : kExitOk;
  }

  // Noise sweep artifacts: long-form CSV plus per-model averages across rates.
  std::ostringstream results;
  results << csv_meta_block(manifest.seed, inputs)
          << "dataset,rate,model,C,sigma,lambda,k,gamma,cv_accuracy,test_accuracy,"
             "sensitivity,specificity,precision,status\n";
  for (std::size_t ri = 0; ri < rates.size(); ++ri)
    for (const auto& row : outcomes[ri])
      for (const UnitOutcome& u : row) {
        results << u.dataset << ',' << format_double(rates[ri]) << ','
                << u.model << ',';
        if (u.failed) {
          results << ",,,,,,,,,failed\n";
        } else {
          results << point_csv(u.result.family, u.result.best) << ','
                  << format_double(u.result.cv_accuracy) << ','
                  << metric_cell(u.result.test.accuracy) << ','
                  << metric_cell(u.result.test.sensitivity) << ','
                  << metric_cell(u.result.test.specificity) << ','
                  << metric_cell(u.result.test.precision) << ",ok\n";
        }
      }
  write_text_file(out_path("noise_results.csv"), results.str());

  ordered_json summary;
  summary["meta"] = meta_json(manifest.seed, inputs);
  ordered_json rates_json = ordered_json::array();
  for (double r : rates) rates_json.push_back(r);
  summary["rates"] = std::move(rates_json);
  ordered_json datasets = ordered_json::array();
  for (std::size_t d = 0; d < manifest.datasets.size(); ++d) {
    ordered_json ds_json;
    ds_json["dataset"] = manifest.datasets[d].name;
    ordered_json models = ordered_json::array();
    for (std::size_t m = 0; m < manifest.models.size(); ++m) {
      ordered_json mj;
      mj["model"] = family_name(manifest.models[m]);
      ordered_json per_rate = ordered_json::array();
      double sum = 0.0;
      std::size_t ok = 0;
      for (std::size_t ri = 0; ri < rates.size(); ++ri) {
        const UnitOutcome& u = outcomes[ri][d][m];
        ordered_json cell;
        cell["rate"] = rates[ri];
        if (u.failed) {
          cell["status"] = "failed";
        } else {
          cell["status"] = "ok";
          cell["test_accuracy"] = metric_json(u.result.test.accuracy);
          cell["selected"] = selected_json(u.result.family, u.result.best);
          if (u.result.test.accuracy) {
            sum += *u.result.test.accuracy;
            ++ok;
          }
        }
        per_rate.push_back(std::move(cell));
      }
      mj["per_rate"] = std::move(per_rate);
      if (ok == rates.size())
        mj["average_accuracy"] = sum / static_cast<double>(rates.size());
      else
        mj["average_accuracy"] = nullptr;
      models.push_back(std::move(mj));
    }
    ds_json["models"] = std::move(models);
    datasets.push_back(std::move(ds_json));
  }
  summary["datasets"] = std::move(datasets);
  write_text_file(out_path("noise_summary.json"), summary.dump(2) + "\n");

  std::cout << "noise-sweep reports written to " << manifest.output_dir << "\n";
  return any_failed ? kExitPartialFailure : kExitOk;
}

}  // namespace

int cmd_benchmark(const SweepOptions& opt) { return run_sweep(opt, false); }

int cmd_noise_sweep(const SweepOptions& opt) { return run_sweep(opt, true); }

int cmd_sensitivity(const SensitivityOptions& opt) {
  if (opt.axes != "c-sigma" && opt.axes != "lambda-k")
    throw ArgumentError("unsupported axis pair: " + opt.axes +
                        " (expected c-sigma or lambda-k)");
  const ModelFamily family = family_from_name(opt.model);
  if (opt.axes == "lambda-k" && !family_uses_lambda_k(family))
    throw ArgumentError("lambda-k axes require a flexi model");

  const LabelMapping mapping = LabelMapping::parse(opt.input.label_map);
  const Dataset ds = load_csv(opt.input.data, opt.input.label_column, mapping);
  const std::vector<InputDigest> inputs{{opt.input.data, sha256_file(opt.input.data)}};

  HyperGrid grid = HyperGrid::defaults();
  if (!opt.C_values.empty()) grid.C_values = opt.C_values;
  if (!opt.sigma_values.empty()) grid.sigma_values = opt.sigma_values;
  if (!opt.lambda_values.empty()) grid.lambda_values = opt.lambda_values;
  if (!opt.k_values.empty()) grid.k_values = opt.k_values;

  ProtocolOptions proto;
  proto.train_fraction = opt.train_fraction;
  proto.folds = opt.folds;
  proto.seed = opt.seed;
  proto.threads = opt.threads;

  const PreparedSplit prepared = prepare_split(ds, proto);
  const GridSearchResult search = grid_search(prepared.train, grid, family,
                                              proto.folds,
                                              derive_seed(proto.seed, kFoldStream),
                                              proto.threads);

  // Sweep the chosen axis pair; everything else stays at the CV optimum.
  std::ostringstream out;
  out << csv_meta_block(opt.seed, inputs);
  const bool c_sigma = opt.axes == "c-sigma";
  out << (c_sigma ? "C,sigma,accuracy\n" : "lambda,k,accuracy\n");

  const std::vector<double> axis1 = c_sigma ? grid.C_values : grid.lambda_values;
  std::vector<double> axis2;
  if (c_sigma)
    axis2 = grid.sigma_values;
  else
    for (int k : grid.k_values) axis2.push_back(static_cast<double>(k));

  for (double a1 : axis1)
    for (double a2 : axis2) {
      GridPoint point = search.best;
      if (c_sigma) {
        point.C = a1;
        point.sigma = a2;
      } else {
        point.lambda = a1;
        point.k = static_cast<int>(a2);
      }
      std::string cell;
      try {
        const TrainedModel model =
            train(prepared.train.X, prepared.train.y, make_train_config(family, point));
        const std::vector<int> pred = predict(model, prepared.test.X);
        const MetricSet m = metrics(confusion(prepared.test.y, pred));
        cell = metric_cell(m.accuracy);
      } catch (const TrainingError&) {
        cell = "";  // singular point: left blank, surface plot tools skip it
      } catch (const ArgumentError&) {
        cell = "";
      }
      out << format_double(a1) << ',' << format_double(a2) << ',' << cell << '\n';
    }
  write_text_file(opt.out, out.str());
  std::cout << "sensitivity grid written to " << opt.out << "\n";
  return kExitOk;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
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

}  // namespace

int cmd_stats(const StatsOptions& opt) {
  std::ifstream in(opt.matrix);
  if (!in) throw ArgumentError("cannot open accuracy matrix: " + opt.matrix);

  std::string line;
  std::vector<std::string> model_names;
  std::vector<std::string> dataset_names;
  std::vector<std::vector<double>> rows;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (!have_header) {
      if (fields.size() < 3)
        throw ParseError("matrix needs at least two model columns");
      model_names.assign(fields.begin() + 1, fields.end());
      have_header = true;
      continue;
    }
    if (fields.size() != model_names.size() + 1)
      throw ParseError("matrix row " + std::to_string(lineno) +
                       " has the wrong number of cells");
    dataset_names.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double v = 0.0;
      const auto* begin = fields[j].data();
      const auto* end = begin + fields[j].size();
      const auto res = std::from_chars(begin, end, v);
      if (fields[j].empty() || res.ec != std::errc{} || res.ptr != end)
        throw ParseError("missing or invalid accuracy at row " +
                         std::to_string(lineno) + ", column " + std::to_string(j + 1));
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (!have_header || rows.empty())
    throw ParseError("accuracy matrix has no data rows");

  DenseMatrix accuracy(rows.size(), model_names.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < model_names.size(); ++j) accuracy(i, j) = rows[i][j];

  const RankTable table = average_ranks(accuracy, model_names, dataset_names);
  const std::size_t p = model_names.size();
  const std::size_t D = dataset_names.size();

  const double chi2 = friedman_chi2(table.average_ranks, p, D);
  std::optional<double> f_stat;
  try {
    f_stat = friedman_statistic(table.average_ranks, p, D).f_stat;
  } catch (const DegenerateStatisticError&) {
    f_stat = std::nullopt;
  }
  const double q = opt.q_alpha > 0.0 ? opt.q_alpha : nemenyi_q_005(p);
  const double cd = nemenyi_cd(p, D, q);
  const auto flags = pairwise_significance(table.average_ranks, cd);

  ordered_json doc;
  doc["meta"] = meta_json(0, {{opt.matrix, sha256_file(opt.matrix)}});
  doc["models"] = model_names;
  doc["datasets"] = D;
  ordered_json ranks = ordered_json::array();
  for (double r : table.average_ranks) ranks.push_back(r);
  doc["avg_ranks"] = std::move(ranks);
  doc["chi2"] = chi2;
  doc["f_stat"] = f_stat ? ordered_json(*f_stat) : ordered_json(nullptr);
  doc["q_alpha"] = q;
  doc["cd"] = cd;
  ordered_json pairwise = ordered_json::array();
  for (const PairwiseFlag& f : flags) {
    ordered_json pj;
    pj["models"] = {model_names[f.first], model_names[f.second]};
    pj["rank_difference"] = f.rank_difference;
    pj["significant"] = f.significant;
    pairwise.push_back(std::move(pj));
  }
  doc["pairwise_flags"] = std::move(pairwise);
  write_text_file(opt.out, doc.dump(2) + "\n");

  std::cout << "models: " << p << ", datasets: " << D << "\n";
  std::cout << "average ranks:\n";
  for (std::size_t j = 0; j < p; ++j)
    std::cout << "  " << model_names[j] << ": " << format_double(table.average_ranks[j])
              << "\n";
  std::cout << "chi2 = " << format_double(chi2) << ", F = "
            << (f_stat ? format_double(*f_stat) : std::string("degenerate"))
            << ", CD(q=" << format_double(q) << ") = " << format_double(cd) << "\n";
  for (const PairwiseFlag& f : flags)
    if (f.significant)
      std::cout << "significant: " << model_names[f.first] << " vs "
                << model_names[f.second] << " (diff "
                << format_double(f.rank_difference) << ")\n";
  std::cout << "stats written to " << opt.out << "\n";
  return kExitOk;
}

}  // namespace flexifuzz::cli
