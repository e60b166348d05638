#include "flexifuzz/classifier.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "flexifuzz/errors.hpp"

namespace flexifuzz {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ArgumentError(msg);
}

void require_training_inputs(const DenseMatrix& X, std::span<const int> y) {
  require(X.rows() >= 2, "training requires at least two samples");
  require(y.size() == X.rows(), "label vector length mismatch");
  bool pos = false, neg = false;
  for (int label : y) {
    require(label == 1 || label == -1, "labels must be -1 or +1");
    (label == 1 ? pos : neg) = true;
  }
  require(pos && neg, "training requires both classes");
}

std::string scheme_name(MembershipScheme s) {
  switch (s) {
    case MembershipScheme::Uniform: return "uniform";
    case MembershipScheme::CenterLin: return "center-lin";
    case MembershipScheme::CenterExp: return "center-exp";
    case MembershipScheme::FlexiFuzz: return "flexi-fuzz";
  }
  throw ArgumentError("unknown membership scheme");
}

MembershipScheme scheme_from_name(const std::string& s) {
  if (s == "uniform") return MembershipScheme::Uniform;
  if (s == "center-lin") return MembershipScheme::CenterLin;
  if (s == "center-exp") return MembershipScheme::CenterExp;
  if (s == "flexi-fuzz") return MembershipScheme::FlexiFuzz;
  throw ParseError("unknown membership scheme: " + s);
}

}  // namespace

KktSystem assemble_kkt(const DenseMatrix& omega, std::span<const int> y,
                       std::span<const double> memberships, double C) {
  const std::size_t n = omega.rows();
  require(omega.cols() == n && n > 0, "omega must be square and non-empty");
  require(y.size() == n && memberships.size() == n, "length mismatch");
  require(std::isfinite(C) && C > 0.0, "C must be positive");
  for (double m : memberships)
    require(std::isfinite(m) && m > 0.0, "memberships must be positive");

  KktSystem sys;
  sys.matrix = DenseMatrix(n + 1, n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sys.matrix(0, i + 1) = -static_cast<double>(y[i]);
    sys.matrix(i + 1, 0) = static_cast<double>(y[i]);
    for (std::size_t j = 0; j < n; ++j) sys.matrix(i + 1, j + 1) = omega(i, j);
    sys.matrix(i + 1, i + 1) += 1.0 / (memberships[i] * C);
  }
  sys.rhs.assign(n + 1, 1.0);
  sys.rhs[0] = 0.0;
  return sys;
}

namespace detail {

LssvmSolution solve_weighted_lssvm(const DenseMatrix& K, std::span<const int> y,
                                   std::span<const double> memberships, double C) {
  const DenseMatrix omega = labelled_kernel_matrix(K, y);
  const KktSystem sys = assemble_kkt(omega, y, memberships, C);

  std::vector<double> z;
  try {
    z = solve_dense(sys.matrix, sys.rhs);
  } catch (const SingularSystemError& e) {
    throw TrainingError(std::string("singular KKT system: ") + e.what());
  }

  double rhs_max = 0.0;
  for (double v : sys.rhs) rhs_max = std::max(rhs_max, std::abs(v));
  const double residual = residual_inf_norm(sys.matrix, z, sys.rhs);
  if (!(residual <= 1e-8 * (1.0 + rhs_max)))
    throw TrainingError("KKT residual " + std::to_string(residual) +
                        " exceeds tolerance");

  LssvmSolution sol;
  sol.bias = z[0];
  sol.alpha.assign(z.begin() + 1, z.end());
  sol.residual = residual;

  double dual_sum = 0.0;
  for (std::size_t i = 0; i < sol.alpha.size(); ++i)
    dual_sum += sol.alpha[i] * static_cast<double>(y[i]);
  if (!(std::abs(dual_sum) <= 1e-8))
    throw TrainingError("dual constraint sum " + std::to_string(dual_sum) +
                        " exceeds tolerance");
  return sol;
}

}  // namespace detail

TrainedModel train(const DenseMatrix& X, std::span<const int> y,
                   const TrainConfig& config) {
  require_training_inputs(X, y);
  require(std::isfinite(config.C) && config.C > 0.0, "C must be positive");
  validate(config.membership);

  const MembershipVector m = compute_membership(X, y, config.membership);
  const DenseMatrix K = kernel_matrix(X, config.kernel);
  detail::LssvmSolution sol = detail::solve_weighted_lssvm(K, y, m.values, config.C);

  TrainedModel model;
  model.train_X = X;
  model.train_y.assign(y.begin(), y.end());
  model.alpha = std::move(sol.alpha);
  model.bias = sol.bias;
  model.kernel = config.kernel;
  model.C = config.C;
  model.membership = config.membership;
  model.kkt_residual = sol.residual;
  return model;
}

double decision_value(const TrainedModel& model, std::span<const double> x) {
  require(x.size() == model.train_X.cols(), "query dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < model.train_X.rows(); ++i) {
    acc += static_cast<double>(model.train_y[i]) * model.alpha[i] *
           gaussian_kernel(model.train_X.row(i), x, model.kernel);
  }
  return acc + model.bias;
}

std::vector<double> decision_values(const TrainedModel& model, const DenseMatrix& X) {
  std::vector<double> out(X.rows());
  for (std::size_t j = 0; j < X.rows(); ++j) out[j] = decision_value(model, X.row(j));
  return out;
}

int sign_label(double value) { return value >= 0.0 ? +1 : -1; }

std::vector<int> predict(const TrainedModel& model, const DenseMatrix& X) {
  std::vector<int> labels(X.rows());
  const std::vector<double> dec = decision_values(model, X);
  for (std::size_t i = 0; i < dec.size(); ++i) labels[i] = sign_label(dec[i]);
  return labels;
}

namespace {

nlohmann::ordered_json matrix_to_json(const DenseMatrix& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

DenseMatrix matrix_from_json(const nlohmann::json& rows) {
  std::vector<std::vector<double>> data;
  for (const auto& row : rows) data.push_back(row.get<std::vector<double>>());
  return DenseMatrix::from_rows(data);
}

}  // namespace

std::string model_to_json(const TrainedModel& model, const Standardizer& standardizer,
                          const std::string& extra_meta_json) {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  if (!extra_meta_json.empty())
    doc["meta"] = nlohmann::ordered_json::parse(extra_meta_json);
  doc["sigma"] = model.kernel.sigma;
  doc["C"] = model.C;
  doc["scheme"] = scheme_name(model.membership.scheme);
  doc["center"] =
      model.membership.center == CenterEstimator::Mean ? "mean" : "median";
  doc["lambda"] = model.membership.lambda;
  doc["k"] = model.membership.k;
  doc["delta"] = model.membership.delta;
  doc["gamma"] = model.membership.gamma;
  doc["alpha"] = model.alpha;
  doc["bias"] = model.bias;
  doc["train_X"] = matrix_to_json(model.train_X);
  doc["train_y"] = model.train_y;
  doc["standardization"] = {{"means", standardizer.means},
                            {"stds", standardizer.stds}};
  return doc.dump(2) + "\n";
}

LoadedModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model document is not valid JSON: ") + e.what());
  }
  if (!doc.contains("version") || doc["version"].get<int>() != 1)
    throw ParseError("unsupported model document version");

  LoadedModel out;
  TrainedModel& m = out.model;
  m.kernel = KernelSpec(doc.at("sigma").get<double>());
  m.C = doc.at("C").get<double>();
  m.membership.scheme = scheme_from_name(doc.at("scheme").get<std::string>());
  m.membership.center = doc.at("center").get<std::string>() == "median"
                            ? CenterEstimator::Median
                            : CenterEstimator::Mean;
  m.membership.lambda = doc.at("lambda").get<double>();
  m.membership.k = doc.at("k").get<int>();
  m.membership.delta = doc.at("delta").get<double>();
  m.membership.gamma = doc.at("gamma").get<double>();
  m.alpha = doc.at("alpha").get<std::vector<double>>();
  m.bias = doc.at("bias").get<double>();
  m.train_X = matrix_from_json(doc.at("train_X"));
  m.train_y = doc.at("train_y").get<std::vector<int>>();
  out.standardizer.means =
      doc.at("standardization").at("means").get<std::vector<double>>();
  out.standardizer.stds =
      doc.at("standardization").at("stds").get<std::vector<double>>();

  if (m.alpha.size() != m.train_X.rows() || m.train_y.size() != m.train_X.rows())
    throw ParseError("model document has inconsistent lengths");

  // Re-verify the stored coefficients against the reassembled system.
  const MembershipVector w = compute_membership(m.train_X, m.train_y, m.membership);
  const DenseMatrix K = kernel_matrix(m.train_X, m.kernel);
  const KktSystem sys =
      assemble_kkt(labelled_kernel_matrix(K, m.train_y), m.train_y, w.values, m.C);
  std::vector<double> z;
  z.reserve(m.alpha.size() + 1);
  z.push_back(m.bias);
  z.insert(z.end(), m.alpha.begin(), m.alpha.end());
  m.kkt_residual = residual_inf_norm(sys.matrix, z, sys.rhs);
  if (!(m.kkt_residual <= 1e-8 * 2.0))
    throw ParseError("stored model violates its KKT residual invariant");
  return out;
}

void save_model(const std::string& path, const TrainedModel& model,
                const Standardizer& standardizer,
                const std::string& extra_meta_json) {
  std::ofstream outfile(path, std::ios::binary);
  if (!outfile) throw ArgumentError("cannot write model file: " + path);
  outfile << model_to_json(model, standardizer, extra_meta_json);
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open model file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace flexifuzz
