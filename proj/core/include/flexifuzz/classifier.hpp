#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flexifuzz/dataio.hpp"
#include "flexifuzz/kernel_linalg.hpp"
#include "flexifuzz/membership.hpp"

namespace flexifuzz {

struct TrainConfig {
  double C = 1.0;
  KernelSpec kernel{1.0};
  MembershipConfig membership{};
};

/// Weighted LSSVM trained by solving the (n+1) x (n+1) system
///   [[0, -y^T], [y, Omega + (MC)^-1]] (b, alpha) = (0, 1_n).
/// Training inputs are stored as given (the caller standardizes; queries must
/// be transformed by the same Standardizer before prediction).
struct TrainedModel {
  DenseMatrix train_X;
  std::vector<int> train_y;
  std::vector<double> alpha;
  double bias = 0.0;
  KernelSpec kernel{1.0};
  double C = 1.0;
  MembershipConfig membership{};
  double kkt_residual = 0.0;  // max-norm residual of the solved system
};

struct KktSystem {
  DenseMatrix matrix;
  std::vector<double> rhs;
};

/// Builds the KKT matrix and right-hand side from the labelled kernel matrix,
/// labels, per-sample weights and regularization parameter.
KktSystem assemble_kkt(const DenseMatrix& omega, std::span<const int> y,
                       std::span<const double> memberships, double C);

TrainedModel train(const DenseMatrix& X, std::span<const int> y,
                   const TrainConfig& config);

/// Sum_i y_i alpha_i K(x_i, x) + bias.
double decision_value(const TrainedModel& model, std::span<const double> x);
std::vector<double> decision_values(const TrainedModel& model, const DenseMatrix& X);

/// sign of the decision value, with sign(0) mapped to +1.
int sign_label(double value);
std::vector<int> predict(const TrainedModel& model, const DenseMatrix& X);

struct LoadedModel {
  TrainedModel model;
  Standardizer standardizer;
};

/// Versioned JSON document. All floating-point fields survive a round trip
/// bit-exactly. extra_meta_json, when non-empty, must be a JSON object and is
/// embedded as the "meta" field.
std::string model_to_json(const TrainedModel& model, const Standardizer& standardizer,
                          const std::string& extra_meta_json = "");
LoadedModel model_from_json(const std::string& text);

void save_model(const std::string& path, const TrainedModel& model,
                const Standardizer& standardizer,
                const std::string& extra_meta_json = "");
LoadedModel load_model(const std::string& path);

namespace detail {

struct LssvmSolution {
  double bias;
  std::vector<double> alpha;
  double residual;
};

/// Assemble-and-solve path shared by train() and the cross-validation sweep.
/// Throws TrainingError on a singular system or when the solution violates
/// the residual / dual-sum invariants.
LssvmSolution solve_weighted_lssvm(const DenseMatrix& K, std::span<const int> y,
                                   std::span<const double> memberships, double C);

}  // namespace detail

}  // namespace flexifuzz
