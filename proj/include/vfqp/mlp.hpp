// Copyright 2026 The vfqp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vfqp/config.hpp"
#include "vfqp/dataset.hpp"
#include "vfqp/features.hpp"

namespace vfqp {

// Fully connected tanh network with a linear output layer. Samples are
// columns; weights[l] is (out x in).
class Mlp {
 public:
  Mlp() = default;
  Mlp(int input, int hidden_units, int hidden_layers, int output);

  int input_dim() const { return input_; }
  int output_dim() const { return output_; }
  int hidden_units() const { return hidden_units_; }
  int hidden_layers() const { return hidden_layers_; }
  int num_layers() const { return static_cast<int>(weights.size()); }
  std::size_t num_parameters() const;

  // Uniform +-sqrt(6 / (fan_in + fan_out)), zero biases.
  void init_xavier(std::uint64_t seed);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& X) const;

  // Parameter gradients of sum(dY .* forward(X)).
  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
  };
  Gradients backward(const Eigen::MatrixXd& X, const Eigen::MatrixXd& dY,
                     Eigen::MatrixXd* Y = nullptr) const;

  // Forward pass keeping every layer's activation (acts[0] = X), and the
  // backward pass reusing them.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& X,
                          std::vector<Eigen::MatrixXd>& acts) const;
  Gradients backward(const std::vector<Eigen::MatrixXd>& acts,
                     const Eigen::MatrixXd& dY) const;

  // All parameters, layer by layer: weights row-major, then biases.
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& theta);
  static Eigen::VectorXd flatten(const Gradients& g);

  bool all_finite() const;

  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

 private:
  int input_ = 0;
  int hidden_units_ = 0;
  int hidden_layers_ = 0;
  int output_ = 0;
};

// Mean absolute error over all entries and its subgradient (sign(0) = 0).
double l1_loss(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& T,
               Eigen::MatrixXd* dY = nullptr);

// Max relative error between analytic and central-difference gradients of
// l1_loss. Relative errors use max(|a|, |fd|, 1e-6) as denominator.
double gradient_check(const Mlp& net, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& T, double h = 1e-5);

class Adam {
 public:
  Adam(double lr, double beta1, double beta2, double eps)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(Mlp& net, const Mlp::Gradients& g);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Eigen::MatrixXd> mw_, vw_;
  std::vector<Eigen::VectorXd> mb_, vb_;
};

struct Normalizer {
  FeatureVector feature_mean = FeatureVector::Zero();
  FeatureVector feature_std = FeatureVector::Ones();
  TargetVector target_mean = TargetVector::Zero();
  TargetVector target_std = TargetVector::Ones();

  static constexpr double kMinStd = 1e-8;

  // Statistics over samples[idx]; std floored at kMinStd.
  static Normalizer fit(const std::vector<TrainingSample>& samples,
                        const std::vector<int>& idx);

  FeatureVector normalize_features(const FeatureVector& f) const;
  TargetVector normalize_target(const TargetVector& t) const;
  TargetVector denormalize_target(const TargetVector& z) const;
};

struct ValueNet {
  Mlp mlp;
  Normalizer norm;
  double eps_eig = 1e-4;
  GaitKind gait = GaitKind::kTrot;
  std::uint64_t config_hash = 0;

  // Raw (denormalized, unprojected) 42-vector.
  TargetVector raw_predict(const FeatureVector& phi) const;
};

// Symmetrizes H and lifts eigenvalues below eps_eig. Error(kNonFinite) on
// non-finite input.
Mat6 project_psd(const Mat6& H, double eps_eig);

ReducedExpansion predict_expansion(const ValueNet& net, const FeatureVector& phi);
ReducedExpansion expansion_from_raw(const TargetVector& raw, double eps_eig);

inline constexpr char kModelMagic[8] = {'V', 'F', 'Q', 'P', 'M', 'O', 'D', 'L'};
inline constexpr std::uint32_t kModelVersion = 1;

std::string serialize_model(const ValueNet& net);
ValueNet deserialize_model(const std::string& bytes);
void save_model(const ValueNet& net, const std::string& path);
ValueNet load_model(const std::string& path);

struct EpochLoss {
  int epoch = 0;
  double train_l1 = 0.0;
  double val_l1 = 0.0;
};

struct TrainResult {
  ValueNet net;
  std::vector<EpochLoss> curve;
  std::vector<int> train_idx;
  std::vector<int> val_idx;
  double baseline_val_l1 = 0.0;  // per-component median of training targets
};

void write_loss_csv(const std::vector<EpochLoss>& curve, std::ostream& os);

// Called after every epoch; may be empty.
using EpochCallback = std::function<void(const EpochLoss&)>;

// Error(kInvalidArgument) on an empty dataset, Error(kNumerical) naming the
// batch on a non-finite loss.
TrainResult train(const Dataset& ds, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

// Normalized L1 of a constant per-component predictor.
double constant_l1(const Eigen::MatrixXd& T, const Eigen::VectorXd& constant);
Eigen::VectorXd componentwise_median(const Eigen::MatrixXd& T);

}  // namespace vfqp
