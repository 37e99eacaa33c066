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

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "vfqp/mlp.hpp"

using namespace vfqp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(int r, int c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> N;
  MatrixXd M(r, c);
  for (int i = 0; i < M.size(); ++i) M.data()[i] = N(gen);
  return M;
}

// Dataset whose targets are fn(features) plus nothing else.
template <class Fn>
Dataset synthetic(int n, Fn fn, std::uint64_t seed = 3) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  Dataset ds;
  ds.samples.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& s = ds.samples[i];
    s.run = i;
    for (int k = 0; k < kFeatureDim; ++k) s.features[k] = U(gen);
    s.target = fn(s.features);
  }
  return ds;
}

TrainConfig small_train(int epochs) {
  TrainConfig c;
  c.epochs = epochs;
  c.batch = 32;
  c.hidden_layers = 2;
  c.hidden_units = 32;
  c.lr = 3e-3;
  return c;
}

}  // namespace

TEST(Mlp, HandComputedForward) {
  Mlp net(1, 1, 1, 1);
  net.weights[0](0, 0) = 0.5;
  net.biases[0](0) = 0.1;
  net.weights[1](0, 0) = -2.0;
  net.biases[1](0) = 0.3;
  MatrixXd X(1, 2);
  X << 1.0, -3.0;
  const MatrixXd Y = net.forward(X);
  EXPECT_NEAR(Y(0, 0), -2.0 * std::tanh(0.6) + 0.3, 1e-15);
  EXPECT_NEAR(Y(0, 1), -2.0 * std::tanh(-1.4) + 0.3, 1e-15);
}

TEST(Mlp, HandComputedBackward) {
  Mlp net(1, 1, 1, 1);
  net.weights[0](0, 0) = 0.5;
  net.biases[0](0) = 0.1;
  net.weights[1](0, 0) = -2.0;
  net.biases[1](0) = 0.3;
  MatrixXd X(1, 1);
  X << 1.0;
  const MatrixXd dY = MatrixXd::Ones(1, 1);
  const Mlp::Gradients g = net.backward(X, dY);
  const double h = std::tanh(0.6);
  EXPECT_NEAR(g.weights[1](0, 0), h, 1e-15);
  EXPECT_NEAR(g.biases[1](0), 1.0, 1e-15);
  EXPECT_NEAR(g.biases[0](0), -2.0 * (1 - h * h), 1e-15);
  EXPECT_NEAR(g.weights[0](0, 0), -2.0 * (1 - h * h) * 1.0, 1e-15);
}

TEST(Mlp, ShapesAndParameterCount) {
  Mlp net(33, 256, 3, 42);
  EXPECT_EQ(net.num_layers(), 4);
  EXPECT_EQ(net.num_parameters(),
            static_cast<std::size_t>(33 * 256 + 256 + 2 * (256 * 256 + 256) + 256 * 42 + 42));
  net.init_xavier(1);
  EXPECT_EQ(net.forward(random_matrix(33, 5, 1)).rows(), 42);
  const double bound = std::sqrt(6.0 / (33 + 256));
  EXPECT_LE(net.weights[0].cwiseAbs().maxCoeff(), bound);
  EXPECT_EQ(net.biases[0].cwiseAbs().maxCoeff(), 0.0);
}

TEST(Mlp, GradientCheckSmallNet) {
  Mlp net(2, 4, 1, 2);
  net.init_xavier(4);
  const MatrixXd X = random_matrix(2, 8, 5), T = random_matrix(2, 8, 6);
  EXPECT_LT(gradient_check(net, X, T), 1e-4);
}

TEST(Mlp, GradientCheckDeepNet) {
  Mlp net(5, 8, 3, 4);
  net.init_xavier(7);
  const MatrixXd X = random_matrix(5, 6, 8), T = random_matrix(4, 6, 9);
  EXPECT_LT(gradient_check(net, X, T), 1e-4);
}

TEST(Mlp, LossAndSubgradient) {
  MatrixXd Y(2, 2), T(2, 2), dY;
  Y << 1, 2, 3, 4;
  T << 0, 2, 5, 4;
  EXPECT_DOUBLE_EQ(l1_loss(Y, T, &dY), 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(dY(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(dY(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(dY(1, 0), -0.25);
}

TEST(Mlp, ZeroResidualGivesZeroGradient) {
  Mlp net(3, 4, 2, 2);
  net.init_xavier(2);
  const MatrixXd X = random_matrix(3, 4, 3);
  MatrixXd dY;
  l1_loss(net.forward(X), net.forward(X), &dY);
  const VectorXd g = Mlp::flatten(net.backward(X, dY));
  EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
}

// |f(x) - f(y)| is bounded by the product of weight spectral norms.
TEST(Mlp, LipschitzBound) {
  Mlp net(4, 16, 3, 3);
  net.init_xavier(11);
  double L = 1.0;
  for (const auto& W : net.weights) L *= Eigen::JacobiSVD<MatrixXd>(W).singularValues()(0);
  std::mt19937_64 gen(1);
  for (int n = 0; n < 100; ++n) {
    const MatrixXd a = random_matrix(4, 1, 2 * n + 1), b = random_matrix(4, 1, 2 * n + 2);
    EXPECT_LE((net.forward(a) - net.forward(b)).norm(), L * (a - b).norm() + 1e-12);
  }
}

TEST(Mlp, FlattenRoundTrip) {
  Mlp net(3, 5, 2, 2);
  net.init_xavier(3);
  const VectorXd theta = net.flatten();
  EXPECT_EQ(static_cast<std::size_t>(theta.size()), net.num_parameters());
  Mlp other(3, 5, 2, 2);
  other.unflatten(theta);
  EXPECT_EQ(other.flatten(), theta);
  EXPECT_THROW(other.unflatten(VectorXd::Zero(3)), Error);
}

TEST(Mlp, AdamFirstStepIsLearningRate) {
  Mlp net(1, 1, 1, 1);
  net.init_xavier(1);
  const VectorXd before = net.flatten();
  Mlp::Gradients g;
  g.weights = {MatrixXd::Constant(1, 1, 3.0), MatrixXd::Constant(1, 1, -0.5)};
  g.biases = {VectorXd::Constant(1, 2.0), VectorXd::Constant(1, 0.0)};
  Adam adam(0.01, 0.9, 0.999, 1e-8);
  adam.step(net, g);
  const VectorXd d = net.flatten() - before;
  // Layout is W0, b0, W1, b1.
  EXPECT_NEAR(d(0), -0.01, 1e-9);
  EXPECT_NEAR(d(1), -0.01, 1e-9);
  EXPECT_NEAR(d(2), 0.01, 1e-9);
  EXPECT_NEAR(d(3), 0.0, 1e-15);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Mlp, NormalizerRoundTripAndFloor) {
  Dataset ds = synthetic(50, [](const FeatureVector& f) {
    TargetVector t = TargetVector::Zero();
    t[0] = 3 * f[0] + 1;
    t[1] = 7.0;  // constant component
    return t;
  });
  std::vector<int> idx(50);
  for (int i = 0; i < 50; ++i) idx[i] = i;
  const Normalizer n = Normalizer::fit(ds.samples, idx);
  EXPECT_DOUBLE_EQ(n.target_std[1], Normalizer::kMinStd);
  const TargetVector t = ds.samples[3].target;
  EXPECT_LT((n.denormalize_target(n.normalize_target(t)) - t).cwiseAbs().maxCoeff(), 1e-12);
  FeatureVector mean = FeatureVector::Zero();
  for (const auto& s : ds.samples) mean += n.normalize_features(s.features);
  EXPECT_LT(mean.cwiseAbs().maxCoeff() / 50, 1e-12);
}

TEST(Mlp, LearnsLinearTarget) {
  const Dataset ds = synthetic(1024, [](const FeatureVector& f) {
    TargetVector t;
    for (int k = 0; k < kTargetDim; ++k) t[k] = 0.5 * f[k % kFeatureDim] - 0.2 * f[(k + 5) % kFeatureDim];
    return t;
  });
  const TrainResult r = train(ds, small_train(40));
  EXPECT_LT(r.curve.back().val_l1, 0.2 * r.baseline_val_l1);
  EXPECT_LT(r.curve.back().train_l1, r.curve.front().train_l1);
  EXPECT_EQ(r.train_idx.size() + r.val_idx.size(), 1024u);
}

TEST(Mlp, ConstantTargetIsFitExactly) {
  const Dataset ds = synthetic(256, [](const FeatureVector&) {
    TargetVector t = TargetVector::Constant(2.5);
    return t;
  });
  const TrainResult r = train(ds, small_train(5));
  // Normalized targets are zero; the output layer learns nothing to undo.
  const TargetVector p = r.net.raw_predict(ds.samples[0].features);
  EXPECT_LT((p - TargetVector::Constant(2.5)).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Mlp, TrainingIsDeterministic) {
  const Dataset ds = synthetic(200, [](const FeatureVector& f) {
    TargetVector t = TargetVector::Zero();
    t[0] = std::sin(3 * f[0]);
    return t;
  });
  const TrainResult a = train(ds, small_train(3)), b = train(ds, small_train(3));
  EXPECT_EQ(serialize_model(a.net), serialize_model(b.net));
  TrainConfig other = small_train(3);
  other.seed = 2;
  EXPECT_NE(serialize_model(train(ds, other).net), serialize_model(a.net));
}

TEST(Mlp, EpochCallbackAndEmptyDataset) {
  const Dataset ds = synthetic(64, [](const FeatureVector& f) {
    TargetVector t = TargetVector::Zero();
    t[0] = f[0];
    return t;
  });
  int calls = 0;
  train(ds, small_train(4), [&](const EpochLoss& e) { EXPECT_EQ(e.epoch, ++calls); });
  EXPECT_EQ(calls, 4);
  EXPECT_THROW(train(Dataset{}, small_train(1)), Error);
}

TEST(Mlp, NonFiniteTargetsReported) {
  Dataset ds = synthetic(64, [](const FeatureVector&) { return TargetVector::Zero().eval(); });
  for (auto& smp : ds.samples) smp.features[0] = std::nan("");
  const TrainConfig c = small_train(1);
  try {
    train(ds, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumerical);
  }
}

TEST(Mlp, MedianBaseline) {
  MatrixXd T(2, 5);
  T << 1, 5, 3, 2, 4, 10, 10, 10, 0, 0;
  const VectorXd m = componentwise_median(T);
  EXPECT_DOUBLE_EQ(m(0), 3.0);
  EXPECT_DOUBLE_EQ(m(1), 10.0);
  EXPECT_DOUBLE_EQ(constant_l1(T, m), (2 + 2 + 0 + 1 + 1 + 0 + 0 + 0 + 10 + 10) / 10.0);
}

TEST(Psd, ProjectionPreservesPsdInput) {
  Mat6 H = Mat6::Identity() * 3.0;
  H(0, 1) = H(1, 0) = 0.5;
  EXPECT_LT((project_psd(H, 1e-4) - H).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Psd, ProjectionLiftsNegativeEigenvalues) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> N;
  for (int n = 0; n < 1000; ++n) {
    Mat6 H;
    for (int i = 0; i < 36; ++i) H.data()[i] = std::pow(10.0, n % 5) * N(gen);
    const Mat6 P = project_psd(H, 1e-4);
    EXPECT_EQ(P, P.transpose());
    EXPECT_EQ(Eigen::LLT<Mat6>(P).info(), Eigen::Success);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat6>(P).eigenvalues()(0), 1e-4 - 1e-12);
  }
  Mat6 bad = Mat6::Identity();
  bad(2, 2) = std::nan("");
  EXPECT_THROW(project_psd(bad, 1e-4), Error);
}

TEST(Model, RoundTripAndCorruption) {
  const Dataset ds = synthetic(64, [](const FeatureVector& f) {
    TargetVector t = TargetVector::Zero();
    t[0] = f[0];
    return t;
  });
  ValueNet net = train(ds, small_train(1)).net;
  net.config_hash = 0xabcdef0123456789ULL;
  const std::string bytes = serialize_model(net);
  const ValueNet back = deserialize_model(bytes);
  EXPECT_EQ(serialize_model(back), bytes);
  EXPECT_EQ(back.config_hash, net.config_hash);
  const FeatureVector phi = ds.samples[1].features;
  EXPECT_EQ(back.raw_predict(phi), net.raw_predict(phi));
  EXPECT_THROW(deserialize_model(bytes.substr(0, bytes.size() - 1)), Error);
  EXPECT_THROW(deserialize_model(bytes + "x"), Error);
  std::string bad = bytes;
  bad[3] = '?';
  EXPECT_THROW(deserialize_model(bad), Error);
}

TEST(Model, PredictionIsPositiveDefinite) {
  const Dataset ds = synthetic(64, [](const FeatureVector& f) {
    ReducedExpansion e;
    e.g = f.head<6>();
    e.H = -Mat6::Identity();
    return e.to_target();
  });
  const ValueNet net = train(ds, small_train(2)).net;
  const ReducedExpansion e = predict_expansion(net, ds.samples[0].features);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat6>(e.H).eigenvalues()(0), net.eps_eig - 1e-12);
}
