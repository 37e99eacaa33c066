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

#include "vfqp/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "binary_io.hpp"

namespace vfqp {

Mlp::Mlp(int input, int hidden_units, int hidden_layers, int output)
    : input_(input),
      hidden_units_(hidden_units),
      hidden_layers_(hidden_layers),
      output_(output) {
  if (input < 1 || output < 1 || hidden_layers < 0 ||
      (hidden_layers > 0 && hidden_units < 1))
    throw Error(ErrorCode::kInvalidArgument, "mlp: bad layer dimensions");
  int fan_in = input;
  for (int l = 0; l <= hidden_layers; ++l) {
    const int fan_out = l == hidden_layers ? output : hidden_units;
    weights.push_back(Eigen::MatrixXd::Zero(fan_out, fan_in));
    biases.push_back(Eigen::VectorXd::Zero(fan_out));
    fan_in = fan_out;
  }
}

std::size_t Mlp::num_parameters() const {
  std::size_t n = 0;
  for (int l = 0; l < num_layers(); ++l)
    n += weights[l].size() + biases[l].size();
  return n;
}

void Mlp::init_xavier(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd& W = weights[l];
    const double a = std::sqrt(6.0 / static_cast<double>(W.rows() + W.cols()));
    std::uniform_real_distribution<double> dist(-a, a);
    for (int i = 0; i < W.rows(); ++i)
      for (int j = 0; j < W.cols(); ++j) W(i, j) = dist(rng);
    biases[l].setZero();
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& X) const {
  if (X.rows() != input_)
    throw Error(ErrorCode::kDimMismatch, "mlp: input dimension mismatch");
  Eigen::MatrixXd a = X;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weights[l] * a;
    z.colwise() += biases[l];
    a = l + 1 < num_layers() ? Eigen::MatrixXd(z.array().tanh()) : z;
  }
  return a;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& X,
                             std::vector<Eigen::MatrixXd>& acts) const {
  if (X.rows() != input_)
    throw Error(ErrorCode::kDimMismatch, "mlp: input dimension mismatch");
  const int L = num_layers();
  acts.resize(L + 1);
  acts[0] = X;
  for (int l = 0; l < L; ++l) {
    acts[l + 1].noalias() = weights[l] * acts[l];
    acts[l + 1].colwise() += biases[l];
    if (l + 1 < L) acts[l + 1] = acts[l + 1].array().tanh();
  }
  return acts[L];
}

Mlp::Gradients Mlp::backward(const Eigen::MatrixXd& X, const Eigen::MatrixXd& dY,
                             Eigen::MatrixXd* Y) const {
  if (X.rows() != input_ || dY.rows() != output_ || dY.cols() != X.cols())
    throw Error(ErrorCode::kDimMismatch, "mlp: backward dimension mismatch");
  std::vector<Eigen::MatrixXd> acts;
  forward(X, acts);
  if (Y) *Y = acts.back();
  return backward(acts, dY);
}

Mlp::Gradients Mlp::backward(const std::vector<Eigen::MatrixXd>& acts,
                             const Eigen::MatrixXd& dY) const {
  const int L = num_layers();
  if (static_cast<int>(acts.size()) != L + 1 || dY.rows() != output_ ||
      dY.cols() != acts[0].cols())
    throw Error(ErrorCode::kDimMismatch, "mlp: backward dimension mismatch");
  Gradients g;
  g.weights.resize(L);
  g.biases.resize(L);
  Eigen::MatrixXd delta = dY;
  for (int l = L - 1; l >= 0; --l) {
    g.weights[l].noalias() = delta * acts[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = weights[l].transpose() * delta;
      delta = back.array() * (1.0 - acts[l].array().square());
    }
  }
  return g;
}

Eigen::VectorXd Mlp::flatten() const {
  Eigen::VectorXd theta(num_parameters());
  Eigen::Index k = 0;
  for (int l = 0; l < num_layers(); ++l) {
    for (int i = 0; i < weights[l].rows(); ++i)
      for (int j = 0; j < weights[l].cols(); ++j) theta[k++] = weights[l](i, j);
    for (int i = 0; i < biases[l].size(); ++i) theta[k++] = biases[l][i];
  }
  return theta;
}

void Mlp::unflatten(const Eigen::VectorXd& theta) {
  if (static_cast<std::size_t>(theta.size()) != num_parameters())
    throw Error(ErrorCode::kDimMismatch, "mlp: parameter count mismatch");
  Eigen::Index k = 0;
  for (int l = 0; l < num_layers(); ++l) {
    for (int i = 0; i < weights[l].rows(); ++i)
      for (int j = 0; j < weights[l].cols(); ++j) weights[l](i, j) = theta[k++];
    for (int i = 0; i < biases[l].size(); ++i) biases[l][i] = theta[k++];
  }
}

Eigen::VectorXd Mlp::flatten(const Gradients& g) {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < g.weights.size(); ++l)
    n += g.weights[l].size() + g.biases[l].size();
  Eigen::VectorXd theta(n);
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    for (int i = 0; i < g.weights[l].rows(); ++i)
      for (int j = 0; j < g.weights[l].cols(); ++j) theta[k++] = g.weights[l](i, j);
    for (int i = 0; i < g.biases[l].size(); ++i) theta[k++] = g.biases[l][i];
  }
  return theta;
}

bool Mlp::all_finite() const {
  for (int l = 0; l < num_layers(); ++l)
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  return true;
}

double l1_loss(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& T,
               Eigen::MatrixXd* dY) {
  if (Y.rows() != T.rows() || Y.cols() != T.cols())
    throw Error(ErrorCode::kDimMismatch, "l1_loss: shape mismatch");
  const double n = static_cast<double>(Y.size());
  const Eigen::ArrayXXd r = (Y - T).array();
  if (dY) *dY = (r.sign() / n).matrix();
  return r.abs().sum() / n;
}

double gradient_check(const Mlp& net, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& T, double h) {
  Eigen::MatrixXd Y, dY;
  l1_loss(net.forward(X), T, &dY);
  const Eigen::VectorXd analytic = Mlp::flatten(net.backward(X, dY, &Y));

  Mlp probe = net;
  Eigen::VectorXd theta = net.flatten();
  double worst = 0.0;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    const double t0 = theta[k];
    theta[k] = t0 + h;
    probe.unflatten(theta);
    const double up = l1_loss(probe.forward(X), T);
    theta[k] = t0 - h;
    probe.unflatten(theta);
    const double down = l1_loss(probe.forward(X), T);
    theta[k] = t0;
    const double fd = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[k]), std::abs(fd), 1e-6});
    worst = std::max(worst, std::abs(analytic[k] - fd) / denom);
  }
  return worst;
}

void Adam::step(Mlp& net, const Mlp::Gradients& g) {
  const int L = net.num_layers();
  if (mw_.empty()) {
    for (int l = 0; l < L; ++l) {
      mw_.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
      vw_.push_back(mw_.back());
      mb_.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
      vb_.push_back(mb_.back());
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (int l = 0; l < L; ++l) {
    mw_[l] = beta1_ * mw_[l] + (1.0 - beta1_) * g.weights[l];
    vw_[l] = beta2_ * vw_[l] + (1.0 - beta2_) * g.weights[l].cwiseAbs2();
    net.weights[l].array() -=
        lr_ * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + eps_);
    mb_[l] = beta1_ * mb_[l] + (1.0 - beta1_) * g.biases[l];
    vb_[l] = beta2_ * vb_[l] + (1.0 - beta2_) * g.biases[l].cwiseAbs2();
    net.biases[l].array() -=
        lr_ * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + eps_);
  }
}

Normalizer Normalizer::fit(const std::vector<TrainingSample>& samples,
                           const std::vector<int>& idx) {
  Normalizer nz;
  if (idx.empty()) return nz;
  const double n = static_cast<double>(idx.size());
  FeatureVector fm = FeatureVector::Zero();
  TargetVector tm = TargetVector::Zero();
  for (int i : idx) {
    fm += samples[i].features;
    tm += samples[i].target;
  }
  fm /= n;
  tm /= n;
  FeatureVector fv = FeatureVector::Zero();
  TargetVector tv = TargetVector::Zero();
  for (int i : idx) {
    fv += (samples[i].features - fm).cwiseAbs2();
    tv += (samples[i].target - tm).cwiseAbs2();
  }
  nz.feature_mean = fm;
  nz.target_mean = tm;
  nz.feature_std = (fv / n).cwiseSqrt().cwiseMax(kMinStd);
  nz.target_std = (tv / n).cwiseSqrt().cwiseMax(kMinStd);
  return nz;
}

FeatureVector Normalizer::normalize_features(const FeatureVector& f) const {
  return (f - feature_mean).cwiseQuotient(feature_std);
}

TargetVector Normalizer::normalize_target(const TargetVector& t) const {
  return (t - target_mean).cwiseQuotient(target_std);
}

TargetVector Normalizer::denormalize_target(const TargetVector& z) const {
  return z.cwiseProduct(target_std) + target_mean;
}

TargetVector ValueNet::raw_predict(const FeatureVector& phi) const {
  const Eigen::VectorXd z = mlp.forward(norm.normalize_features(phi));
  if (z.size() != kTargetDim)
    throw Error(ErrorCode::kDimMismatch, "valuenet: output dimension mismatch");
  return norm.denormalize_target(TargetVector(z));
}

Mat6 project_psd(const Mat6& H, double eps_eig) {
  if (!H.allFinite())
    throw Error(ErrorCode::kNonFinite, "project_psd: non-finite Hessian");
  const Mat6 S = 0.5 * (H + H.transpose());
  Eigen::SelfAdjointEigenSolver<Mat6> es(S);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::kNumerical, "project_psd: eigendecomposition failed");
  // Reconstruction rounding is proportional to the spectral radius.
  const double spread = es.eigenvalues().cwiseAbs().maxCoeff();
  const double floor =
      eps_eig + 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, spread);
  Vec6 lam = es.eigenvalues();
  bool lifted = false;
  for (int i = 0; i < 6; ++i) {
    if (lam[i] < floor) {
      lam[i] = floor;
      lifted = true;
    }
  }
  if (!lifted) return S;
  const Mat6& Vm = es.eigenvectors();
  Mat6 out = Vm * lam.asDiagonal() * Vm.transpose();
  return 0.5 * (out + out.transpose());
}

ReducedExpansion expansion_from_raw(const TargetVector& raw, double eps_eig) {
  ReducedExpansion e = ReducedExpansion::from_target(raw);
  if (!e.g.allFinite())
    throw Error(ErrorCode::kNonFinite, "predict_expansion: non-finite gradient");
  e.H = project_psd(e.H, eps_eig);
  return e;
}

ReducedExpansion predict_expansion(const ValueNet& net, const FeatureVector& phi) {
  return expansion_from_raw(net.raw_predict(phi), net.eps_eig);
}

namespace {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

std::string serialize_model(const ValueNet& net) {
  const json header = {
      {"format", "vfqp-model"},
      {"version", kModelVersion},
      {"input_dim", net.mlp.input_dim()},
      {"output_dim", net.mlp.output_dim()},
      {"hidden_layers", net.mlp.hidden_layers()},
      {"hidden_units", net.mlp.hidden_units()},
      {"activation", "tanh"},
      {"gait", to_string(net.gait)},
      {"config_hash", hex64(net.config_hash)},
  };
  const std::string text = header.dump();
  binio::Writer w;
  w.bytes(kModelMagic, sizeof(kModelMagic));
  w.u32(kModelVersion);
  w.u32(0);
  w.u64(text.size());
  w.bytes(text.data(), text.size());
  w.f64(net.eps_eig);
  w.f64s(net.norm.feature_mean);
  w.f64s(net.norm.feature_std);
  w.f64s(net.norm.target_mean);
  w.f64s(net.norm.target_std);
  w.f64s(net.mlp.flatten());
  return std::move(w.str());
}

ValueNet deserialize_model(const std::string& bytes) {
  if (bytes.size() < sizeof(kModelMagic))
    throw Error(ErrorCode::kFormat, "model: not a vfqp model (too short)");
  binio::Reader r(bytes, ErrorCode::kCorrupt, "model");
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (!std::equal(magic, magic + 8, kModelMagic))
    throw Error(ErrorCode::kFormat, "model: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kModelVersion)
    throw Error(ErrorCode::kFormat,
                "model: unsupported version " + std::to_string(version));
  r.u32();
  const std::uint64_t header_len = r.u64();
  if (header_len > r.remaining())
    throw Error(ErrorCode::kCorrupt, "model: header exceeds file size");

  ValueNet net;
  try {
    const json header = json::parse(r.text(header_len));
    const int in = header.at("input_dim").get<int>();
    const int out = header.at("output_dim").get<int>();
    if (in != kFeatureDim || out != kTargetDim)
      throw Error(ErrorCode::kDimMismatch, "model: input/output dims differ");
    if (header.at("activation").get<std::string>() != "tanh")
      throw Error(ErrorCode::kFormat, "model: unsupported activation");
    net.mlp = Mlp(in, header.at("hidden_units").get<int>(),
                  header.at("hidden_layers").get<int>(), out);
    net.gait = parse_gait_kind(header.at("gait").get<std::string>());
    net.config_hash =
        std::stoull(header.at("config_hash").get<std::string>(), nullptr, 16);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorrupt, std::string("model: bad header: ") + e.what());
  }

  net.eps_eig = r.f64();
  r.f64s(net.norm.feature_mean);
  r.f64s(net.norm.feature_std);
  r.f64s(net.norm.target_mean);
  r.f64s(net.norm.target_std);
  Eigen::VectorXd theta(net.mlp.num_parameters());
  r.f64s(theta);
  if (r.remaining() != 0)
    throw Error(ErrorCode::kCorrupt, "model: trailing bytes after weights");
  net.mlp.unflatten(theta);
  if (!net.mlp.all_finite())
    throw Error(ErrorCode::kCorrupt, "model: non-finite weights");
  return net;
}

void save_model(const ValueNet& net, const std::string& path) {
  binio::write_file(path, serialize_model(net));
}

ValueNet load_model(const std::string& path) {
  return deserialize_model(binio::read_file(path));
}

void write_loss_csv(const std::vector<EpochLoss>& curve, std::ostream& os) {
  os << "# vfqp-loss v1\n" << "epoch,train_l1,val_l1\n" << std::setprecision(17);
  for (const auto& e : curve)
    os << e.epoch << "," << e.train_l1 << "," << e.val_l1 << "\n";
}

Eigen::VectorXd componentwise_median(const Eigen::MatrixXd& T) {
  Eigen::VectorXd med(T.rows());
  std::vector<double> row(T.cols());
  for (int i = 0; i < T.rows(); ++i) {
    for (int j = 0; j < T.cols(); ++j) row[j] = T(i, j);
    const std::size_t mid = row.size() / 2;
    std::nth_element(row.begin(), row.begin() + mid, row.end());
    double m = row[mid];
    if (row.size() % 2 == 0 && mid > 0) {
      const double lo = *std::max_element(row.begin(), row.begin() + mid);
      m = 0.5 * (m + lo);
    }
    med[i] = m;
  }
  return med;
}

double constant_l1(const Eigen::MatrixXd& T, const Eigen::VectorXd& constant) {
  if (T.size() == 0) return 0.0;
  return (T.colwise() - constant).cwiseAbs().sum() / static_cast<double>(T.size());
}

namespace {

void gather(const std::vector<TrainingSample>& samples, const std::vector<int>& idx,
            const Normalizer& nz, Eigen::MatrixXd& X, Eigen::MatrixXd& T) {
  X.resize(kFeatureDim, static_cast<Eigen::Index>(idx.size()));
  T.resize(kTargetDim, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    X.col(j) = nz.normalize_features(samples[idx[j]].features);
    T.col(j) = nz.normalize_target(samples[idx[j]].target);
  }
}

double eval_l1(const Mlp& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& T) {
  if (X.cols() == 0) return 0.0;
  constexpr Eigen::Index kChunk = 1024;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); j += kChunk) {
    const Eigen::Index n = std::min(kChunk, X.cols() - j);
    sum += (net.forward(X.middleCols(j, n)) - T.middleCols(j, n)).cwiseAbs().sum();
  }
  return sum / static_cast<double>(T.size());
}

}  // namespace

TrainResult train(const Dataset& ds, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  if (ds.samples.empty())
    throw Error(ErrorCode::kInvalidArgument, "train: empty dataset");
  if (cfg.epochs < 1 || cfg.batch < 1)
    throw Error(ErrorCode::kInvalidArgument, "train: epochs and batch must be >= 1");

  TrainResult res;
  std::mt19937_64 rng(cfg.seed);
  const int n = ds.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  int n_val = static_cast<int>(std::floor(cfg.val_fraction * n));
  if (cfg.val_fraction > 0.0 && n >= 2) n_val = std::max(n_val, 1);
  n_val = std::min(n_val, n - 1);
  res.val_idx.assign(order.begin(), order.begin() + n_val);
  res.train_idx.assign(order.begin() + n_val, order.end());

  ValueNet& vn = res.net;
  vn.norm = Normalizer::fit(ds.samples, res.train_idx);
  vn.eps_eig = cfg.eps_eig;
  vn.gait = ds.gait;
  vn.config_hash = ds.config_hash;
  vn.mlp = Mlp(kFeatureDim, cfg.hidden_units, cfg.hidden_layers, kTargetDim);
  vn.mlp.init_xavier(rng());

  Eigen::MatrixXd Xtr, Ttr, Xva, Tva;
  gather(ds.samples, res.train_idx, vn.norm, Xtr, Ttr);
  gather(ds.samples, res.val_idx, vn.norm, Xva, Tva);
  res.baseline_val_l1 = constant_l1(Tva, componentwise_median(Ttr));

  Adam adam(cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps);
  const int n_train = static_cast<int>(res.train_idx.size());
  std::vector<int> perm(n_train);
  std::iota(perm.begin(), perm.end(), 0);
  Eigen::MatrixXd Xb, Tb, Yb, dY;
  std::vector<Eigen::MatrixXd> acts;
  long batch_index = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int start = 0; start < n_train; start += cfg.batch, ++batch_index) {
      const int bs = std::min(cfg.batch, n_train - start);
      Xb.resize(kFeatureDim, bs);
      Tb.resize(kTargetDim, bs);
      for (int j = 0; j < bs; ++j) {
        Xb.col(j) = Xtr.col(perm[start + j]);
        Tb.col(j) = Ttr.col(perm[start + j]);
      }
      Yb = vn.mlp.forward(Xb, acts);
      const double loss = l1_loss(Yb, Tb, &dY);
      if (!std::isfinite(loss))
        throw Error(ErrorCode::kNumerical,
                    "train: non-finite loss in epoch " + std::to_string(epoch) +
                        ", batch " + std::to_string(batch_index));
      adam.step(vn.mlp, vn.mlp.backward(acts, dY));
    }
    if (!vn.mlp.all_finite())
      throw Error(ErrorCode::kNumerical,
                  "train: non-finite parameters after epoch " + std::to_string(epoch));
    EpochLoss e{epoch, eval_l1(vn.mlp, Xtr, Ttr), eval_l1(vn.mlp, Xva, Tva)};
    res.curve.push_back(e);
    if (on_epoch) on_epoch(e);
  }
  return res;
}

}  // namespace vfqp
