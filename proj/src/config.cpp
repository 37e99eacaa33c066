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

#include "vfqp/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace vfqp {

namespace {

std::vector<double> parse_numbers(const std::string& key,
                                  const std::string& value) {
  std::istringstream is(value);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kFormat,
                  "config: '" + key + "' expects numbers, got '" + value + "'");
    }
  }
  return out;
}

double parse_scalar(const std::string& key, const std::string& value) {
  auto v = parse_numbers(key, value);
  if (v.size() != 1)
    throw Error(ErrorCode::kFormat, "config: '" + key + "' expects one number");
  return v[0];
}

template <int N>
Eigen::Matrix<double, N, 1> parse_fixed(const std::string& key,
                                        const std::string& value) {
  auto v = parse_numbers(key, value);
  if (static_cast<int>(v.size()) != N)
    throw Error(ErrorCode::kFormat, "config: '" + key + "' expects " +
                                        std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out[i] = v[i];
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename Vec>
std::string fmt_vec(const Vec& v) {
  std::string s;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    if (i) s += ' ';
    s += fmt(v[i]);
  }
  return s;
}

using Setter = std::function<void(Config&, const std::string&, const std::string&)>;

void set_gait_key(GaitConfig& g, const std::string& key, const std::string& k,
                  const std::string& value) {
  if (k == "t_stance") {
    g.t_stance = parse_scalar(key, value);
  } else if (k == "t_swing") {
    g.t_swing = parse_scalar(key, value);
  } else if (k == "phase_offset") {
    auto v = parse_fixed<4>(key, value);
    for (int i = 0; i < kNumLegs; ++i) g.phase_offset[i] = v[i];
  } else {
    throw Error(ErrorCode::kFormat, "config: unknown key '" + key + "'");
  }
}

void for_each_gait(Config& c, const std::function<void(GaitConfig&)>& f) {
  f(c.trot);
  f(c.bound);
  f(c.stand);
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model.mass", [](Config& c, const std::string& k, const std::string& v) { c.model.mass = parse_scalar(k, v); }},
      {"model.inertia", [](Config& c, const std::string& k, const std::string& v) {
         c.model.inertia = parse_fixed<3>(k, v).asDiagonal();
       }},
      {"model.dt", [](Config& c, const std::string& k, const std::string& v) { c.model.dt = parse_scalar(k, v); }},
      {"model.mu", [](Config& c, const std::string& k, const std::string& v) { c.qp.mu = parse_scalar(k, v); }},
      {"model.f_z_max", [](Config& c, const std::string& k, const std::string& v) { c.qp.f_z_max = parse_scalar(k, v); }},
      {"gait.k_raibert", [](Config& c, const std::string& k, const std::string& v) {
         const double x = parse_scalar(k, v);
         for_each_gait(c, [x](GaitConfig& g) { g.k_raibert = x; });
       }},
      {"gait.v_alpha", [](Config& c, const std::string& k, const std::string& v) {
         const double x = parse_scalar(k, v);
         for_each_gait(c, [x](GaitConfig& g) { g.v_alpha = x; });
       }},
      {"gait.filter_dt", [](Config& c, const std::string& k, const std::string& v) {
         const double x = parse_scalar(k, v);
         for_each_gait(c, [x](GaitConfig& g) { g.filter_dt = x; });
       }},
      {"gait.shoulder", [](Config& c, const std::string& k, const std::string& v) {
         const Vec3 s = parse_fixed<3>(k, v).cwiseAbs();
         const LegPoints sh{Vec3(s.x(), s.y(), -s.z()), Vec3(s.x(), -s.y(), -s.z()),
                            Vec3(-s.x(), s.y(), -s.z()), Vec3(-s.x(), -s.y(), -s.z())};
         for_each_gait(c, [&sh](GaitConfig& g) { g.shoulder = sh; });
       }},
      {"cost.w", [](Config& c, const std::string& k, const std::string& v) { c.cost.w = parse_fixed<12>(k, v); }},
      {"cost.r", [](Config& c, const std::string& k, const std::string& v) { c.cost.r = parse_scalar(k, v); }},
      {"cost.height", [](Config& c, const std::string& k, const std::string& v) { c.cost.height = parse_scalar(k, v); }},
      {"qp.r", [](Config& c, const std::string& k, const std::string& v) { c.qp.r = parse_scalar(k, v); }},
      {"ilqr.max_iters", [](Config& c, const std::string& k, const std::string& v) {
         c.ilqr.max_iters = static_cast<int>(parse_scalar(k, v));
       }},
      {"ilqr.cost_tol", [](Config& c, const std::string& k, const std::string& v) { c.ilqr.cost_tol = parse_scalar(k, v); }},
      {"ilqr.reg_init", [](Config& c, const std::string& k, const std::string& v) { c.ilqr.reg_init = parse_scalar(k, v); }},
      {"ilqr.reg_max", [](Config& c, const std::string& k, const std::string& v) { c.ilqr.reg_max = parse_scalar(k, v); }},
      {"data.long_cycles", [](Config& c, const std::string& k, const std::string& v) { c.data.long_cycles = parse_scalar(k, v); }},
      {"data.short_cycles", [](Config& c, const std::string& k, const std::string& v) { c.data.short_cycles = parse_scalar(k, v); }},
      {"data.sample_cycles", [](Config& c, const std::string& k, const std::string& v) { c.data.sample_cycles = parse_scalar(k, v); }},
      {"data.vcmd_max", [](Config& c, const std::string& k, const std::string& v) { c.data.vcmd_max = parse_scalar(k, v); }},
      {"data.height_range", [](Config& c, const std::string& k, const std::string& v) { c.data.height_range = parse_scalar(k, v); }},
      {"data.attitude_range", [](Config& c, const std::string& k, const std::string& v) { c.data.attitude_range = parse_scalar(k, v); }},
      {"data.lin_vel_range", [](Config& c, const std::string& k, const std::string& v) { c.data.lin_vel_range = parse_scalar(k, v); }},
      {"data.ang_vel_range", [](Config& c, const std::string& k, const std::string& v) { c.data.ang_vel_range = parse_scalar(k, v); }},
      {"data.min_yield", [](Config& c, const std::string& k, const std::string& v) { c.data.min_yield = parse_scalar(k, v); }},
      {"data.fxy_max", [](Config& c, const std::string& k, const std::string& v) { c.data.fxy_max = parse_scalar(k, v); }},
      {"train.epochs", [](Config& c, const std::string& k, const std::string& v) { c.train.epochs = static_cast<int>(parse_scalar(k, v)); }},
      {"train.batch", [](Config& c, const std::string& k, const std::string& v) { c.train.batch = static_cast<int>(parse_scalar(k, v)); }},
      {"train.lr", [](Config& c, const std::string& k, const std::string& v) { c.train.lr = parse_scalar(k, v); }},
      {"train.beta1", [](Config& c, const std::string& k, const std::string& v) { c.train.beta1 = parse_scalar(k, v); }},
      {"train.beta2", [](Config& c, const std::string& k, const std::string& v) { c.train.beta2 = parse_scalar(k, v); }},
      {"train.adam_eps", [](Config& c, const std::string& k, const std::string& v) { c.train.adam_eps = parse_scalar(k, v); }},
      {"train.seed", [](Config& c, const std::string& k, const std::string& v) {
         c.train.seed = static_cast<std::uint64_t>(parse_scalar(k, v));
       }},
      {"train.val_fraction", [](Config& c, const std::string& k, const std::string& v) { c.train.val_fraction = parse_scalar(k, v); }},
      {"train.eps_eig", [](Config& c, const std::string& k, const std::string& v) { c.train.eps_eig = parse_scalar(k, v); }},
      {"train.hidden_layers", [](Config& c, const std::string& k, const std::string& v) {
         c.train.hidden_layers = static_cast<int>(parse_scalar(k, v));
       }},
      {"train.hidden_units", [](Config& c, const std::string& k, const std::string& v) {
         c.train.hidden_units = static_cast<int>(parse_scalar(k, v));
       }},
      {"sim.control_rate", [](Config& c, const std::string& k, const std::string& v) { c.sim.control_rate = parse_scalar(k, v); }},
      {"sim.prediction_rate", [](Config& c, const std::string& k, const std::string& v) { c.sim.prediction_rate = parse_scalar(k, v); }},
      {"sim.duration", [](Config& c, const std::string& k, const std::string& v) { c.sim.duration = parse_scalar(k, v); }},
      {"sim.min_height", [](Config& c, const std::string& k, const std::string& v) { c.sim.min_height = parse_scalar(k, v); }},
      {"sim.max_height", [](Config& c, const std::string& k, const std::string& v) { c.sim.max_height = parse_scalar(k, v); }},
      {"sim.max_attitude", [](Config& c, const std::string& k, const std::string& v) { c.sim.max_attitude = parse_scalar(k, v); }},
      {"sim.obs_noise_std", [](Config& c, const std::string& k, const std::string& v) { c.sim.obs_noise_std = parse_scalar(k, v); }},
      {"sim.settle_time", [](Config& c, const std::string& k, const std::string& v) { c.sim.settle_time = parse_scalar(k, v); }},
  };
  return table;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const GaitConfig& Config::gait(GaitKind kind) const {
  switch (kind) {
    case GaitKind::kTrot: return trot;
    case GaitKind::kBound: return bound;
    case GaitKind::kStand: return stand;
  }
  return trot;
}

void Config::set(const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    const std::string section = key.substr(0, dot);
    const std::string name = key.substr(dot + 1);
    if (section == "trot") return set_gait_key(trot, key, name, value);
    if (section == "bound") return set_gait_key(bound, key, name, value);
    if (section == "stand") return set_gait_key(stand, key, name, value);
  }
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end())
    throw Error(ErrorCode::kFormat, "config: unknown key '" + key + "'");
  it->second(*this, key, value);
}

Config Config::parse(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::kFormat, std::string("config: ") + e.what());
  }
  Config cfg;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) {
      throw Error(ErrorCode::kFormat,
                  "config: key '" + section + "' outside of a [section]");
    }
    for (const auto& [name, leaf] : body) {
      std::string value = leaf.data();
      if (auto hash = value.find('#'); hash != std::string::npos)
        value.erase(hash);
      cfg.set(section + "." + name, value);
    }
  }
  cfg.validate();
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::validate() const {
  model.validate();
  trot.validate();
  bound.validate();
  stand.validate();
  if (!(qp.mu > 0.0) || !(qp.f_z_max > 0.0) || !(qp.r > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "config: mu, f_z_max, qp.r must be > 0");
  if (!(cost.r > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "config: cost.r must be > 0");
  if (train.epochs < 1 || train.batch < 1)
    throw Error(ErrorCode::kInvalidArgument, "config: epochs and batch must be >= 1");
  if (!(train.val_fraction >= 0.0 && train.val_fraction < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "config: val_fraction must be in [0,1)");
  if (!(sim.control_rate > 0.0) || !(sim.prediction_rate > 0.0) || !(sim.duration > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "config: sim rates and duration must be > 0");
}

void DataConfig::validate() const {
  if (!(sample_cycles > 0.0) || !(short_cycles > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "config: data cycle counts must be > 0");
  if (!(sample_cycles + short_cycles <= long_cycles + 1e-9))
    throw Error(ErrorCode::kInvalidArgument,
                "config: sample_cycles + short_cycles must not exceed long_cycles");
}

std::string Config::data_canonical(GaitKind kind) const {
  const GaitConfig& g = gait(kind);
  std::ostringstream os;
  os << "model.mass=" << fmt(model.mass) << "\n"
     << "model.inertia=" << fmt_vec(Vec3(model.inertia.diagonal())) << "\n"
     << "model.dt=" << fmt(model.dt) << "\n"
     << "model.mu=" << fmt(qp.mu) << "\n"
     << "model.f_z_max=" << fmt(qp.f_z_max) << "\n"
     << "gait.kind=" << to_string(g.kind) << "\n"
     << "gait.t_stance=" << fmt(g.t_stance) << "\n"
     << "gait.t_swing=" << fmt(g.t_swing) << "\n"
     << "gait.phase_offset=" << fmt_vec(g.phase_offset) << "\n"
     << "gait.shoulder=" << fmt_vec(g.shoulder[0]) << ";" << fmt_vec(g.shoulder[1])
     << ";" << fmt_vec(g.shoulder[2]) << ";" << fmt_vec(g.shoulder[3]) << "\n"
     << "gait.k_raibert=" << fmt(g.k_raibert) << "\n"
     << "gait.v_alpha=" << fmt(g.v_alpha) << "\n"
     << "gait.filter_dt=" << fmt(g.filter_dt) << "\n"
     << "cost.w=" << fmt_vec(cost.w) << "\n"
     << "cost.r=" << fmt(cost.r) << "\n"
     << "cost.height=" << fmt(cost.height) << "\n"
     << "ilqr.max_iters=" << ilqr.max_iters << "\n"
     << "ilqr.cost_tol=" << fmt(ilqr.cost_tol) << "\n"
     << "ilqr.reg_init=" << fmt(ilqr.reg_init) << "\n"
     << "ilqr.reg_max=" << fmt(ilqr.reg_max) << "\n"
     << "data.long_cycles=" << fmt(data.long_cycles) << "\n"
     << "data.short_cycles=" << fmt(data.short_cycles) << "\n"
     << "data.sample_cycles=" << fmt(data.sample_cycles) << "\n"
     << "data.vcmd_max=" << fmt(data.vcmd_max) << "\n"
     << "data.height_range=" << fmt(data.height_range) << "\n"
     << "data.attitude_range=" << fmt(data.attitude_range) << "\n"
     << "data.lin_vel_range=" << fmt(data.lin_vel_range) << "\n"
     << "data.ang_vel_range=" << fmt(data.ang_vel_range) << "\n"
     << "data.fxy_max=" << fmt(data.fxy_max) << "\n";
  return os.str();
}

std::uint64_t Config::data_hash(GaitKind kind) const {
  return fnv1a64(data_canonical(kind));
}

}  // namespace vfqp
