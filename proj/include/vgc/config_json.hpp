// Copyright 2026 The vgc Authors. All Rights Reserved.
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
// =============================================================================
//
// JSON run configuration. Field names mirror RunConfig; missing required
// fields are reported by name.

#pragma once

#include <string>

#include <json.hpp>

#include "vgc/error.hpp"
#include "vgc/trainer.hpp"

namespace vgc {

namespace detail {

template <typename T>
T require_field(const nlohmann::json& j, const std::string& name) {
  if (!j.contains(name)) throw config_error("config field '" + name + "' is missing");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw config_error("config field '" + name + "' has the wrong type");
  }
}

template <typename T>
T field_or(const nlohmann::json& j, const std::string& name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw config_error("config field '" + name + "' has the wrong type");
  }
}

}  // namespace detail

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  using detail::field_or;
  using detail::require_field;

  RunConfig run;
  run.seed = require_field<std::uint64_t>(j, "seed");
  run.workers = require_field<std::uint32_t>(j, "workers");
  run.batch_size = require_field<Index>(j, "batch_size");
  run.epochs = require_field<Index>(j, "epochs");
  run.codec = codec_from_string(require_field<std::string>(j, "codec"));
  run.quantize = field_or<bool>(j, "quantize", true);
  run.lr_halve_every = field_or<Index>(j, "lr_halve_every", 0);
  run.transport = transport_from_string(field_or<std::string>(j, "transport", "inproc"));
  run.rendezvous = field_or<std::string>(j, "rendezvous", "127.0.0.1:0");
  run.check_replicas = field_or<bool>(j, "check_replicas", true);
  run.track_conservation = field_or<bool>(j, "track_conservation", false);
  run.record_abs_residuals = field_or<bool>(j, "record_abs_residuals", false);
  run.trace_out = field_or<std::string>(j, "trace_out", "");

  if (j.contains("gate")) {
    const auto& g = j.at("gate");
    run.gate.alpha = field_or<double>(g, "alpha", run.gate.alpha);
    run.gate.zeta = field_or<double>(g, "zeta", run.gate.zeta);
    if (g.contains("tau")) run.gate.tau = g.at("tau").get<double>();
  }

  const auto& opt = j.contains("optimizer") ? j.at("optimizer") : nlohmann::json::object();
  run.optimizer.kind = optimizer_kind_from_string(field_or<std::string>(opt, "kind", "sgd"));
  run.optimizer.step_size = field_or<double>(opt, "step_size", run.optimizer.step_size);
  run.optimizer.momentum = field_or<double>(opt, "momentum", run.optimizer.momentum);
  run.optimizer.beta1 = field_or<double>(opt, "beta1", run.optimizer.beta1);
  run.optimizer.beta2 = field_or<double>(opt, "beta2", run.optimizer.beta2);
  run.optimizer.epsilon = field_or<double>(opt, "epsilon", run.optimizer.epsilon);

  if (j.contains("model")) {
    const auto& m = j.at("model");
    const std::string kind = field_or<std::string>(m, "kind", "logreg");
    if (kind == "logreg") {
      run.model.kind = ModelConfig::Kind::logreg;
    } else if (kind == "mlp") {
      run.model.kind = ModelConfig::Kind::mlp;
    } else {
      throw config_error("unknown model kind '" + kind + "'");
    }
    run.model.hidden = field_or<Index>(m, "hidden", run.model.hidden);
  }

  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    run.dataset.samples = field_or<Index>(d, "samples", run.dataset.samples);
    run.dataset.test_samples = field_or<Index>(d, "test_samples", run.dataset.test_samples);
    run.dataset.features = field_or<Index>(d, "features", run.dataset.features);
    run.dataset.separation = field_or<double>(d, "separation", run.dataset.separation);
    run.dataset.noise = field_or<double>(d, "noise", run.dataset.noise);
  }

  return run;
}

// Run summary: a strict superset of what a results table row needs
// (method, alpha, tau, accuracy, compression).
inline nlohmann::json summary_json(const RunConfig& run, const TrainResult& result) {
  nlohmann::json j;
  j["method"] = to_string(run.codec);
  j["alpha"] = run.gate.alpha;
  if (run.gate.tau) {
    j["tau"] = *run.gate.tau;
  } else {
    j["tau"] = nullptr;
  }
  j["zeta"] = run.gate.zeta;
  j["quantize"] = run.quantize;
  j["optimizer"] = run.optimizer.kind == OptimizerConfig::Kind::sgd        ? "sgd"
                   : run.optimizer.kind == OptimizerConfig::Kind::momentum ? "momentum"
                                                                           : "adam";
  j["step_size"] = run.optimizer.step_size;
  j["workers"] = run.workers;
  j["batch_size"] = run.batch_size;
  j["epochs"] = run.epochs;
  j["seed"] = run.seed;
  j["transport"] = to_string(run.transport);
  j["total_params"] = result.total_params;
  j["steps_per_epoch"] = result.steps_per_epoch;
  j["accuracy"] = result.final_accuracy;
  j["train_loss"] = result.final_train_loss;
  j["sent_params_mean"] = result.sent_params_mean;
  if (std::isinf(result.compression_ratio)) {
    j["compression"] = "inf";
  } else {
    j["compression"] = result.compression_ratio;
  }
  j["bytes_on_wire"] = result.bytes_on_wire;
  j["replicas_consistent"] = result.replicas_consistent;
  return j;
}

}  // namespace vgc
