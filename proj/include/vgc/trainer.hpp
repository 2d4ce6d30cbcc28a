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
// Synchronous data-parallel training harness. Every worker computes
// per-sample gradient sums on its shard, runs its codec, exchanges payloads
// with everyone (allgatherv semantics), applies the identical merged mean
// update, and keeps optimizer state locally. Runs are deterministic
// functions of the configuration, including the seed.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vgc/dataset.hpp"
#include "vgc/optim.hpp"
#include "vgc/stats.hpp"
#include "vgc/types.hpp"

namespace vgc {

enum class Codec { none, basic, strom, hybrid };

Codec codec_from_string(const std::string& s);
std::string to_string(Codec c);

// seq runs workers one after another in the calling thread; inproc and tcp
// run one thread per worker. All three produce identical results for the
// same configuration.
enum class TransportKind { seq, inproc, tcp };

TransportKind transport_from_string(const std::string& s);
std::string to_string(TransportKind t);

struct ModelConfig {
  enum class Kind { logreg, mlp };
  Kind kind = Kind::logreg;
  Index hidden = 32;  // mlp only
};

struct DatasetConfig {
  Index samples = 1000;       // training samples
  Index test_samples = 500;
  Index features = 20;
  double separation = 3.0;
  double noise = 1.0;
};

struct RunConfig {
  std::uint32_t workers = 1;
  Index batch_size = 16;
  Index epochs = 1;
  std::uint64_t seed = 1;
  Codec codec = Codec::none;
  GateConfig gate;
  bool quantize = true;  // basic codec only: encode sent values to 4 bits
  OptimizerConfig optimizer;
  Index lr_halve_every = 0;  // halve the step size every k epochs; 0 = constant
  ModelConfig model;
  DatasetConfig dataset;
  TransportKind transport = TransportKind::inproc;
  std::string rendezvous = "127.0.0.1:0";

  // Instrumentation.
  bool check_replicas = true;
  bool track_conservation = false;
  bool record_abs_residuals = false;
  std::string trace_out;  // record worker 0's batch sums to this file

  void validate() const;
};

struct MetricsRow {
  Index epoch = 0;
  Index step = 0;  // cumulative steps at the end of this epoch
  double train_loss = 0;
  double test_accuracy = 0;
  double sent_params_mean = 0;      // per worker per step within the epoch
  std::uint64_t bytes_on_wire = 0;  // summed over the epoch and all workers
  double compression_ratio = 0;     // epoch-local
};

struct TrainResult {
  std::vector<MetricsRow> rows;
  Index total_params = 0;
  Index steps_per_epoch = 0;
  double final_accuracy = 0;
  double final_train_loss = 0;
  double sent_params_mean = 0;   // whole run, per worker per step
  double compression_ratio = 0;  // whole run
  std::uint64_t bytes_on_wire = 0;
  Vector<float> final_params;

  bool replicas_consistent = true;
  Index first_divergent_step = -1;

  double conservation_max_rel_err = 0;  // track_conservation only
  double median_abs_residual = 0;       // record_abs_residuals only
};

// Total parameter count divided by the mean number of parameters sent per
// step per worker. +inf when nothing was ever sent.
double compression_ratio(Index total_params, std::span<const double> sent_per_step_per_worker);

TrainResult train(const RunConfig& run);

// Fixed column order: epoch,step,train_loss,test_accuracy,sent_params_mean,
// bytes_on_wire,compression_ratio.
void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);
std::string metrics_csv_string(const std::vector<MetricsRow>& rows);

}  // namespace vgc
