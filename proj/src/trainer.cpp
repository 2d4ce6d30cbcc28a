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

#include "vgc/trainer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <thread>
#include <variant>

#include "vgc/codecs.hpp"
#include "vgc/collective.hpp"
#include "vgc/gate.hpp"
#include "vgc/models.hpp"
#include "vgc/quantize.hpp"
#include "vgc/trace.hpp"
#include "vgc/transport.hpp"
#include "vgc/wire.hpp"

namespace vgc {

namespace {

static_assert(std::endian::native == std::endian::little,
              "raw gradient frames assume a little-endian host");

// Internal frames for the uncompressed baseline and the
// quantization-bypassed sparse path. Not part of the codec wire format; the
// leading word never collides with kWireMagic.
constexpr std::uint32_t kRawDenseMagic = 0x56475244u;
constexpr std::uint32_t kRawSparseMagic = 0x56475253u;

void put_u32(Payload& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_u64(Payload& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void put_f32(Payload& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

class RawReader {
 public:
  explicit RawReader(const Payload& p) : p_(p) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, p_.data() + pos_, 4);
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    const std::uint64_t lo = u32();
    return lo | static_cast<std::uint64_t>(u32()) << 32;
  }

  float f32() { return std::bit_cast<float>(u32()); }

 private:
  void need(std::size_t n) {
    if (pos_ + n > p_.size()) throw wire_error("raw frame truncated");
  }

  const Payload& p_;
  std::size_t pos_ = 0;
};

Payload encode_dense(std::uint32_t worker, std::uint64_t step, const Vector<float>& values) {
  Payload out;
  out.reserve(20 + 4 * static_cast<std::size_t>(values.size()));
  put_u32(out, kRawDenseMagic);
  put_u32(out, worker);
  put_u64(out, step);
  put_u32(out, static_cast<std::uint32_t>(values.size()));
  for (Index i = 0; i < values.size(); ++i) put_f32(out, values[i]);
  return out;
}

Payload encode_raw_sparse(std::uint32_t worker, std::uint64_t step,
                          const SparseGradient<float>& values) {
  Payload out;
  out.reserve(20 + 8 * values.size());
  put_u32(out, kRawSparseMagic);
  put_u32(out, worker);
  put_u64(out, step);
  put_u32(out, static_cast<std::uint32_t>(values.size()));
  for (const auto& e : values) {
    put_u32(out, static_cast<std::uint32_t>(e.index));
    put_f32(out, e.value);
  }
  return out;
}

void check_raw_header(RawReader& r, std::uint32_t magic, std::uint32_t expect_worker,
                      std::uint64_t expect_step) {
  if (r.u32() != magic) throw wire_error("unexpected raw frame kind");
  const std::uint32_t worker = r.u32();
  if (worker != expect_worker) throw comm_error(expect_worker, "raw frame from wrong worker");
  const std::uint64_t step = r.u64();
  if (step != expect_step) {
    throw comm_error(expect_worker, "step mismatch: expected " + std::to_string(expect_step) +
                                        ", got " + std::to_string(step));
  }
}

std::uint64_t fnv1a(const void* data, std::size_t len) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

using ModelVariant = std::variant<LogisticRegression<float>, Mlp<float>>;

ModelVariant make_model(const RunConfig& run) {
  if (run.model.kind == ModelConfig::Kind::logreg) {
    return LogisticRegression<float>(run.dataset.features);
  }
  return Mlp<float>(run.dataset.features, run.model.hidden);
}

// Slot arrays written concurrently: each worker touches only its own
// [step * workers + rank] cells, worker 0 owns the per-step and per-epoch
// slots. Everything is preallocated before threads start.
struct SharedSlots {
  std::uint32_t workers = 0;
  std::vector<std::uint32_t> sent;          // [step][rank]
  std::vector<std::uint64_t> param_hash;    // [step][rank]
  std::vector<std::uint64_t> bytes;         // [step], worker 0
  std::vector<Vector<float>> epoch_params;  // [epoch], worker 0
};

class WorkerContext {
 public:
  WorkerContext(const RunConfig& run, const Dataset<float>& train, const ModelVariant& model,
                std::uint32_t rank, Index steps_per_epoch, SharedSlots& shared)
      : run_(run),
        train_(train),
        model_(model),
        rank_(rank),
        steps_per_epoch_(steps_per_epoch),
        shared_(shared) {
    n_params_ = std::visit([](const auto& m) { return m.param_count(); }, model_);
    layout_ = std::visit([](const auto& m) { return m.layout(); }, model_);
    params_ = std::visit([&](const auto& m) { return m.init_params(run_.seed); }, model_);
    optimizer_ = std::make_unique<Optimizer<float>>(run_.optimizer, n_params_);
    stats_ = GradientStats<float>::zeros(n_params_);
    strom_residual_ = Vector<float>::Zero(n_params_);
    if (run_.codec == Codec::basic) {
      basic_gate_ = GateConfig{run_.gate.alpha, run_.gate.zeta, std::nullopt};
    }
    if (run_.track_conservation) {
      cum_sums_ = Vector<double>::Zero(n_params_);
      cum_sent_ = Vector<double>::Zero(n_params_);
    }
    if (!run_.trace_out.empty() && rank_ == 0) {
      trace_.param_count = n_params_;
      trace_.batch_size = run_.batch_size;
    }
  }

  Payload produce(Index epoch, Index step_in_epoch) {
    if (step_in_epoch == 0) {
      shard_ = shard_epoch(static_cast<std::size_t>(train_.size()), run_.workers, run_.seed,
                           static_cast<std::uint64_t>(epoch))[rank_];
      optimizer_->set_step_size(scheduled_step_size(epoch));
    }
    epoch_ = epoch;
    step_in_epoch_ = step_in_epoch;
    global_step_ = static_cast<std::uint64_t>(epoch) *
                       static_cast<std::uint64_t>(steps_per_epoch_) +
                   static_cast<std::uint64_t>(step_in_epoch);

    const BatchGradientSums<float> sums = batch_sums(step_in_epoch);
    if (run_.record_abs_residuals && rank_ == 0) {
      for (Index i = 0; i < n_params_; ++i) {
        abs_residuals_.push_back(std::abs(stats_.r[i] + sums.sum_mean[i]));
      }
    }
    if (!run_.trace_out.empty() && rank_ == 0) trace_.steps.push_back(sums);
    if (run_.track_conservation) cum_sums_ += sums.sum_mean.cast<double>();

    Payload payload;
    std::uint32_t sent_count = 0;
    switch (run_.codec) {
      case Codec::none:
        payload = encode_dense(rank_, global_step_, sums.sum_mean);
        sent_count = static_cast<std::uint32_t>(n_params_);
        break;
      case Codec::basic: {
        SparseGradient<float> send_set = gate_step(stats_, sums, basic_gate_);
        if (run_.track_conservation) {
          for (const auto& e : send_set) cum_sent_[e.index] += e.value;
        }
        if (run_.quantize) {
          StepMessage msg{rank_, global_step_, PayloadMode::quantized, {}};
          sent_count = build_quantized_blocks(send_set, msg.blocks);
          payload = serialize(msg);
        } else {
          payload = encode_raw_sparse(rank_, global_step_, send_set);
          sent_count = static_cast<std::uint32_t>(send_set.size());
        }
        break;
      }
      case Codec::strom: {
        const SignList signs = strom_step(strom_residual_, sums, *run_.gate.tau);
        payload = serialize(sign_message(signs));
        sent_count = static_cast<std::uint32_t>(signs.size());
        break;
      }
      case Codec::hybrid: {
        const SignList signs = hybrid_step(stats_, sums, run_.gate);
        payload = serialize(sign_message(signs));
        sent_count = static_cast<std::uint32_t>(signs.size());
        break;
      }
    }

    shared_.sent[slot()] = sent_count;
    if (run_.track_conservation) update_conservation();
    return payload;
  }

  void consume(const std::vector<Payload>& all, std::size_t bytes_on_wire) {
    Vector<float> dense = Vector<float>::Zero(n_params_);
    switch (run_.codec) {
      case Codec::none:
        merge_dense(all, dense);
        break;
      case Codec::basic:
        if (run_.quantize) {
          scatter(decode_step_messages(all, std::nullopt), dense);
        } else {
          merge_raw_sparse(all, dense);
        }
        break;
      case Codec::strom:
      case Codec::hybrid:
        scatter(decode_step_messages(all, run_.gate.tau), dense);
        break;
    }
    optimizer_->step(params_, dense);

    shared_.param_hash[slot()] = fnv1a(params_.data(), sizeof(float) * params_.size());
    if (rank_ == 0) {
      shared_.bytes[static_cast<std::size_t>(global_step_)] = bytes_on_wire;
      if (step_in_epoch_ == steps_per_epoch_ - 1) {
        shared_.epoch_params[static_cast<std::size_t>(epoch_)] = params_;
      }
    }
  }

  const Vector<float>& params() const { return params_; }
  double conservation_max_rel_err() const { return conservation_max_rel_err_; }
  const std::vector<float>& abs_residuals() const { return abs_residuals_; }
  const Trace& trace() const { return trace_; }

 private:
  std::size_t slot() const {
    return static_cast<std::size_t>(global_step_) * run_.workers + rank_;
  }

  double scheduled_step_size(Index epoch) const {
    double gamma = run_.optimizer.step_size;
    if (run_.lr_halve_every > 0) {
      gamma *= std::pow(0.5, static_cast<double>(epoch / run_.lr_halve_every));
    }
    return gamma;
  }

  BatchGradientSums<float> batch_sums(Index step_in_epoch) {
    const Index shard_size = static_cast<Index>(shard_.size());
    const Index begin = step_in_epoch * run_.batch_size;
    const Index end = std::min(begin + run_.batch_size, shard_size);
    const Index b = end - begin;

    SampleMatrix<float> x(train_.feature_dim(), b);
    Vector<float> y(b);
    for (Index k = 0; k < b; ++k) {
      const auto src = static_cast<Index>(shard_[static_cast<std::size_t>(begin + k)]);
      x.col(k) = train_.features.col(src);
      y[k] = train_.labels[src];
    }
    const SampleMatrix<float> grads = std::visit(
        [&](const auto& m) { return m.per_sample_gradients(params_, x, y); }, model_);
    return per_sample_sums(grads, b);
  }

  // Partition a globally-indexed sparse list into per-group wire blocks,
  // quantizing each group. Dropped values (d > 7) go back into the residual
  // so their updates stay delayed rather than lost.
  std::uint32_t build_quantized_blocks(const SparseGradient<float>& send_set,
                                       std::vector<GroupBlock>& blocks) {
    std::uint32_t sent = 0;
    std::size_t pos = 0;
    for (const ParameterGroup& g : layout_.groups()) {
      SparseGradient<float> local;
      while (pos < send_set.size() && send_set[pos].index < g.offset + g.size) {
        local.push_back({send_set[pos].index - g.offset, send_set[pos].value});
        ++pos;
      }
      if (local.empty()) continue;
      GroupQuantResult<float> res = quantize_group<float>(local, g);
      for (const auto& dropped : res.dropped) {
        stats_.r[g.offset + dropped.index] += dropped.value;
        if (run_.track_conservation) {
          cum_sent_[g.offset + dropped.index] -= static_cast<double>(dropped.value);
        }
      }
      if (!res.header || res.entries.empty()) continue;
      blocks.push_back(GroupBlock{g.group_id, res.header->exponent, std::move(res.entries)});
      sent += static_cast<std::uint32_t>(blocks.back().entries.size());
    }
    return sent;
  }

  StepMessage sign_message(const SignList& signs) const {
    StepMessage msg{rank_, global_step_, PayloadMode::sign_only, {}};
    std::size_t pos = 0;
    for (const ParameterGroup& g : layout_.groups()) {
      GroupBlock block{g.group_id, 0, {}};
      while (pos < signs.size() && signs[pos].index < g.offset + g.size) {
        block.entries.push_back(QuantizedEntry{
            signs[pos].sign < 0, 0, static_cast<std::uint32_t>(signs[pos].index - g.offset)});
        ++pos;
      }
      if (!block.entries.empty()) msg.blocks.push_back(std::move(block));
    }
    return msg;
  }

  SparseGradient<float> decode_step_messages(const std::vector<Payload>& all,
                                             std::optional<double> tau) const {
    return merge_decode<float>(parse_gather(all, global_step_), layout_, run_.workers, tau);
  }

  void merge_dense(const std::vector<Payload>& all, Vector<float>& dense) const {
    Vector<float> acc = Vector<float>::Zero(n_params_);
    Vector<float> one(n_params_);
    for (std::uint32_t r = 0; r < all.size(); ++r) {
      RawReader reader(all[r]);
      check_raw_header(reader, kRawDenseMagic, r, global_step_);
      const std::uint32_t count = reader.u32();
      if (count != static_cast<std::uint32_t>(n_params_)) {
        throw comm_error(r, "dense frame has wrong parameter count");
      }
      for (Index i = 0; i < n_params_; ++i) one[i] = reader.f32();
      acc += one;
    }
    dense = acc / static_cast<float>(run_.workers);
  }

  void merge_raw_sparse(const std::vector<Payload>& all, Vector<float>& dense) const {
    SparseGradient<float> contributions;
    for (std::uint32_t r = 0; r < all.size(); ++r) {
      RawReader reader(all[r]);
      check_raw_header(reader, kRawSparseMagic, r, global_step_);
      const std::uint32_t count = reader.u32();
      for (std::uint32_t k = 0; k < count; ++k) {
        const auto idx = static_cast<Index>(reader.u32());
        const float val = reader.f32();
        if (idx >= n_params_) throw comm_error(r, "sparse frame index out of range");
        contributions.push_back({idx, val});
      }
    }
    std::stable_sort(contributions.begin(), contributions.end(),
                     [](const SparseEntry<float>& a, const SparseEntry<float>& b) {
                       return a.index < b.index;
                     });
    std::size_t i = 0;
    while (i < contributions.size()) {
      const Index idx = contributions[i].index;
      float sum = 0.0f;
      while (i < contributions.size() && contributions[i].index == idx) {
        sum += contributions[i].value;
        ++i;
      }
      dense[idx] = sum / static_cast<float>(run_.workers);
    }
  }

  void scatter(const SparseGradient<float>& sparse, Vector<float>& dense) const {
    for (const auto& e : sparse) dense[e.index] = e.value;
  }

  void update_conservation() {
    double err = 0.0;
    double scale = 0.0;
    for (Index i = 0; i < n_params_; ++i) {
      err = std::max(err, std::abs(cum_sent_[i] + static_cast<double>(stats_.r[i]) -
                                   cum_sums_[i]));
      scale = std::max(scale, std::abs(cum_sums_[i]));
    }
    if (scale > 0.0) {
      conservation_max_rel_err_ = std::max(conservation_max_rel_err_, err / scale);
    }
  }

  const RunConfig& run_;
  const Dataset<float>& train_;
  const ModelVariant& model_;
  std::uint32_t rank_;
  Index steps_per_epoch_;
  SharedSlots& shared_;

  Index n_params_ = 0;
  GroupLayout layout_;
  Vector<float> params_;
  std::unique_ptr<Optimizer<float>> optimizer_;
  GradientStats<float> stats_;
  Vector<float> strom_residual_;
  GateConfig basic_gate_;
  std::vector<std::size_t> shard_;

  Index epoch_ = 0;
  Index step_in_epoch_ = 0;
  std::uint64_t global_step_ = 0;

  Vector<double> cum_sums_;
  Vector<double> cum_sent_;
  double conservation_max_rel_err_ = 0.0;
  std::vector<float> abs_residuals_;
  Trace trace_;
};

}  // namespace

Codec codec_from_string(const std::string& s) {
  if (s == "none") return Codec::none;
  if (s == "basic") return Codec::basic;
  if (s == "strom") return Codec::strom;
  if (s == "hybrid") return Codec::hybrid;
  throw config_error("unknown codec '" + s + "'");
}

std::string to_string(Codec c) {
  switch (c) {
    case Codec::none: return "none";
    case Codec::basic: return "basic";
    case Codec::strom: return "strom";
    case Codec::hybrid: return "hybrid";
  }
  return "?";
}

TransportKind transport_from_string(const std::string& s) {
  if (s == "seq") return TransportKind::seq;
  if (s == "inproc") return TransportKind::inproc;
  if (s == "tcp") return TransportKind::tcp;
  throw config_error("unknown transport '" + s + "'");
}

std::string to_string(TransportKind t) {
  switch (t) {
    case TransportKind::seq: return "seq";
    case TransportKind::inproc: return "inproc";
    case TransportKind::tcp: return "tcp";
  }
  return "?";
}

void RunConfig::validate() const {
  if (workers < 1) throw config_error("workers must be >= 1");
  if (batch_size < 1) throw config_error("batch_size must be >= 1");
  if (epochs < 1) throw config_error("epochs must be >= 1");
  if (dataset.samples < static_cast<Index>(workers)) {
    throw config_error("dataset too small for the worker count");
  }
  if (dataset.features < 1) throw config_error("features must be >= 1");
  if (model.kind == ModelConfig::Kind::mlp && model.hidden < 1) {
    throw config_error("hidden must be >= 1");
  }
  optimizer.validate();
  switch (codec) {
    case Codec::none:
      break;
    case Codec::basic:
      if (gate.tau) throw config_error("gate.tau is not used by the basic codec");
      GateConfig{gate.alpha, gate.zeta, std::nullopt}.validate();
      break;
    case Codec::strom:
      if (!gate.tau) throw config_error("strom codec requires gate.tau");
      if (!(*gate.tau > 0)) throw config_error("gate.tau must be > 0");
      break;
    case Codec::hybrid:
      if (!gate.tau) throw config_error("hybrid codec requires gate.tau");
      gate.validate();
      break;
  }
}

double compression_ratio(Index total_params, std::span<const double> sent_per_step_per_worker) {
  if (sent_per_step_per_worker.empty()) {
    throw std::domain_error("compression_ratio: no steps recorded");
  }
  double total = 0.0;
  for (double s : sent_per_step_per_worker) total += s;
  const double mean = total / static_cast<double>(sent_per_step_per_worker.size());
  if (mean == 0.0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(total_params) / mean;
}

TrainResult train(const RunConfig& run) {
  run.validate();

  const std::uint64_t data_seed = derive_seed(run.seed, 0xD5);
  const DatasetConfig& ds = run.dataset;
  BlobsConfig blob_cfg{ds.samples + ds.test_samples, ds.features, ds.separation, ds.noise};
  const Dataset<float> full = make_blobs<float>(blob_cfg, data_seed);
  Dataset<float> train_set{full.features.leftCols(ds.samples), full.labels.head(ds.samples)};
  Dataset<float> test_set{full.features.rightCols(ds.test_samples),
                          full.labels.tail(ds.test_samples)};

  const ModelVariant model = make_model(run);
  const Index n_params = std::visit([](const auto& m) { return m.param_count(); }, model);

  const Index shard_size = train_set.size() / static_cast<Index>(run.workers);
  if (shard_size < 1) throw config_error("empty shard");
  const Index steps_per_epoch = (shard_size + run.batch_size - 1) / run.batch_size;
  const Index steps_total = steps_per_epoch * run.epochs;

  SharedSlots shared;
  shared.workers = run.workers;
  shared.sent.assign(static_cast<std::size_t>(steps_total) * run.workers, 0);
  shared.param_hash.assign(static_cast<std::size_t>(steps_total) * run.workers, 0);
  shared.bytes.assign(static_cast<std::size_t>(steps_total), 0);
  shared.epoch_params.resize(static_cast<std::size_t>(run.epochs));

  std::vector<std::unique_ptr<WorkerContext>> workers;
  workers.reserve(run.workers);
  for (std::uint32_t r = 0; r < run.workers; ++r) {
    workers.push_back(std::make_unique<WorkerContext>(run, train_set, model, r,
                                                      steps_per_epoch, shared));
  }

  if (run.transport == TransportKind::seq) {
    std::vector<Payload> payloads(run.workers);
    for (Index e = 0; e < run.epochs; ++e) {
      for (Index s = 0; s < steps_per_epoch; ++s) {
        std::size_t bytes = 0;
        for (std::uint32_t r = 0; r < run.workers; ++r) {
          payloads[r] = workers[r]->produce(e, s);
          bytes += payloads[r].size();
        }
        for (std::uint32_t r = 0; r < run.workers; ++r) {
          workers[r]->consume(payloads, bytes);
        }
      }
    }
  } else {
    std::vector<std::unique_ptr<Transport>> transports(run.workers);
    if (run.transport == TransportKind::inproc) {
      auto group = std::make_shared<InprocGroup>(run.workers);
      for (std::uint32_t r = 0; r < run.workers; ++r) {
        transports[r] = std::make_unique<InprocTransport>(group, r);
      }
    } else {
      const auto [host, port] = parse_endpoint(run.rendezvous);
      auto hub = std::make_unique<TcpTransport>(0, run.workers, host, port);
      const std::uint16_t actual_port = hub->port();
      transports[0] = std::move(hub);
      for (std::uint32_t r = 1; r < run.workers; ++r) {
        transports[r] = std::make_unique<TcpTransport>(r, run.workers, host, actual_port);
      }
    }

    std::vector<std::exception_ptr> errors(run.workers);
    std::vector<std::thread> threads;
    threads.reserve(run.workers);
    for (std::uint32_t r = 0; r < run.workers; ++r) {
      threads.emplace_back([&, r] {
        try {
          for (Index e = 0; e < run.epochs; ++e) {
            for (Index s = 0; s < steps_per_epoch; ++s) {
              const Payload payload = workers[r]->produce(e, s);
              const std::vector<Payload> all = transports[r]->allgatherv(payload);
              std::size_t bytes = 0;
              for (const Payload& p : all) bytes += p.size();
              workers[r]->consume(all, bytes);
            }
          }
        } catch (...) {
          errors[r] = std::current_exception();
        }
      });
    }
    for (std::thread& t : threads) t.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  // Replica consistency: every worker must hold bit-identical parameters
  // after every step.
  TrainResult result;
  result.total_params = n_params;
  result.steps_per_epoch = steps_per_epoch;
  if (run.check_replicas) {
    for (Index s = 0; s < steps_total && result.first_divergent_step < 0; ++s) {
      const std::uint64_t h0 = shared.param_hash[static_cast<std::size_t>(s) * run.workers];
      for (std::uint32_t r = 1; r < run.workers; ++r) {
        if (shared.param_hash[static_cast<std::size_t>(s) * run.workers + r] != h0) {
          result.replicas_consistent = false;
          result.first_divergent_step = s;
          break;
        }
      }
    }
    for (std::uint32_t r = 1; r < run.workers; ++r) {
      if (std::memcmp(workers[0]->params().data(), workers[r]->params().data(),
                      sizeof(float) * static_cast<std::size_t>(n_params)) != 0) {
        result.replicas_consistent = false;
        if (result.first_divergent_step < 0) result.first_divergent_step = steps_total - 1;
      }
    }
  }

  // Per-epoch metrics from worker 0's end-of-epoch snapshots.
  std::vector<double> per_step_mean_sent(static_cast<std::size_t>(steps_total), 0.0);
  for (Index s = 0; s < steps_total; ++s) {
    double total = 0.0;
    for (std::uint32_t r = 0; r < run.workers; ++r) {
      total += shared.sent[static_cast<std::size_t>(s) * run.workers + r];
    }
    per_step_mean_sent[static_cast<std::size_t>(s)] = total / run.workers;
  }

  for (Index e = 0; e < run.epochs; ++e) {
    const Vector<float>& snapshot = shared.epoch_params[static_cast<std::size_t>(e)];
    MetricsRow row;
    row.epoch = e;
    row.step = (e + 1) * steps_per_epoch;
    row.train_loss = static_cast<double>(std::visit(
        [&](const auto& m) { return m.mean_loss(snapshot, train_set.features, train_set.labels); },
        model));
    row.test_accuracy = std::visit(
        [&](const auto& m) { return m.accuracy(snapshot, test_set.features, test_set.labels); },
        model);
    if (!std::isfinite(row.train_loss)) {
      throw training_error("loss diverged to a non-finite value at epoch " + std::to_string(e));
    }
    double sent_sum = 0.0;
    std::uint64_t byte_sum = 0;
    for (Index s = e * steps_per_epoch; s < (e + 1) * steps_per_epoch; ++s) {
      sent_sum += per_step_mean_sent[static_cast<std::size_t>(s)];
      byte_sum += shared.bytes[static_cast<std::size_t>(s)];
    }
    row.sent_params_mean = sent_sum / static_cast<double>(steps_per_epoch);
    row.bytes_on_wire = byte_sum;
    row.compression_ratio =
        row.sent_params_mean == 0.0
            ? std::numeric_limits<double>::infinity()
            : static_cast<double>(n_params) / row.sent_params_mean;
    result.rows.push_back(row);
  }

  result.final_accuracy = result.rows.back().test_accuracy;
  result.final_train_loss = result.rows.back().train_loss;
  result.sent_params_mean =
      std::accumulate(per_step_mean_sent.begin(), per_step_mean_sent.end(), 0.0) /
      static_cast<double>(steps_total);
  result.compression_ratio = compression_ratio(n_params, per_step_mean_sent);
  for (std::uint64_t b : shared.bytes) result.bytes_on_wire += b;
  result.final_params = workers[0]->params();

  for (const auto& w : workers) {
    result.conservation_max_rel_err =
        std::max(result.conservation_max_rel_err, w->conservation_max_rel_err());
  }
  if (run.record_abs_residuals) {
    std::vector<float> samples = workers[0]->abs_residuals();
    if (!samples.empty()) {
      auto mid = samples.begin() + static_cast<std::ptrdiff_t>(samples.size() / 2);
      std::nth_element(samples.begin(), mid, samples.end());
      result.median_abs_residual = static_cast<double>(*mid);
    }
  }
  if (!run.trace_out.empty()) write_trace(run.trace_out, workers[0]->trace());

  return result;
}

std::string metrics_csv_string(const std::vector<MetricsRow>& rows) {
  std::string out = "epoch,step,train_loss,test_accuracy,sent_params_mean,bytes_on_wire,compression_ratio\n";
  char buf[256];
  for (const MetricsRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld,%.9g,%.9g,%.9g,%llu,%.9g\n",
                  static_cast<long long>(r.epoch), static_cast<long long>(r.step), r.train_loss,
                  r.test_accuracy, r.sent_params_mean,
                  static_cast<unsigned long long>(r.bytes_on_wire), r.compression_ratio);
    out += buf;
  }
  return out;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw config_error("cannot open metrics file '" + path + "'");
  out << metrics_csv_string(rows);
}

}  // namespace vgc
