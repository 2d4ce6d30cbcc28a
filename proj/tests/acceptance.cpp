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
// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria mix exact golden values, property sweeps, and
// desk-scale end-to-end training runs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vgc/collective.hpp"
#include "vgc/cost_model.hpp"
#include "vgc/dataset.hpp"
#include "vgc/gate.hpp"
#include "vgc/models.hpp"
#include "vgc/quantize.hpp"
#include "vgc/rng.hpp"
#include "vgc/trainer.hpp"
#include "vgc/wire.hpp"

using namespace vgc;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, const std::function<bool()>& body) {
  bool ok = false;
  std::string note;
  const auto start = std::chrono::steady_clock::now();
  try {
    ok = body();
  } catch (const std::exception& e) {
    note = std::string(" (exception: ") + e.what() + ")";
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] criterion %2d: %s (%.2fs)%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
              seconds, note.c_str());
  if (!ok) ++failures;
}

template <typename Scalar>
Scalar oracle_floor_pow2(Scalar x) {
  int e;
  std::frexp(x, &e);
  return std::ldexp(Scalar(1), e - 1);
}

template <typename Scalar>
Scalar oracle_round_pow2(Scalar x) {
  int e;
  const Scalar f = std::frexp(x, &e);  // x = f * 2^e, f in [0.5, 1)
  // x >= 1.5 * 2^(e-1) iff f >= 0.75; ties go up. The upper power may
  // overflow to infinity, same as the arithmetic definition.
  return f >= Scalar(0.75) ? std::ldexp(Scalar(1), e) : std::ldexp(Scalar(1), e - 1);
}

bool bitwise_equal(const Vector<float>& a, const Vector<float>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(float) * static_cast<std::size_t>(a.size())) == 0;
}

// The shared desk-scale experiment: logistic regression on two Gaussian
// blobs, 5000 training samples, 4 workers, batch 16, 30 epochs, momentum.
RunConfig desk_run(Codec codec) {
  RunConfig run;
  run.workers = 4;
  run.batch_size = 16;
  run.epochs = 30;
  run.seed = 20;
  run.codec = codec;
  run.gate = GateConfig{1.5, 0.999, std::nullopt};
  run.optimizer.kind = OptimizerConfig::Kind::momentum;
  run.optimizer.step_size = 0.25;
  run.optimizer.momentum = 0.9;
  run.model.kind = ModelConfig::Kind::logreg;
  run.dataset = DatasetConfig{5000, 1000, 64, 4.0, 1.0};
  run.transport = TransportKind::inproc;
  return run;
}

}  // namespace

int main() {
  // Results shared between the desk-scale criteria.
  TrainResult baseline;
  TrainResult basic;
  double desk_seconds = 0;

  criterion(1, "worked-example quantization is bit-exact", [] {
    const auto start = std::chrono::steady_clock::now();
    const ParameterGroup group{0, 8, 0, "example"};
    const SparseGradient<float> values = {
        {0, 0.04f}, {1, 0.31f}, {2, -6.25f}, {3, 22.25f}, {4, -35.75f}};
    const auto res = quantize_group<float>(values, group);

    bool ok = res.header.has_value() && res.header->exponent == 5;
    ok = ok && res.entries.size() == 4 && res.dropped.size() == 1;
    ok = ok && res.dropped[0].index == 0 && res.dropped[0].value == 0.04f;
    // the dropped element's offset would have been 10
    ok = ok && res.header->exponent - std::ilogb(fast_round_pow2(0.04f)) == 10;
    const QuantizedEntry expect[4] = {
        {false, 7, 1}, {true, 2, 2}, {false, 1, 3}, {true, 0, 4}};
    for (int i = 0; i < 4; ++i) ok = ok && res.entries[i] == expect[i];

    // serialized words carry exactly these sign/d fields
    StepMessage msg{0, 0, PayloadMode::quantized,
                    {GroupBlock{0, res.header->exponent, res.entries}}};
    const auto bytes = serialize(msg);
    const std::uint32_t words[4] = {0x70000001u, 0xA0000002u, 0x10000003u, 0x80000004u};
    for (int e = 0; e < 4; ++e) {
      std::uint32_t w = 0;
      std::memcpy(&w, bytes.data() + 33 + 4 * e, 4);
      ok = ok && w == words[e];
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return ok && seconds < 1.0;
  });

  criterion(2, "variance criterion agrees with the sums criterion on 10k instances", [] {
    Rng rng(1002);
    int checked = 0;
    int agreements = 0;
    while (checked < 10000) {
      const Index b = 2 + static_cast<Index>(rng.below(63));
      Vector<double> grads(b);
      const double shift = rng.normal();
      for (Index z = 0; z < b; ++z) grads[z] = 2.0 * rng.normal() + shift;
      const double alpha = 1.0 + (static_cast<double>(b) - 1.0) * 0.97 * rng.uniform();

      SampleMatrix<double> m(1, b);
      m.row(0) = grads.transpose();
      const auto sums = per_sample_sums<double>(m, b);
      const double lhs = sums.sum_mean[0] * sums.sum_mean[0];
      const double rhs = alpha * sums.sum_sq_mean[0];
      if (std::abs(lhs - rhs) <= 1e-9 * std::max(std::abs(lhs), std::abs(rhs))) continue;

      ++checked;
      if (criterion_via_variance(grads, alpha) ==
          should_send(sums.sum_mean[0], sums.sum_sq_mean[0], alpha)) {
        ++agreements;
      }
    }
    return agreements == checked;
  });

  criterion(3, "bit-manipulation rounding matches arithmetic on 1e6 normals + boundaries", [] {
    Rng rng(1003);
    long mismatches = 0;

    for (int i = 0; i < 1000000; ++i) {
      const float xf =
          std::ldexp(static_cast<float>(0.5 + 0.5 * rng.uniform()),
                     static_cast<int>(rng.below(253)) - 126 + 1);
      if (std::isnormal(xf) && xf > 0.0f) {
        if (fast_floor_pow2(xf) != oracle_floor_pow2(xf)) ++mismatches;
        if (fast_round_pow2(xf) != oracle_round_pow2(xf)) ++mismatches;
      }
      const double xd = std::ldexp(0.5 + 0.5 * rng.uniform(),
                                   static_cast<int>(rng.below(2045)) - 1022 + 1);
      if (std::isnormal(xd) && xd > 0.0) {
        if (fast_floor_pow2(xd) != oracle_floor_pow2(xd)) ++mismatches;
        if (fast_round_pow2(xd) != oracle_round_pow2(xd)) ++mismatches;
      }
    }

    for (int k = -126; k <= 127; ++k) {
      std::vector<float> probes = {std::ldexp(1.0f, k)};
      if (k < 127) probes.push_back(std::ldexp(1.5f, k));
      for (const float base : std::vector<float>(probes)) {
        probes.push_back(std::nextafter(base, std::numeric_limits<float>::infinity()));
        probes.push_back(std::nextafter(base, 0.0f));
      }
      for (float x : probes) {
        if (!(x > 0.0f) || !std::isnormal(x)) continue;
        if (fast_floor_pow2(x) != oracle_floor_pow2(x)) ++mismatches;
        if (fast_round_pow2(x) != oracle_round_pow2(x)) ++mismatches;
      }
    }
    for (int k = -1022; k <= 1023; ++k) {
      std::vector<double> probes = {std::ldexp(1.0, k)};
      if (k < 1023) probes.push_back(std::ldexp(1.5, k));
      for (const double base : std::vector<double>(probes)) {
        probes.push_back(std::nextafter(base, std::numeric_limits<double>::infinity()));
        probes.push_back(std::nextafter(base, 0.0));
      }
      for (double x : probes) {
        if (!(x > 0.0) || !std::isnormal(x)) continue;
        if (fast_floor_pow2(x) != oracle_floor_pow2(x)) ++mismatches;
        if (fast_round_pow2(x) != oracle_round_pow2(x)) ++mismatches;
      }
    }
    return mismatches == 0;
  });

  criterion(4, "quantizer error bound holds over 1e5 random elements", [] {
    Rng rng(1004);
    const ParameterGroup group{0, kMaxGroupSize, 0, "sweep"};
    long violations = 0;
    long elements = 0;
    while (elements < 100000) {
      SparseGradient<float> values;
      const int count = 1 + static_cast<int>(rng.below(64));
      for (int i = 0; i < count; ++i) {
        const float v =
            static_cast<float>(rng.normal() * std::pow(10.0, 3.0 * rng.normal()));
        if (v != 0.0f && std::isfinite(v)) values.push_back({static_cast<Index>(i), v});
      }
      if (values.empty()) continue;
      const auto res = quantize_group<float>(values, group);
      if (!res.header) continue;
      const float cap = std::ldexp(1.0f, res.header->exponent);
      const auto decoded = dequantize<float>(*res.header, res.entries);
      for (std::size_t k = 0; k < decoded.size(); ++k) {
        float original = 0.0f;
        for (const auto& v : values) {
          if (v.index == decoded[k].index) original = v.value;
        }
        ++elements;
        const double mag = std::abs(static_cast<double>(decoded[k].value));
        const double in = std::abs(static_cast<double>(original));
        if (in > static_cast<double>(cap)) {
          if (mag != static_cast<double>(cap)) ++violations;  // truncation must be exact
        } else if (std::abs(mag - in) / in > 1.0 / 3.0 + 1e-9) {
          ++violations;
        }
      }
    }
    return violations == 0;
  });

  criterion(5, "cost-model identity and break-even point across p and c", [] {
    for (double p = 2; p <= 1024; p = p < 8 ? p + 1 : p * 2) {
      for (double c = 1; c <= 1e5; c *= 3.16227766) {
        const CostModelInputs in{p, 25.6e6, 32, 5e-10, 0, c};
        const double ratio = ring_allreduce_time(in) / allgatherv_time_bound(in);
        const double bound = speedup_lower_bound(p, c);
        if (std::abs(ratio - bound) > 1e-12 * bound) return false;
      }
      const double c_star = p * p / (2.0 * (p - 1.0));
      if (std::abs(speedup_lower_bound(p, c_star) - 1.0) > 1e-12) return false;
      if (!(speedup_lower_bound(p, c_star * 1.001) > 1.0)) return false;
      if (!(speedup_lower_bound(p, c_star * 0.999) < 1.0)) return false;
    }
    return true;
  });

  criterion(6, "desk-scale gated run keeps accuracy within 2 points at ratio >= 20", [&] {
    const auto start = std::chrono::steady_clock::now();
    baseline = train(desk_run(Codec::none));

    RunConfig gated = desk_run(Codec::basic);
    gated.record_abs_residuals = true;
    basic = train(gated);
    desk_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::printf("       baseline acc %.4f | basic acc %.4f | ratio %.1f | %.1fs\n",
                baseline.final_accuracy, basic.final_accuracy, basic.compression_ratio,
                desk_seconds);
    return std::abs(baseline.final_accuracy - basic.final_accuracy) <= 0.02 &&
           basic.compression_ratio >= 20.0 && desk_seconds < 300.0;
  });

  criterion(7, "hybrid at the median residual compresses at least as well as basic", [&] {
    const double tau = std::max(basic.median_abs_residual, 1e-12);
    RunConfig hybrid = desk_run(Codec::hybrid);
    hybrid.gate.tau = tau;
    const TrainResult hybrid_result = train(hybrid);
    std::printf("       tau %.3g | hybrid ratio %.1f | basic ratio %.1f\n", tau,
                hybrid_result.compression_ratio, basic.compression_ratio);
    return hybrid_result.compression_ratio >= basic.compression_ratio;
  });

  criterion(8, "replicas are bit-identical every step and across transports", [&] {
    if (!basic.replicas_consistent || !baseline.replicas_consistent) return false;
    RunConfig over_tcp = desk_run(Codec::basic);
    over_tcp.record_abs_residuals = true;
    over_tcp.transport = TransportKind::tcp;
    const TrainResult tcp_result = train(over_tcp);
    return tcp_result.replicas_consistent &&
           bitwise_equal(tcp_result.final_params, basic.final_params) &&
           metrics_csv_string(tcp_result.rows) == metrics_csv_string(basic.rows);
  });

  criterion(9, "delayed mass is conserved to 1e-5 with quantization bypassed", [] {
    RunConfig run = desk_run(Codec::basic);
    run.quantize = false;
    run.track_conservation = true;
    const TrainResult result = train(run);
    std::printf("       max relative conservation error %.3g\n",
                result.conservation_max_rel_err);
    return result.conservation_max_rel_err <= 1e-5;
  });

  criterion(10, "single-worker dense run equals the reference loop bit for bit", [] {
    RunConfig run;
    run.workers = 1;
    run.batch_size = 16;
    run.epochs = 5;  // 20 steps/epoch from 320 samples: 100 steps
    run.seed = 3;
    run.codec = Codec::none;
    run.optimizer.kind = OptimizerConfig::Kind::sgd;
    run.optimizer.step_size = 0.25;
    run.dataset = DatasetConfig{320, 64, 6, 3.0, 1.0};
    run.transport = TransportKind::seq;
    const TrainResult result = train(run);

    const auto full = make_blobs<float>(
        BlobsConfig{run.dataset.samples + run.dataset.test_samples, run.dataset.features,
                    run.dataset.separation, run.dataset.noise},
        derive_seed(run.seed, 0xD5));
    const SampleMatrix<float> features = full.features.leftCols(run.dataset.samples);
    const Vector<float> labels = full.labels.head(run.dataset.samples);

    LogisticRegression<float> model(run.dataset.features);
    Vector<float> params = model.init_params(run.seed);
    Index steps = 0;
    for (Index epoch = 0; epoch < run.epochs; ++epoch) {
      const auto shard = shard_epoch(static_cast<std::size_t>(run.dataset.samples), 1, run.seed,
                                     static_cast<std::uint64_t>(epoch))[0];
      for (std::size_t begin = 0; begin < shard.size(); begin += run.batch_size) {
        const auto b =
            static_cast<Index>(std::min<std::size_t>(run.batch_size, shard.size() - begin));
        SampleMatrix<float> x(run.dataset.features, b);
        Vector<float> y(b);
        for (Index k = 0; k < b; ++k) {
          const auto src = static_cast<Index>(shard[begin + static_cast<std::size_t>(k)]);
          x.col(k) = features.col(src);
          y[k] = labels[src];
        }
        const auto sums = per_sample_sums(model.per_sample_gradients(params, x, y), b);
        params -= static_cast<float>(run.optimizer.step_size) * (sums.sum_mean / 1.0f);
        ++steps;
      }
    }
    return steps == 100 && bitwise_equal(result.final_params, params);
  });

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
