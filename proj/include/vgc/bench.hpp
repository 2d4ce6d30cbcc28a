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
// Offline codec replay over a recorded gradient-sums trace. The whole
// parameter vector is treated as a single group; sent counts, compression
// ratio, and reconstruction error statistics are reported per codec.

#pragma once

#include <cmath>
#include <limits>

#include "vgc/codecs.hpp"
#include "vgc/gate.hpp"
#include "vgc/param_group.hpp"
#include "vgc/quantize.hpp"
#include "vgc/trace.hpp"
#include "vgc/trainer.hpp"

namespace vgc {

struct BenchResult {
  Index params = 0;
  Index steps = 0;
  std::uint64_t sent_total = 0;
  double sent_mean_per_step = 0;
  double compression_ratio = 0;  // +inf when nothing was sent

  // Per sent value: decoded-vs-buffered difference. Relative for the
  // quantized basic codec, absolute (|sign*tau - r|) for sign codecs.
  std::uint64_t reconstruction_count = 0;
  double reconstruction_mean_err = 0;
  double reconstruction_max_err = 0;
};

inline BenchResult run_codec_bench(const Trace& trace, Codec codec, const GateConfig& gate,
                                   bool quantize = true) {
  if (trace.steps.empty()) throw config_error("codec bench: empty trace");
  if ((codec == Codec::strom || codec == Codec::hybrid) && !gate.tau) {
    throw config_error("codec bench: this codec requires tau");
  }
  const Index n = trace.param_count;
  const ParameterGroup group{0, n, 0, "trace"};

  BenchResult out;
  out.params = n;
  out.steps = static_cast<Index>(trace.steps.size());

  GradientStats<float> stats = GradientStats<float>::zeros(n);
  Vector<float> strom_residual = Vector<float>::Zero(n);
  double err_sum = 0.0;

  for (const BatchGradientSums<float>& sums : trace.steps) {
    switch (codec) {
      case Codec::none:
        out.sent_total += static_cast<std::uint64_t>(n);
        break;
      case Codec::basic: {
        SparseGradient<float> send_set = gate_step(stats, sums, gate);
        if (!quantize) {
          out.sent_total += send_set.size();
          break;
        }
        GroupQuantResult<float> res = quantize_group<float>(send_set, group);
        for (const auto& dropped : res.dropped) stats.r[dropped.index] += dropped.value;
        out.sent_total += res.entries.size();
        if (res.header) {
          // send_set and the entry list are both ascending by index.
          std::size_t pos = 0;
          for (const QuantizedEntry& e : res.entries) {
            while (send_set[pos].index != static_cast<Index>(e.index)) ++pos;
            const double truth = std::abs(static_cast<double>(send_set[pos].value));
            const double decoded = std::ldexp(1.0, res.header->exponent - e.d);
            const double rel = std::abs(decoded - truth) / truth;
            err_sum += rel;
            out.reconstruction_max_err = std::max(out.reconstruction_max_err, rel);
            ++out.reconstruction_count;
          }
        }
        break;
      }
      case Codec::strom:
      case Codec::hybrid: {
        Vector<float> before = codec == Codec::strom ? strom_residual + sums.sum_mean
                                                     : stats.r + sums.sum_mean;
        const SignList signs = codec == Codec::strom
                                   ? strom_step(strom_residual, sums, *gate.tau)
                                   : hybrid_step(stats, sums, gate);
        out.sent_total += signs.size();
        for (const SignEntry& s : signs) {
          const double decoded = static_cast<double>(s.sign) * *gate.tau;
          const double err = std::abs(decoded - static_cast<double>(before[s.index]));
          err_sum += err;
          out.reconstruction_max_err = std::max(out.reconstruction_max_err, err);
          ++out.reconstruction_count;
        }
        break;
      }
    }
  }

  out.sent_mean_per_step =
      static_cast<double>(out.sent_total) / static_cast<double>(out.steps);
  out.compression_ratio = out.sent_mean_per_step == 0.0
                              ? std::numeric_limits<double>::infinity()
                              : static_cast<double>(n) / out.sent_mean_per_step;
  if (out.reconstruction_count > 0) {
    out.reconstruction_mean_err = err_sum / static_cast<double>(out.reconstruction_count);
  }
  return out;
}

}  // namespace vgc
