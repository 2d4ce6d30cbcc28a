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
// The send/delay decision. A parameter is transmitted only once its
// accumulated mean squared exceeds alpha times its accumulated squared sums
// (an unambiguous, low-variance direction); everything else stays local as a
// delayed update.

#pragma once

#include <cstdint>

#include "vgc/stats.hpp"
#include "vgc/types.hpp"

namespace vgc {

// r^2 > alpha * v, strict. Ties delay. v = 0 with r != 0 always sends.
template <typename Scalar>
bool should_send(Scalar r_i, Scalar v_i, double alpha) {
  const double r = static_cast<double>(r_i);
  return r * r > alpha * static_cast<double>(v_i);
}

// One step of the basic algorithm: accumulate the batch, move every gated
// parameter's accumulated value into the send set (resetting its state),
// decay v everywhere else. Sent values are the accumulated sums across the
// delayed steps, not per-step means.
template <typename Scalar>
SparseGradient<Scalar> gate_step(GradientStats<Scalar>& stats,
                                 const BatchGradientSums<Scalar>& sums,
                                 const GateConfig& cfg) {
  cfg.validate();
  if (cfg.tau) throw config_error("gate_step: tau is a hybrid-codec parameter");
  accumulate(stats, sums);

  SparseGradient<Scalar> sent;
  const Scalar zeta = static_cast<Scalar>(cfg.zeta);
  for (Index i = 0; i < stats.size(); ++i) {
    if (should_send(stats.r[i], stats.v[i], cfg.alpha)) {
      sent.push_back({i, stats.r[i]});
      stats.r[i] = Scalar(0);
      stats.v[i] = Scalar(0);
    } else {
      stats.v[i] *= zeta;
    }
  }
  return sent;
}

// The alpha' for which the explicit-variance send criterion matches the
// sums-based one on a batch of the given size.
inline double equivalent_alpha_prime(double alpha, Index batch_size) {
  if (batch_size < 2) throw std::domain_error("equivalent_alpha_prime: batch_size must be >= 2");
  if (alpha >= static_cast<double>(batch_size)) {
    throw std::domain_error("equivalent_alpha_prime: alpha must be < batch_size");
  }
  const double b = static_cast<double>(batch_size);
  return alpha * (b - 1.0) / (b - alpha);
}

// Test-oracle form of the send decision: materialize the sample variance and
// compare (alpha'/B) * V_B against the squared batch mean. Must agree with
// should_send applied to the corresponding sums.
template <typename Scalar>
bool criterion_via_variance(const Vector<Scalar>& sample_grads, double alpha) {
  const Index b = sample_grads.size();
  if (b < 2) throw std::domain_error("criterion_via_variance: need at least 2 samples");
  const double alpha_prime = equivalent_alpha_prime(alpha, b);

  const double mean = static_cast<double>(sample_grads.template cast<double>().mean());
  double var = 0.0;
  for (Index z = 0; z < b; ++z) {
    const double d = static_cast<double>(sample_grads[z]) - mean;
    var += d * d;
  }
  var /= static_cast<double>(b - 1);

  return (alpha_prime / static_cast<double>(b)) * var < mean * mean;
}

}  // namespace vgc
