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
// Threshold (sign-only) codecs. strom_step sends sign(r) whenever |r| exceeds
// the threshold and keeps the remainder in the residual; hybrid_step adds the
// variance gate in front and corrects the accumulated squared sums after each
// send so they keep describing what is still buffered.

#pragma once

#include <cmath>

#include "vgc/gate.hpp"
#include "vgc/stats.hpp"
#include "vgc/types.hpp"

namespace vgc {

// Threshold codec: accumulate the batch mean, then emit one sign per
// parameter whose residual magnitude exceeds tau. The decoded value is
// +-tau; the residual keeps the rest for later steps.
template <typename Scalar>
SignList strom_step(Vector<Scalar>& residual, const BatchGradientSums<Scalar>& sums,
                    double tau) {
  if (!(tau > 0.0)) throw config_error("strom_step: tau must be > 0");
  if (residual.size() != sums.sum_mean.size()) {
    throw config_error("strom_step: dimension mismatch");
  }
  residual += sums.sum_mean;

  SignList sent;
  const Scalar t = static_cast<Scalar>(tau);
  for (Index i = 0; i < residual.size(); ++i) {
    if (std::abs(residual[i]) > t) {
      const std::int8_t s = residual[i] > Scalar(0) ? 1 : -1;
      sent.push_back({i, s});
      residual[i] -= static_cast<Scalar>(s) * t;
    }
  }
  return sent;
}

// Threshold codec filtered by the variance gate. After a send the residual
// is drained by tau and v is corrected with the post-drain residual,
// v <- max(v - 2|r|tau + tau^2, 0); v then decays by zeta for every
// parameter, sent or not.
template <typename Scalar>
SignList hybrid_step(GradientStats<Scalar>& stats, const BatchGradientSums<Scalar>& sums,
                     const GateConfig& cfg) {
  cfg.validate();
  if (!cfg.tau) throw config_error("hybrid_step: tau is required");
  accumulate(stats, sums);

  SignList sent;
  const Scalar t = static_cast<Scalar>(*cfg.tau);
  const Scalar zeta = static_cast<Scalar>(cfg.zeta);
  for (Index i = 0; i < stats.size(); ++i) {
    if (std::abs(stats.r[i]) > t && should_send(stats.r[i], stats.v[i], cfg.alpha)) {
      const std::int8_t s = stats.r[i] > Scalar(0) ? 1 : -1;
      sent.push_back({i, s});
      stats.r[i] -= static_cast<Scalar>(s) * t;
      stats.v[i] = std::max(stats.v[i] - Scalar(2) * std::abs(stats.r[i]) * t + t * t,
                            Scalar(0));
    }
    stats.v[i] *= zeta;
  }
  return sent;
}

}  // namespace vgc
