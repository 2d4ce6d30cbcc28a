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

#pragma once

#include <optional>

#include "vgc/error.hpp"
#include "vgc/types.hpp"

namespace vgc {

// Per-batch sufficient statistics: the sum of per-sample mean contributions
// and the sum of their squares. Nothing else about the batch is retained;
// in particular the sample variance is never materialized.
template <typename Scalar>
struct BatchGradientSums {
  Vector<Scalar> sum_mean;     // sum_z grad_z[i] / B
  Vector<Scalar> sum_sq_mean;  // sum_z (grad_z[i] / B)^2
  Index batch_size = 0;
};

// Per-parameter accumulator state carried across steps: the delayed update r
// and the accumulated squared sums v.
template <typename Scalar>
struct GradientStats {
  Vector<Scalar> r;
  Vector<Scalar> v;

  static GradientStats zeros(Index n) {
    return GradientStats{Vector<Scalar>::Zero(n), Vector<Scalar>::Zero(n)};
  }

  Index size() const { return r.size(); }
};

// Send-gate hyperparameters. tau engages the threshold (hybrid) path.
struct GateConfig {
  double alpha = 1.0;
  double zeta = 0.999;
  std::optional<double> tau;

  void validate() const {
    if (!(alpha > 0.0)) throw config_error("gate alpha must be > 0");
    if (!(zeta > 0.0) || zeta > 1.0) throw config_error("gate zeta must be in (0, 1]");
    if (tau && !(*tau > 0.0)) throw config_error("gate tau must be > 0");
  }
};

// Fold one batch into the running accumulators.
template <typename Scalar>
void accumulate(GradientStats<Scalar>& stats, const BatchGradientSums<Scalar>& sums) {
  if (stats.r.size() != sums.sum_mean.size() || stats.v.size() != sums.sum_sq_mean.size()) {
    throw config_error("accumulate: dimension mismatch");
  }
  stats.r += sums.sum_mean;
  stats.v += sums.sum_sq_mean;
}

// Reduce per-sample gradients (one column per sample) to the two sums.
template <typename Scalar>
BatchGradientSums<Scalar> per_sample_sums(const SampleMatrix<Scalar>& per_sample_grads,
                                          Index batch_size) {
  if (batch_size < 1 || per_sample_grads.cols() == 0) {
    throw config_error("per_sample_sums: empty batch");
  }
  if (per_sample_grads.cols() != batch_size) {
    throw config_error("per_sample_sums: batch_size does not match sample count");
  }
  BatchGradientSums<Scalar> out;
  out.batch_size = batch_size;
  SampleMatrix<Scalar> scaled = per_sample_grads / static_cast<Scalar>(batch_size);
  out.sum_mean = scaled.rowwise().sum();
  out.sum_sq_mean = scaled.square().rowwise().sum();
  return out;
}

}  // namespace vgc
