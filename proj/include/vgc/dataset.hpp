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

#include <cstdint>
#include <vector>

#include "vgc/error.hpp"
#include "vgc/rng.hpp"
#include "vgc/types.hpp"

namespace vgc {

// Binary classification set: one column per sample.
template <typename Scalar>
struct Dataset {
  SampleMatrix<Scalar> features;  // d x n
  Vector<Scalar> labels;          // 0 or 1

  Index size() const { return features.cols(); }
  Index feature_dim() const { return features.rows(); }
};

struct BlobsConfig {
  Index samples = 1000;
  Index features = 20;
  double separation = 3.0;  // distance between the class means
  double noise = 1.0;       // per-coordinate standard deviation
};

// Two Gaussian blobs with means +-separation/2 along a random unit
// direction. Classes alternate sample by sample, so any contiguous slice is
// balanced.
template <typename Scalar>
Dataset<Scalar> make_blobs(const BlobsConfig& cfg, std::uint64_t seed) {
  if (cfg.samples < 2 || cfg.features < 1) throw config_error("blobs: degenerate shape");
  Rng rng(seed);

  Vector<double> direction(cfg.features);
  for (Index j = 0; j < cfg.features; ++j) direction[j] = rng.normal();
  direction /= std::sqrt(direction.square().sum());

  Dataset<Scalar> out;
  out.features.resize(cfg.features, cfg.samples);
  out.labels.resize(cfg.samples);
  const double half = cfg.separation / 2.0;
  for (Index i = 0; i < cfg.samples; ++i) {
    const int label = static_cast<int>(i % 2);
    const double center_sign = label == 1 ? 1.0 : -1.0;
    for (Index j = 0; j < cfg.features; ++j) {
      const double x = center_sign * half * direction[j] + cfg.noise * rng.normal();
      out.features(j, i) = static_cast<Scalar>(x);
    }
    out.labels[i] = static_cast<Scalar>(label);
  }
  return out;
}

// Epoch sharding: one seeded permutation of the training set per epoch,
// split into p equal contiguous shards (any remainder is dropped so every
// worker runs the same number of steps).
inline std::vector<std::vector<std::size_t>> shard_epoch(std::size_t n_samples,
                                                         std::uint32_t workers,
                                                         std::uint64_t seed,
                                                         std::uint64_t epoch) {
  if (workers == 0 || n_samples < workers) throw config_error("shard_epoch: too few samples");
  // own stream per epoch, disjoint from the low-valued dataset/init streams
  Rng rng(derive_seed(seed, (std::uint64_t{1} << 32) + epoch));
  const std::vector<std::size_t> perm = rng.permutation(n_samples);

  const std::size_t shard_size = n_samples / workers;
  std::vector<std::vector<std::size_t>> shards(workers);
  for (std::uint32_t w = 0; w < workers; ++w) {
    shards[w].assign(perm.begin() + static_cast<std::ptrdiff_t>(w * shard_size),
                     perm.begin() + static_cast<std::ptrdiff_t>((w + 1) * shard_size));
  }
  return shards;
}

}  // namespace vgc
