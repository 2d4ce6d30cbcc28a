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

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace vgc {

using Index = Eigen::Index;

// Elementwise semantics everywhere in this library, hence Array not Matrix.
template <typename Scalar>
using Vector = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

// One column per sample, one row per parameter.
template <typename Scalar>
using SampleMatrix = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct SparseEntry {
  Index index;
  Scalar value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Sparse (index, value) list, ascending by index.
template <typename Scalar>
using SparseGradient = std::vector<SparseEntry<Scalar>>;

// Sparse sign list used by threshold codecs: +1 / -1 per index.
struct SignEntry {
  Index index;
  std::int8_t sign;

  friend bool operator==(const SignEntry&, const SignEntry&) = default;
};

using SignList = std::vector<SignEntry>;

}  // namespace vgc
