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
// Bit-exact wire format for one worker's per-step payload. All integers are
// little-endian.
//
//   StepMessage:
//     u32  magic      0x56474331
//     u32  worker_id
//     u64  step
//     u8   mode       0 = quantized-value entries, 1 = sign-only entries
//     u32  group_count
//     group_count x GroupBlock
//
//   GroupBlock:
//     u32  group_id
//     i32  exponent   e_k (ignored in mode 1)
//     u32  entry_count
//     entry_count x u32 entry words:
//       [bit 31: sign] [bits 30-28: d] [bits 27-0: index within group]
//
// Entries are sorted ascending by index with no duplicates.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vgc/error.hpp"
#include "vgc/quantize.hpp"

namespace vgc {

inline constexpr std::uint32_t kWireMagic = 0x56474331u;

enum class PayloadMode : std::uint8_t {
  quantized = 0,  // decoded magnitude 2^(e_k - d)
  sign_only = 1,  // decoded magnitude tau, carried in run configuration
};

struct GroupBlock {
  std::uint32_t group_id = 0;
  std::int32_t exponent = 0;
  std::vector<QuantizedEntry> entries;

  friend bool operator==(const GroupBlock&, const GroupBlock&) = default;
};

struct StepMessage {
  std::uint32_t worker_id = 0;
  std::uint64_t step = 0;
  PayloadMode mode = PayloadMode::quantized;
  std::vector<GroupBlock> blocks;

  friend bool operator==(const StepMessage&, const StepMessage&) = default;
};

// Serialized size in bytes (fixed header plus per-block costs).
std::size_t wire_size(const StepMessage& msg);

// Deterministic little-endian encoding. Throws wire_error when an invariant
// is violated (index out of range, unsorted or duplicate entries, d > 7).
std::vector<std::uint8_t> serialize(const StepMessage& msg);

// Exact inverse of serialize; validates everything it reads.
StepMessage parse(std::span<const std::uint8_t> bytes);

// Entry word packing, exposed for tests and the merge path.
std::uint32_t pack_entry(const QuantizedEntry& e);
QuantizedEntry unpack_entry(std::uint32_t word);

}  // namespace vgc
