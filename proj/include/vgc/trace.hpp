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
// Recorded gradient-statistics traces: the per-step batch sums of one
// worker, replayable through any codec offline. Little-endian binary:
//
//   u32 version (currently 1)
//   u64 param_count
//   u32 batch_size
//   records, each: u32 byte length, then param_count f32 sum_mean values
//                  followed by param_count f32 sum_sq_mean values

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vgc/stats.hpp"

namespace vgc {

inline constexpr std::uint32_t kTraceVersion = 1;

struct Trace {
  Index param_count = 0;
  Index batch_size = 0;
  std::vector<BatchGradientSums<float>> steps;
};

void write_trace(const std::string& path, const Trace& trace);

// Throws wire_error on version mismatch or malformed records.
Trace read_trace(const std::string& path);

}  // namespace vgc
