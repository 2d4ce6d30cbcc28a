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
#include <stdexcept>
#include <string>

namespace vgc {

// Invalid configuration: mismatched dimensions, out-of-range hyperparameters,
// missing or contradictory options.
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed numeric input (NaN / infinity where finite values are required).
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wire-format violation: bad magic, truncated buffer, unsortable entries,
// unsupported version.
struct wire_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Collective communication failure. Carries the rank that caused it.
struct comm_error : std::runtime_error {
  comm_error(std::uint32_t worker, const std::string& what)
      : std::runtime_error("worker " + std::to_string(worker) + ": " + what),
        worker_id(worker) {}
  std::uint32_t worker_id;
};

// Training diverged or could not proceed.
struct training_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vgc
