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
// StepMessage exchange over a byte transport, plus the deterministic merge of
// everyone's sparse contributions into the global mean update.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vgc/param_group.hpp"
#include "vgc/transport.hpp"
#include "vgc/types.hpp"
#include "vgc/wire.hpp"

namespace vgc {

struct GatherResult {
  std::vector<StepMessage> messages;  // ordered by worker_id
  std::size_t bytes_on_wire = 0;      // sum of all workers' payload sizes
};

// Parse one round's rank-ordered payloads. A payload whose message carries
// a different step (or a worker_id that does not match its rank) raises
// comm_error naming that worker.
std::vector<StepMessage> parse_gather(const std::vector<Payload>& payloads,
                                      std::uint64_t expected_step);

// Serialize, exchange, parse, and validate one round. Every worker receives
// the identical worker_id-ordered list, its own message included.
GatherResult exchange(Transport& transport, const StepMessage& local);

// Decode every message and reduce to the global mean: contributions on the
// same global index are summed, and every sum is divided by the worker
// count. Mode 0 decodes 2^(e_k - d); mode 1 decodes +-tau. The result is
// sorted by global index and independent of message arrival order.
template <typename Scalar>
SparseGradient<Scalar> merge_decode(std::vector<StepMessage> messages,
                                    const GroupLayout& layout, std::uint32_t world_size,
                                    std::optional<double> tau = std::nullopt);

}  // namespace vgc
