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

#include "vgc/collective.hpp"

#include <algorithm>
#include <cmath>

#include "vgc/quantize.hpp"

namespace vgc {

std::vector<StepMessage> parse_gather(const std::vector<Payload>& payloads,
                                      std::uint64_t expected_step) {
  std::vector<StepMessage> messages;
  messages.reserve(payloads.size());
  for (std::uint32_t r = 0; r < payloads.size(); ++r) {
    StepMessage msg = parse(payloads[r]);
    if (msg.worker_id != r) {
      throw comm_error(r, "payload carries worker_id " + std::to_string(msg.worker_id));
    }
    if (msg.step != expected_step) {
      throw comm_error(r, "step mismatch: expected " + std::to_string(expected_step) +
                              ", got " + std::to_string(msg.step));
    }
    messages.push_back(std::move(msg));
  }
  return messages;
}

GatherResult exchange(Transport& transport, const StepMessage& local) {
  if (local.worker_id != transport.rank()) {
    throw comm_error(local.worker_id, "message worker_id does not match transport rank");
  }
  const std::vector<std::uint8_t> bytes = serialize(local);
  const std::vector<Payload> payloads = transport.allgatherv(bytes);

  GatherResult out;
  for (const Payload& p : payloads) out.bytes_on_wire += p.size();
  out.messages = parse_gather(payloads, local.step);
  for (const StepMessage& msg : out.messages) {
    if (msg.mode != local.mode) throw comm_error(msg.worker_id, "payload mode mismatch");
  }
  return out;
}

template <typename Scalar>
SparseGradient<Scalar> merge_decode(std::vector<StepMessage> messages,
                                    const GroupLayout& layout, std::uint32_t world_size,
                                    std::optional<double> tau) {
  if (messages.empty() || world_size == 0) {
    throw config_error("merge_decode: nothing to merge");
  }
  // Canonical processing order regardless of arrival order.
  std::sort(messages.begin(), messages.end(),
            [](const StepMessage& a, const StepMessage& b) { return a.worker_id < b.worker_id; });

  const PayloadMode mode = messages.front().mode;
  for (const StepMessage& m : messages) {
    if (m.mode != mode) throw comm_error(m.worker_id, "mixed payload modes");
    if (m.step != messages.front().step) throw comm_error(m.worker_id, "step mismatch");
  }
  if (mode == PayloadMode::sign_only && !tau) {
    throw config_error("merge_decode: sign-only payloads need tau");
  }

  // Decode all contributions; the overlap case (same index from several
  // workers) is rare, so gather then sort then sum runs.
  SparseGradient<Scalar> contributions;
  for (const StepMessage& m : messages) {
    for (const GroupBlock& b : m.blocks) {
      const ParameterGroup& g = layout.group(b.group_id);
      for (const QuantizedEntry& e : b.entries) {
        if (static_cast<Index>(e.index) >= g.size) {
          throw comm_error(m.worker_id, "entry index outside group");
        }
        Scalar value;
        if (mode == PayloadMode::quantized) {
          value = std::ldexp(Scalar(1), b.exponent - static_cast<int>(e.d));
        } else {
          value = static_cast<Scalar>(*tau);
        }
        if (e.negative) value = -value;
        contributions.push_back({g.offset + static_cast<Index>(e.index), value});
      }
    }
  }

  std::stable_sort(contributions.begin(), contributions.end(),
                   [](const SparseEntry<Scalar>& a, const SparseEntry<Scalar>& b) {
                     return a.index < b.index;
                   });

  SparseGradient<Scalar> merged;
  std::size_t i = 0;
  while (i < contributions.size()) {
    const Index idx = contributions[i].index;
    Scalar sum = Scalar(0);
    while (i < contributions.size() && contributions[i].index == idx) {
      sum += contributions[i].value;
      ++i;
    }
    merged.push_back({idx, sum / static_cast<Scalar>(world_size)});
  }
  return merged;
}

template SparseGradient<float> merge_decode<float>(std::vector<StepMessage>, const GroupLayout&,
                                                   std::uint32_t, std::optional<double>);
template SparseGradient<double> merge_decode<double>(std::vector<StepMessage>, const GroupLayout&,
                                                     std::uint32_t, std::optional<double>);

}  // namespace vgc
