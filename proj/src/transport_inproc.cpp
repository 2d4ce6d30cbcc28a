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

#include "vgc/error.hpp"
#include "vgc/transport.hpp"

namespace vgc {

InprocGroup::InprocGroup(std::uint32_t world_size) : world_(world_size) {
  if (world_size == 0) throw config_error("world size must be >= 1");
  slots_.resize(world_size);
}

InprocTransport::InprocTransport(std::shared_ptr<InprocGroup> group, std::uint32_t rank)
    : group_(std::move(group)), rank_(rank) {
  if (rank_ >= group_->world_size()) throw config_error("rank out of range");
}

std::vector<Payload> InprocTransport::allgatherv(std::span<const std::uint8_t> payload) {
  InprocGroup& g = *group_;
  std::unique_lock<std::mutex> lock(g.mutex_);

  g.slots_[rank_].assign(payload.begin(), payload.end());
  const std::uint64_t my_generation = g.generation_;
  if (++g.arrived_ == g.world_) {
    // Last arrival publishes the round and releases everyone.
    g.published_ = g.slots_;
    g.arrived_ = 0;
    ++g.generation_;
    g.cv_.notify_all();
  } else {
    g.cv_.wait(lock, [&] { return g.generation_ != my_generation; });
  }
  return g.published_;
}

}  // namespace vgc
