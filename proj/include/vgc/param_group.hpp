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
#include <string>
#include <vector>

#include "vgc/error.hpp"
#include "vgc/types.hpp"

namespace vgc {

// Largest per-group size representable by the 28-bit index field on the wire.
inline constexpr Index kMaxGroupSize = Index{1} << 28;

// One weight matrix / bias vector of the model. Groups tile the flat
// parameter vector: contiguous, non-overlapping, starting at zero.
struct ParameterGroup {
  std::uint32_t group_id = 0;
  Index size = 0;
  Index offset = 0;
  std::string label;
};

class GroupLayout {
 public:
  GroupLayout() = default;

  explicit GroupLayout(std::vector<ParameterGroup> groups)
      : groups_(std::move(groups)) {
    Index expected_offset = 0;
    for (std::size_t k = 0; k < groups_.size(); ++k) {
      const ParameterGroup& g = groups_[k];
      if (g.size < 1 || g.size > kMaxGroupSize) {
        throw config_error("group '" + g.label + "' size out of range");
      }
      if (g.offset != expected_offset) {
        throw config_error("group '" + g.label + "' breaks contiguous tiling");
      }
      if (g.group_id != k) {
        throw config_error("group ids must be dense and ordered");
      }
      expected_offset += g.size;
    }
    total_ = expected_offset;
  }

  const std::vector<ParameterGroup>& groups() const { return groups_; }
  Index total_params() const { return total_; }

  const ParameterGroup& group(std::uint32_t id) const {
    if (id >= groups_.size()) throw config_error("unknown group id");
    return groups_[id];
  }

  // Group owning a global parameter index.
  const ParameterGroup& group_of(Index global_index) const {
    for (const ParameterGroup& g : groups_) {
      if (global_index >= g.offset && global_index < g.offset + g.size) return g;
    }
    throw config_error("global index outside layout");
  }

 private:
  std::vector<ParameterGroup> groups_;
  Index total_ = 0;
};

// Convenience builder: sizes in order, ids and offsets assigned densely.
inline GroupLayout make_layout(const std::vector<std::pair<std::string, Index>>& sized_labels) {
  std::vector<ParameterGroup> gs;
  Index offset = 0;
  for (std::size_t k = 0; k < sized_labels.size(); ++k) {
    gs.push_back(ParameterGroup{static_cast<std::uint32_t>(k), sized_labels[k].second,
                                offset, sized_labels[k].first});
    offset += sized_labels[k].second;
  }
  return GroupLayout(std::move(gs));
}

}  // namespace vgc
