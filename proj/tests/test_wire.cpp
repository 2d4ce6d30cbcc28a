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

#include <doctest.h>

#include "vgc/rng.hpp"
#include "vgc/wire.hpp"

using namespace vgc;

namespace {

StepMessage random_message(Rng& rng) {
  StepMessage msg;
  msg.worker_id = static_cast<std::uint32_t>(rng.below(64));
  msg.step = rng.below(1u << 30);
  msg.mode = rng.uniform() < 0.5 ? PayloadMode::quantized : PayloadMode::sign_only;
  const int blocks = static_cast<int>(rng.below(4));
  for (int b = 0; b < blocks; ++b) {
    GroupBlock block;
    block.group_id = static_cast<std::uint32_t>(b);
    block.exponent = static_cast<std::int32_t>(rng.below(64)) - 32;
    std::uint32_t index = 0;
    const int entries = static_cast<int>(rng.below(20));
    for (int e = 0; e < entries; ++e) {
      index += 1 + static_cast<std::uint32_t>(rng.below(1000));
      block.entries.push_back(QuantizedEntry{rng.uniform() < 0.5,
                                             static_cast<std::uint8_t>(rng.below(8)), index});
    }
    msg.blocks.push_back(std::move(block));
  }
  return msg;
}

}  // namespace

TEST_CASE("entry words pack sign, d and index into fixed bit fields") {
  CHECK(pack_entry({false, 7, 1}) == 0x70000001u);
  CHECK(pack_entry({true, 2, 2}) == 0xA0000002u);
  CHECK(pack_entry({false, 1, 3}) == 0x10000003u);
  CHECK(pack_entry({true, 0, 4}) == 0x80000004u);
  CHECK(unpack_entry(0xA0000002u) == QuantizedEntry{true, 2, 2});
}

TEST_CASE("the worked example group serializes to the expected entry words") {
  StepMessage msg;
  msg.worker_id = 3;
  msg.step = 17;
  msg.mode = PayloadMode::quantized;
  msg.blocks.push_back(GroupBlock{
      0, 5, {{false, 7, 1}, {true, 2, 2}, {false, 1, 3}, {true, 0, 4}}});

  const auto bytes = serialize(msg);
  REQUIRE(bytes.size() == 21 + 12 + 16);

  // little-endian magic first
  CHECK(bytes[0] == 0x31);
  CHECK(bytes[1] == 0x43);
  CHECK(bytes[2] == 0x47);
  CHECK(bytes[3] == 0x56);

  // exponent e_k = 5 in the block header
  CHECK(bytes[21 + 4] == 5);

  const std::size_t entries_at = 21 + 12;
  const std::uint32_t expected[4] = {0x70000001u, 0xA0000002u, 0x10000003u, 0x80000004u};
  for (int e = 0; e < 4; ++e) {
    std::uint32_t word = 0;
    for (int i = 3; i >= 0; --i) {
      word = word << 8 | bytes[entries_at + static_cast<std::size_t>(4 * e + i)];
    }
    CHECK(word == expected[e]);
  }

  CHECK(parse(bytes) == msg);
}

TEST_CASE("an empty message is exactly the fixed header") {
  StepMessage msg;
  msg.worker_id = 9;
  msg.step = 1234567890123ull;
  msg.mode = PayloadMode::sign_only;
  const auto bytes = serialize(msg);
  CHECK(bytes.size() == 21);  // magic + worker + step + mode + group count
  CHECK(wire_size(msg) == 21);
  CHECK(parse(bytes) == msg);
}

TEST_CASE("parse(serialize(m)) is the identity on random messages") {
  Rng rng(2024);
  for (int trial = 0; trial < 10000; ++trial) {
    const StepMessage msg = random_message(rng);
    const auto bytes = serialize(msg);
    CHECK(bytes.size() == wire_size(msg));
    CHECK(parse(bytes) == msg);
  }
}

TEST_CASE("serialize enforces the block invariants") {
  StepMessage msg;
  msg.blocks.push_back(GroupBlock{0, 0, {{false, 0, 5}, {false, 0, 5}}});
  CHECK_THROWS_AS(serialize(msg), wire_error);  // duplicate index

  msg.blocks[0].entries = {{false, 0, 5}, {false, 0, 4}};
  CHECK_THROWS_AS(serialize(msg), wire_error);  // unsorted

  msg.blocks[0].entries = {{false, 0, 1u << 28}};
  CHECK_THROWS_AS(serialize(msg), wire_error);  // index needs 29 bits

  msg.blocks[0].entries = {{false, 8, 1}};
  CHECK_THROWS_AS(serialize(msg), wire_error);  // d out of range
}

TEST_CASE("parse rejects malformed buffers") {
  StepMessage msg;
  msg.worker_id = 1;
  auto bytes = serialize(msg);

  auto bad_magic = bytes;
  bad_magic[0] ^= 0xFF;
  CHECK_THROWS_AS(parse(bad_magic), wire_error);

  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(parse(truncated), wire_error);

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(parse(trailing), wire_error);

  auto bad_mode = bytes;
  bad_mode[16] = 2;
  CHECK_THROWS_AS(parse(bad_mode), wire_error);
}
