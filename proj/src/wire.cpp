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

#include "vgc/wire.hpp"

#include <cstring>

namespace vgc {

namespace {

constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 1 + 4;
constexpr std::size_t kBlockHeaderBytes = 4 + 4 + 4;
constexpr std::uint32_t kIndexMask = 0x0FFFFFFFu;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = static_cast<std::uint32_t>(bytes_[pos_]) |
                      static_cast<std::uint32_t>(bytes_[pos_ + 1]) << 8 |
                      static_cast<std::uint32_t>(bytes_[pos_ + 2]) << 16 |
                      static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24;
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    const std::uint64_t lo = u32();
    const std::uint64_t hi = u32();
    return lo | hi << 32;
  }

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw wire_error("truncated message");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void check_block(const GroupBlock& b) {
  std::int64_t prev = -1;
  for (const QuantizedEntry& e : b.entries) {
    if (e.d > 7) throw wire_error("entry d out of range");
    if (e.index > kIndexMask) throw wire_error("entry index exceeds 28 bits");
    if (static_cast<std::int64_t>(e.index) <= prev) {
      throw wire_error("entries must be sorted ascending without duplicates");
    }
    prev = e.index;
  }
}

}  // namespace

std::uint32_t pack_entry(const QuantizedEntry& e) {
  return (e.negative ? 0x80000000u : 0u) |
         (static_cast<std::uint32_t>(e.d) << 28) | (e.index & kIndexMask);
}

QuantizedEntry unpack_entry(std::uint32_t word) {
  QuantizedEntry e;
  e.negative = (word & 0x80000000u) != 0;
  e.d = static_cast<std::uint8_t>((word >> 28) & 0x7u);
  e.index = word & kIndexMask;
  return e;
}

std::size_t wire_size(const StepMessage& msg) {
  std::size_t n = kHeaderBytes;
  for (const GroupBlock& b : msg.blocks) {
    n += kBlockHeaderBytes + 4 * b.entries.size();
  }
  return n;
}

std::vector<std::uint8_t> serialize(const StepMessage& msg) {
  if (msg.mode != PayloadMode::quantized && msg.mode != PayloadMode::sign_only) {
    throw wire_error("unknown payload mode");
  }
  std::vector<std::uint8_t> out;
  out.reserve(wire_size(msg));

  put_u32(out, kWireMagic);
  put_u32(out, msg.worker_id);
  put_u64(out, msg.step);
  out.push_back(static_cast<std::uint8_t>(msg.mode));
  put_u32(out, static_cast<std::uint32_t>(msg.blocks.size()));

  for (const GroupBlock& b : msg.blocks) {
    check_block(b);
    put_u32(out, b.group_id);
    put_u32(out, static_cast<std::uint32_t>(b.exponent));
    put_u32(out, static_cast<std::uint32_t>(b.entries.size()));
    for (const QuantizedEntry& e : b.entries) put_u32(out, pack_entry(e));
  }
  return out;
}

StepMessage parse(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.u32() != kWireMagic) throw wire_error("bad magic");

  StepMessage msg;
  msg.worker_id = r.u32();
  msg.step = r.u64();
  const std::uint8_t mode = r.u8();
  if (mode > 1) throw wire_error("unknown payload mode");
  msg.mode = static_cast<PayloadMode>(mode);

  const std::uint32_t group_count = r.u32();
  msg.blocks.reserve(group_count);
  for (std::uint32_t k = 0; k < group_count; ++k) {
    GroupBlock b;
    b.group_id = r.u32();
    b.exponent = static_cast<std::int32_t>(r.u32());
    const std::uint32_t entry_count = r.u32();
    b.entries.reserve(entry_count);
    for (std::uint32_t i = 0; i < entry_count; ++i) {
      b.entries.push_back(unpack_entry(r.u32()));
    }
    check_block(b);
    msg.blocks.push_back(std::move(b));
  }
  if (!r.done()) throw wire_error("trailing bytes after message");
  return msg;
}

}  // namespace vgc
