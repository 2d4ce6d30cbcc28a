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
// 4-bit logarithmic quantization of selected gradient values. Magnitudes are
// snapped to powers of two and stored as a 3-bit offset d below the per-group
// anchor exponent e_k = floor(log2 max|g|); one sign bit completes the 4 bits.
// Offsets above 7 are unrepresentable: those values are not sent and are
// handed back to the caller for residual restoration.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vgc/error.hpp"
#include "vgc/param_group.hpp"
#include "vgc/types.hpp"

namespace vgc {

namespace detail {

template <typename Scalar>
struct float_bits;

template <>
struct float_bits<float> {
  using uint_type = std::uint32_t;
  static constexpr uint_type exponent_mask = 0x7F800000u;
  static constexpr uint_type mantissa_mask = 0x007FFFFFu;
  static constexpr uint_type mantissa_msb = 0x00400000u;
};

template <>
struct float_bits<double> {
  using uint_type = std::uint64_t;
  static constexpr uint_type exponent_mask = 0x7FF0000000000000ull;
  static constexpr uint_type mantissa_mask = 0x000FFFFFFFFFFFFFull;
  static constexpr uint_type mantissa_msb = 0x0008000000000000ull;
};

template <typename Scalar>
Scalar floor_pow2_arith(Scalar x) {
  int e;
  std::frexp(x, &e);  // x = f * 2^e, f in [0.5, 1)
  return std::ldexp(Scalar(1), e - 1);
}

template <typename Scalar>
Scalar round_pow2_arith(Scalar x) {
  int e;
  std::frexp(x, &e);
  const Scalar lo = std::ldexp(Scalar(1), e - 1);
  // x/lo is exact (power-of-two divisor), so the midpoint test is too.
  return x / lo >= Scalar(1.5) ? std::ldexp(Scalar(1), e) : lo;
}

template <typename Scalar>
void require_positive_finite(Scalar x, const char* who) {
  if (!(x > Scalar(0)) || !std::isfinite(x)) {
    throw data_error(std::string(who) + ": input must be a positive finite value");
  }
}

}  // namespace detail

// 2^floor(log2 x) by zeroing the significand of the binary representation.
// Subnormals take the arithmetic path (their exponent field carries no
// information to truncate).
template <typename Scalar>
Scalar fast_floor_pow2(Scalar x) {
  detail::require_positive_finite(x, "fast_floor_pow2");
  using B = detail::float_bits<Scalar>;
  auto bits = std::bit_cast<typename B::uint_type>(x);
  if ((bits & B::exponent_mask) == 0) return detail::floor_pow2_arith(x);
  return std::bit_cast<Scalar>(bits & ~B::mantissa_mask);
}

// Linearly nearest power of two: add one to the most significant significand
// bit of the integer view, then zero the significand. Exact midpoints
// (1.5 * 2^k) carry into the exponent and round up.
template <typename Scalar>
Scalar fast_round_pow2(Scalar x) {
  detail::require_positive_finite(x, "fast_round_pow2");
  using B = detail::float_bits<Scalar>;
  auto bits = std::bit_cast<typename B::uint_type>(x);
  if ((bits & B::exponent_mask) == 0) return detail::round_pow2_arith(x);
  bits += B::mantissa_msb;
  return std::bit_cast<Scalar>(bits & ~B::mantissa_mask);
}

// Anchor exponent for one group's encoded block.
struct GroupQuantHeader {
  std::uint32_t group_id = 0;
  std::int32_t exponent = 0;  // e_k = floor(log2 M_k)

  friend bool operator==(const GroupQuantHeader&, const GroupQuantHeader&) = default;
};

// One encoded value: 1 sign bit, 3 exponent-offset bits, 28 index bits.
// Decoded magnitude is 2^(e_k - d).
struct QuantizedEntry {
  bool negative = false;
  std::uint8_t d = 0;        // in [0, 7]
  std::uint32_t index = 0;   // position within the group, < 2^28

  friend bool operator==(const QuantizedEntry&, const QuantizedEntry&) = default;
};

template <typename Scalar>
struct GroupQuantResult {
  std::optional<GroupQuantHeader> header;  // absent when nothing was encodable
  std::vector<QuantizedEntry> entries;
  // Values with d > 7; the caller decides what to do with them (the training
  // pipeline puts them back into the residual).
  SparseGradient<Scalar> dropped;
};

// Encode a sparse list of values belonging to one group. Indexes are
// group-local. M_k is the maximum absolute value of the listed elements;
// anything above 2^floor(log2 M_k) is truncated to it, the rest round to the
// linearly nearest power of two. Exact zeros are skipped entirely.
template <typename Scalar>
GroupQuantResult<Scalar> quantize_group(std::span<const SparseEntry<Scalar>> values,
                                        const ParameterGroup& group) {
  GroupQuantResult<Scalar> out;

  Scalar max_abs = Scalar(0);
  for (const auto& e : values) {
    if (e.index < 0 || e.index >= group.size) {
      throw config_error("quantize_group: index outside group '" + group.label + "'");
    }
    if (!std::isfinite(e.value)) throw data_error("quantize_group: non-finite value");
    const Scalar a = std::abs(e.value);
    if (a > max_abs) max_abs = a;
  }
  if (max_abs == Scalar(0)) return out;  // nothing to encode, no header

  const int e_k = std::ilogb(max_abs);
  const Scalar cap = std::ldexp(Scalar(1), e_k);
  out.header = GroupQuantHeader{group.group_id, e_k};

  for (const auto& e : values) {
    const Scalar a = std::abs(e.value);
    if (a == Scalar(0)) continue;
    const Scalar snapped = a > cap ? cap : fast_round_pow2(a);
    const int d = e_k - std::ilogb(snapped);
    if (d > 7) {
      out.dropped.push_back(e);
      continue;
    }
    out.entries.push_back(QuantizedEntry{e.value < Scalar(0), static_cast<std::uint8_t>(d),
                                         static_cast<std::uint32_t>(e.index)});
  }
  return out;
}

// Exact inverse of the encoding: value = (-1)^sign * 2^(e_k - d).
template <typename Scalar>
SparseGradient<Scalar> dequantize(const GroupQuantHeader& header,
                                  std::span<const QuantizedEntry> entries) {
  SparseGradient<Scalar> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    const Scalar mag = std::ldexp(Scalar(1), header.exponent - static_cast<int>(e.d));
    out.push_back({static_cast<Index>(e.index), e.negative ? -mag : mag});
  }
  return out;
}

}  // namespace vgc
