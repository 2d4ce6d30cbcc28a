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

#include "vgc/trace.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "vgc/error.hpp"

namespace vgc {

namespace {

static_assert(std::endian::native == std::endian::little,
              "trace i/o assumes a little-endian host");

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw wire_error("trace: truncated file");
  return v;
}

}  // namespace

void write_trace(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw wire_error("trace: cannot open '" + path + "' for writing");

  write_pod(out, kTraceVersion);
  write_pod(out, static_cast<std::uint64_t>(trace.param_count));
  write_pod(out, static_cast<std::uint32_t>(trace.batch_size));

  const std::uint32_t record_bytes =
      static_cast<std::uint32_t>(2 * trace.param_count * sizeof(float));
  for (const auto& step : trace.steps) {
    if (step.sum_mean.size() != trace.param_count ||
        step.sum_sq_mean.size() != trace.param_count) {
      throw config_error("trace: record dimension mismatch");
    }
    write_pod(out, record_bytes);
    out.write(reinterpret_cast<const char*>(step.sum_mean.data()),
              static_cast<std::streamsize>(trace.param_count * sizeof(float)));
    out.write(reinterpret_cast<const char*>(step.sum_sq_mean.data()),
              static_cast<std::streamsize>(trace.param_count * sizeof(float)));
  }
  if (!out) throw wire_error("trace: write failed");
}

Trace read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wire_error("trace: cannot open '" + path + "'");

  const auto version = read_pod<std::uint32_t>(in);
  if (version != kTraceVersion) {
    throw wire_error("trace: version " + std::to_string(version) + " unsupported (want " +
                     std::to_string(kTraceVersion) + ")");
  }

  Trace trace;
  trace.param_count = static_cast<Index>(read_pod<std::uint64_t>(in));
  trace.batch_size = static_cast<Index>(read_pod<std::uint32_t>(in));
  if (trace.param_count <= 0 || trace.batch_size <= 0) {
    throw wire_error("trace: bad header");
  }

  const std::uint32_t expected_bytes =
      static_cast<std::uint32_t>(2 * trace.param_count * sizeof(float));
  while (true) {
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (in.eof()) break;
    if (!in) throw wire_error("trace: truncated record header");
    if (len != expected_bytes) throw wire_error("trace: record length mismatch");

    BatchGradientSums<float> step;
    step.batch_size = trace.batch_size;
    step.sum_mean.resize(trace.param_count);
    step.sum_sq_mean.resize(trace.param_count);
    in.read(reinterpret_cast<char*>(step.sum_mean.data()),
            static_cast<std::streamsize>(trace.param_count * sizeof(float)));
    in.read(reinterpret_cast<char*>(step.sum_sq_mean.data()),
            static_cast<std::streamsize>(trace.param_count * sizeof(float)));
    if (!in) throw wire_error("trace: truncated record");
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

}  // namespace vgc
