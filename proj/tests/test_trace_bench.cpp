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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>

#include "vgc/bench.hpp"
#include "vgc/rng.hpp"
#include "vgc/trace.hpp"

using namespace vgc;

namespace {

Trace make_trace(Index params, Index steps, Index batch,
                 const std::function<float(Index step, Index i)>& mean_fn) {
  Trace t;
  t.param_count = params;
  t.batch_size = batch;
  for (Index s = 0; s < steps; ++s) {
    BatchGradientSums<float> sums;
    sums.batch_size = batch;
    sums.sum_mean.resize(params);
    sums.sum_sq_mean.resize(params);
    for (Index i = 0; i < params; ++i) {
      const float g = mean_fn(s, i);
      sums.sum_mean[i] = g;
      // constant per-sample gradient: sum of squares is g^2 / B
      sums.sum_sq_mean[i] = g * g / static_cast<float>(batch);
    }
    t.steps.push_back(std::move(sums));
  }
  return t;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/vgc_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("traces round-trip through the file format") {
  TempFile file("roundtrip.trace");
  Rng rng(41);
  Trace t = make_trace(7, 13, 4, [&](Index, Index) { return static_cast<float>(rng.normal()); });
  write_trace(file.path, t);
  const Trace back = read_trace(file.path);

  CHECK(back.param_count == t.param_count);
  CHECK(back.batch_size == t.batch_size);
  REQUIRE(back.steps.size() == t.steps.size());
  for (std::size_t s = 0; s < t.steps.size(); ++s) {
    CHECK((back.steps[s].sum_mean == t.steps[s].sum_mean).all());
    CHECK((back.steps[s].sum_sq_mean == t.steps[s].sum_sq_mean).all());
  }
}

TEST_CASE("a trace with an unknown version is refused") {
  TempFile file("badversion.trace");
  Trace t = make_trace(2, 1, 4, [](Index, Index) { return 1.0f; });
  write_trace(file.path, t);
  {
    std::fstream f(file.path, std::ios::binary | std::ios::in | std::ios::out);
    const std::uint32_t bogus = 99;
    f.write(reinterpret_cast<const char*>(&bogus), sizeof(bogus));
  }
  CHECK_THROWS_AS(read_trace(file.path), wire_error);
}

TEST_CASE("a truncated trace record is refused") {
  TempFile file("truncated.trace");
  Trace t = make_trace(4, 3, 4, [](Index, Index) { return 0.5f; });
  write_trace(file.path, t);
  // chop the last few bytes
  std::ifstream in(file.path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  std::ofstream out(file.path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 5));
  out.close();
  CHECK_THROWS_AS(read_trace(file.path), wire_error);
}

TEST_CASE("a zero-gradient trace sends nothing and reports infinite compression") {
  const Trace t = make_trace(5, 10, 4, [](Index, Index) { return 0.0f; });
  const BenchResult r = run_codec_bench(t, Codec::basic, GateConfig{1.0, 0.999, std::nullopt});
  CHECK(r.sent_total == 0);
  CHECK(std::isinf(r.compression_ratio));
}

TEST_CASE("a constant-gradient trace fires the gate every step") {
  // constant per-sample gradient with |B| > 1: r^2 = 1 > alpha * v = 0.25
  // already at the first step, and the reset state repeats identically
  const Trace t = make_trace(1, 20, 4, [](Index, Index) { return 1.0f; });
  const BenchResult r = run_codec_bench(t, Codec::basic, GateConfig{1.0, 0.999, std::nullopt});
  CHECK(r.sent_total == 20);
  CHECK(r.compression_ratio == doctest::Approx(1.0));
}

TEST_CASE("quantized basic replay stays within the relative error bound") {
  Rng rng(43);
  const Trace t = make_trace(16, 50, 8, [&](Index, Index) {
    return static_cast<float>(rng.normal() * 0.1 + 0.2);
  });
  const BenchResult r = run_codec_bench(t, Codec::basic, GateConfig{1.5, 0.999, std::nullopt});
  CHECK(r.reconstruction_count > 0);
  // 1/3 for rounded values; truncated values (above the group anchor) can
  // reach just under 1/2
  CHECK(r.reconstruction_max_err < 0.5);
}

TEST_CASE("hybrid sends no more than basic when tau sits below the residual scale") {
  // strong constant signal, mild noise: every residual that can fire has
  // magnitude well above tau
  Rng rng(44);
  const Trace t = make_trace(8, 100, 4, [&](Index, Index) {
    return static_cast<float>(1.0 + 0.05 * rng.normal());
  });
  const GateConfig basic_gate{2.0, 0.999, std::nullopt};
  const GateConfig hybrid_gate{2.0, 0.999, 0.25};
  const BenchResult basic = run_codec_bench(t, Codec::basic, basic_gate, false);
  const BenchResult hybrid = run_codec_bench(t, Codec::hybrid, hybrid_gate);
  CHECK(hybrid.sent_total <= basic.sent_total);
}

TEST_CASE("strom replay reports the decoded-vs-residual gap") {
  const Trace t = make_trace(1, 5, 4, [](Index, Index) { return 1.0f; });
  const BenchResult r = run_codec_bench(t, Codec::strom, GateConfig{1.0, 0.999, 0.4});
  CHECK(r.sent_total > 0);
  CHECK(r.reconstruction_count == r.sent_total);
  CHECK(r.reconstruction_max_err > 0.0);
}

TEST_CASE("the bench refuses inconsistent configurations") {
  const Trace t = make_trace(1, 2, 4, [](Index, Index) { return 1.0f; });
  CHECK_THROWS_AS(run_codec_bench(t, Codec::strom, GateConfig{1.0, 0.999, std::nullopt}),
                  config_error);
  CHECK_THROWS_AS(run_codec_bench(Trace{}, Codec::none, GateConfig{}), config_error);
}
