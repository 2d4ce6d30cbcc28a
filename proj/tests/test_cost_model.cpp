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

#include "vgc/cost_model.hpp"

using namespace vgc;

TEST_CASE("ring allreduce time") {
  CHECK(ring_allreduce_time({2, 1000, 32, 1, 0, 1}) == doctest::Approx(32000.0));
  // doubling N doubles the time
  CHECK(ring_allreduce_time({2, 2000, 32, 1, 0, 1}) == doctest::Approx(64000.0));
  // large p approaches 2Ns*beta
  CHECK(ring_allreduce_time({1e9, 1000, 32, 1, 0, 1}) ==
        doctest::Approx(64000.0).epsilon(1e-6));
  CHECK_THROWS_AS(ring_allreduce_time({1, 1000, 32, 1, 0, 1}), std::domain_error);
}

TEST_CASE("allgatherv time bound") {
  // m = 0 reduces to Nsp*beta/c
  CHECK(allgatherv_time_bound({8, 1e6, 32, 1e-9, 0, 1000}) == doctest::Approx(2.56e-4));
  // pipeline overhead adds (p-1)m*beta
  CHECK(allgatherv_time_bound({8, 1e6, 32, 1e-9, 100, 1000}) ==
        doctest::Approx(2.56e-4 + 7 * 100 * 1e-9));
  // monotone decreasing in c
  CHECK(allgatherv_time_bound({8, 1e6, 32, 1e-9, 0, 2000}) <
        allgatherv_time_bound({8, 1e6, 32, 1e-9, 0, 1000}));
  CHECK_THROWS_AS(allgatherv_time_bound({8, 1e6, 32, 1e-9, 0, 0}), std::domain_error);
}

TEST_CASE("speedup lower bound") {
  CHECK(speedup_lower_bound(8, 100) == doctest::Approx(21.875));
  CHECK(speedup_lower_bound(2, 1) == doctest::Approx(0.5));
  // break-even frontier: c = p/2 gives (p-1)/p, just below 1
  for (double p : {2.0, 4.0, 16.0, 128.0}) {
    CHECK(speedup_lower_bound(p, p / 2.0) == doctest::Approx((p - 1.0) / p));
    // exactly 1 at c = p^2 / (2(p-1))
    CHECK(speedup_lower_bound(p, p * p / (2.0 * (p - 1.0))) == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(speedup_lower_bound(1, 10), std::domain_error);
  CHECK_THROWS_AS(speedup_lower_bound(4, 0), std::domain_error);
}

TEST_CASE("the ratio of the two times equals the closed-form bound at m = 0") {
  for (double p = 2; p <= 1024; p *= 2) {
    for (double c = 1; c <= 1e5; c *= 10) {
      const CostModelInputs in{p, 25.6e6, 32, 1e-9, 0, c};
      const double ratio = ring_allreduce_time(in) / allgatherv_time_bound(in);
      const double bound = speedup_lower_bound(p, c);
      CHECK(ratio == doctest::Approx(bound).epsilon(1e-12));
    }
  }
}

TEST_CASE("speedup bound is monotone in c and p") {
  for (double p = 2; p <= 64; p += 1) {
    CHECK(speedup_lower_bound(p, 200) > speedup_lower_bound(p, 100));
    CHECK(speedup_lower_bound(p + 1, 100) < speedup_lower_bound(p, 100));
  }
}

TEST_CASE("measured-bits form matches the uniform estimate") {
  const CostModelInputs in{8, 1e6, 32, 1e-9, 0, 1000};
  const double uniform = allgatherv_time_bound(in);
  const double measured = allgatherv_time_bound_measured(1e6 * 32 * 8 / 1000.0, 8, 0, 1e-9);
  CHECK(uniform == doctest::Approx(measured));
}
