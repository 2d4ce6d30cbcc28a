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
// Analytical bandwidth-only communication model. Latency terms are excluded
// throughout; all times scale with the transfer time per bit.

#pragma once

#include <stdexcept>

namespace vgc {

struct CostModelInputs {
  double p = 2;       // node count
  double N = 1;       // parameter count
  double s = 32;      // bits per parameter
  double beta = 1;    // transfer time per bit, seconds
  double m = 0;       // pipeline block size, bits
  double c = 1;       // average compression ratio

  void validate() const {
    if (!(N > 0) || !(s > 0) || !(beta > 0) || m < 0) {
      throw std::domain_error("cost model inputs must be positive");
    }
  }
};

// Ring allreduce of the uncompressed gradient: 2(p-1)Ns*beta/p.
inline double ring_allreduce_time(const CostModelInputs& in) {
  in.validate();
  if (in.p < 2) throw std::domain_error("ring_allreduce_time: p must be >= 2");
  return 2.0 * (in.p - 1.0) * in.N * in.s * in.beta / in.p;
}

// Upper bound on pipelined ring allgatherv of the compressed payloads:
// (Nsp/c + (p-1)m) * beta.
inline double allgatherv_time_bound(const CostModelInputs& in) {
  in.validate();
  if (!(in.c > 0)) throw std::domain_error("allgatherv_time_bound: c must be > 0");
  return (in.N * in.s * in.p / in.c + (in.p - 1.0) * in.m) * in.beta;
}

// Same bound fed with a measured total payload size (bits per round summed
// over workers) instead of the uniform Ns/c estimate.
inline double allgatherv_time_bound_measured(double sum_payload_bits, double p, double m,
                                             double beta) {
  if (!(sum_payload_bits > 0) || p < 1 || m < 0 || !(beta > 0)) {
    throw std::domain_error("allgatherv_time_bound_measured: bad inputs");
  }
  return (sum_payload_bits + (p - 1.0) * m) * beta;
}

// Lower bound on T_r / T_v with m small: 2(p-1)c/p^2. Exceeds 1 (i.e. the
// compressed exchange wins) once c > p^2 / (2(p-1)), roughly p/2.
inline double speedup_lower_bound(double p, double c) {
  if (p < 2) throw std::domain_error("speedup_lower_bound: p must be >= 2");
  if (!(c > 0)) throw std::domain_error("speedup_lower_bound: c must be > 0");
  return 2.0 * (p - 1.0) * c / (p * p);
}

}  // namespace vgc
