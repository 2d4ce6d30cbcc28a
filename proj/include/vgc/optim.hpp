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
// Optimizers over the flat parameter vector. The gradient handed to step()
// is the globally merged mean; indexes that were not communicated this step
// are zeros, and moment state (momentum, Adam) is updated locally after
// communication under that convention.

#pragma once

#include <cmath>
#include <string>

#include "vgc/error.hpp"
#include "vgc/types.hpp"

namespace vgc {

struct OptimizerConfig {
  enum class Kind { sgd, momentum, adam };

  Kind kind = Kind::sgd;
  double step_size = 0.1;
  double momentum = 0.9;     // momentum only
  double beta1 = 0.9;        // adam
  double beta2 = 0.999;      // adam
  double epsilon = 1e-8;     // adam

  void validate() const {
    if (!(step_size > 0)) throw config_error("optimizer step_size must be > 0");
    if (momentum < 0 || momentum >= 1) throw config_error("momentum must be in [0, 1)");
  }
};

template <typename Scalar>
class Optimizer {
 public:
  Optimizer(const OptimizerConfig& cfg, Index n) : cfg_(cfg) {
    cfg_.validate();
    if (cfg_.kind == OptimizerConfig::Kind::momentum) {
      velocity_ = Vector<Scalar>::Zero(n);
    } else if (cfg_.kind == OptimizerConfig::Kind::adam) {
      m_ = Vector<Scalar>::Zero(n);
      v_ = Vector<Scalar>::Zero(n);
    }
  }

  // gamma can be rescheduled between epochs (step halving).
  void set_step_size(double gamma) { gamma_ = gamma; }
  double step_size() const { return gamma_ < 0 ? cfg_.step_size : gamma_; }

  void step(Vector<Scalar>& params, const Vector<Scalar>& grad) {
    const Scalar gamma = static_cast<Scalar>(step_size());
    switch (cfg_.kind) {
      case OptimizerConfig::Kind::sgd:
        params -= gamma * grad;
        break;
      case OptimizerConfig::Kind::momentum:
        velocity_ = static_cast<Scalar>(cfg_.momentum) * velocity_ + grad;
        params -= gamma * velocity_;
        break;
      case OptimizerConfig::Kind::adam: {
        ++t_;
        const Scalar b1 = static_cast<Scalar>(cfg_.beta1);
        const Scalar b2 = static_cast<Scalar>(cfg_.beta2);
        m_ = b1 * m_ + (Scalar(1) - b1) * grad;
        v_ = b2 * v_ + (Scalar(1) - b2) * grad.square();
        const Scalar c1 = Scalar(1) - static_cast<Scalar>(std::pow(cfg_.beta1, t_));
        const Scalar c2 = Scalar(1) - static_cast<Scalar>(std::pow(cfg_.beta2, t_));
        params -= gamma * (m_ / c1) / ((v_ / c2).sqrt() + static_cast<Scalar>(cfg_.epsilon));
        break;
      }
    }
  }

 private:
  OptimizerConfig cfg_;
  double gamma_ = -1;
  Vector<Scalar> velocity_;
  Vector<Scalar> m_;
  Vector<Scalar> v_;
  long t_ = 0;
};

inline OptimizerConfig::Kind optimizer_kind_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerConfig::Kind::sgd;
  if (s == "momentum") return OptimizerConfig::Kind::momentum;
  if (s == "adam") return OptimizerConfig::Kind::adam;
  throw config_error("unknown optimizer kind '" + s + "'");
}

}  // namespace vgc
