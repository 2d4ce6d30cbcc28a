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
// Small binary classifiers with analytic per-sample gradients. Both models
// expose the same duck-typed surface; the trainer composes them through a
// variant. Parameters live in one flat vector tiled by the group layout.

#pragma once

#include <cmath>

#include "vgc/param_group.hpp"
#include "vgc/rng.hpp"
#include "vgc/stats.hpp"
#include "vgc/types.hpp"

namespace vgc {

namespace detail {

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  return Scalar(1) / (Scalar(1) + std::exp(-z));
}

// Numerically stable binary cross-entropy from the logit.
template <typename Scalar>
Scalar bce_from_logit(Scalar z, Scalar y) {
  return std::max(z, Scalar(0)) - y * z + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace detail

// sigmoid(w . x + b) with weights and bias as two parameter groups.
template <typename Scalar>
class LogisticRegression {
 public:
  explicit LogisticRegression(Index feature_dim) : d_(feature_dim) {
    layout_ = make_layout({{"linear.weight", d_}, {"linear.bias", 1}});
  }

  Index param_count() const { return layout_.total_params(); }
  const GroupLayout& layout() const { return layout_; }

  Vector<Scalar> init_params(std::uint64_t /*seed*/) const {
    // Convex problem; the zero start is deterministic and good enough.
    return Vector<Scalar>::Zero(param_count());
  }

  // One column per sample: (sigmoid(z) - y) * [x; 1].
  SampleMatrix<Scalar> per_sample_gradients(const Vector<Scalar>& params,
                                            const SampleMatrix<Scalar>& x,
                                            const Vector<Scalar>& y) const {
    const Index b = x.cols();
    SampleMatrix<Scalar> grads(param_count(), b);
    for (Index z = 0; z < b; ++z) {
      const Scalar logit = logit_of(params, x.col(z));
      const Scalar coef = detail::sigmoid(logit) - y[z];
      grads.col(z).head(d_) = coef * x.col(z);
      grads(d_, z) = coef;
    }
    return grads;
  }

  Scalar mean_loss(const Vector<Scalar>& params, const SampleMatrix<Scalar>& x,
                   const Vector<Scalar>& y) const {
    Scalar total = Scalar(0);
    for (Index z = 0; z < x.cols(); ++z) {
      total += detail::bce_from_logit(logit_of(params, x.col(z)), y[z]);
    }
    return total / static_cast<Scalar>(x.cols());
  }

  double accuracy(const Vector<Scalar>& params, const SampleMatrix<Scalar>& x,
                  const Vector<Scalar>& y) const {
    Index hits = 0;
    for (Index z = 0; z < x.cols(); ++z) {
      const bool predict_one = logit_of(params, x.col(z)) > Scalar(0);
      if (predict_one == (y[z] > Scalar(0.5))) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(x.cols());
  }

 private:
  template <typename Col>
  Scalar logit_of(const Vector<Scalar>& params, const Col& x) const {
    return (params.head(d_) * x).sum() + params[d_];
  }

  Index d_;
  GroupLayout layout_;
};

// One hidden tanh layer followed by a sigmoid readout. Four parameter
// groups: hidden weights/bias, output weights/bias. Hidden weights are
// stored column-major.
template <typename Scalar>
class Mlp {
 public:
  Mlp(Index feature_dim, Index hidden_dim) : d_(feature_dim), h_(hidden_dim) {
    layout_ = make_layout({{"hidden.weight", h_ * d_},
                           {"hidden.bias", h_},
                           {"out.weight", h_},
                           {"out.bias", 1}});
  }

  Index param_count() const { return layout_.total_params(); }
  const GroupLayout& layout() const { return layout_; }

  Vector<Scalar> init_params(std::uint64_t seed) const {
    Rng rng(derive_seed(seed, 0xA11));
    Vector<Scalar> params = Vector<Scalar>::Zero(param_count());
    const double w1_scale = 1.0 / std::sqrt(static_cast<double>(d_));
    for (Index i = 0; i < h_ * d_; ++i) {
      params[i] = static_cast<Scalar>(w1_scale * rng.normal());
    }
    const double w2_scale = 1.0 / std::sqrt(static_cast<double>(h_));
    for (Index i = 0; i < h_; ++i) {
      params[h_ * d_ + h_ + i] = static_cast<Scalar>(w2_scale * rng.normal());
    }
    return params;
  }

  SampleMatrix<Scalar> per_sample_gradients(const Vector<Scalar>& params,
                                            const SampleMatrix<Scalar>& x,
                                            const Vector<Scalar>& y) const {
    const Index b = x.cols();
    SampleMatrix<Scalar> grads(param_count(), b);
    Vector<Scalar> hidden(h_);
    for (Index z = 0; z < b; ++z) {
      const Scalar logit = forward(params, x.col(z), &hidden);
      const Scalar dz = detail::sigmoid(logit) - y[z];

      auto col = grads.col(z);
      // d/d out.weight = dz * hidden; d/d out.bias = dz
      col.segment(h_ * d_ + h_, h_) = dz * hidden;
      col[h_ * d_ + 2 * h_] = dz;
      // back through tanh: dh = dz * w2 .* (1 - hidden^2)
      Vector<Scalar> dh =
          dz * params.segment(h_ * d_ + h_, h_) * (Scalar(1) - hidden.square());
      col.segment(h_ * d_, h_) = dh;  // hidden bias
      for (Index j = 0; j < d_; ++j) {
        col.segment(j * h_, h_) = dh * x(j, z);
      }
    }
    return grads;
  }

  Scalar mean_loss(const Vector<Scalar>& params, const SampleMatrix<Scalar>& x,
                   const Vector<Scalar>& y) const {
    Scalar total = Scalar(0);
    for (Index z = 0; z < x.cols(); ++z) {
      total += detail::bce_from_logit(forward(params, x.col(z), nullptr), y[z]);
    }
    return total / static_cast<Scalar>(x.cols());
  }

  double accuracy(const Vector<Scalar>& params, const SampleMatrix<Scalar>& x,
                  const Vector<Scalar>& y) const {
    Index hits = 0;
    for (Index z = 0; z < x.cols(); ++z) {
      const bool predict_one = forward(params, x.col(z), nullptr) > Scalar(0);
      if (predict_one == (y[z] > Scalar(0.5))) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(x.cols());
  }

 private:
  template <typename Col>
  Scalar forward(const Vector<Scalar>& params, const Col& x, Vector<Scalar>* hidden_out) const {
    Vector<Scalar> pre = params.segment(h_ * d_, h_);  // hidden bias
    for (Index j = 0; j < d_; ++j) {
      pre += params.segment(j * h_, h_) * x[j];
    }
    Vector<Scalar> hidden = pre.tanh();
    const Scalar logit =
        (params.segment(h_ * d_ + h_, h_) * hidden).sum() + params[h_ * d_ + 2 * h_];
    if (hidden_out) *hidden_out = std::move(hidden);
    return logit;
  }

  Index d_;
  Index h_;
  GroupLayout layout_;
};

}  // namespace vgc
