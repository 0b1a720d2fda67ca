// Copyright 2026  The phonaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phonaug/rng.hpp"

namespace phonaug::nn {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

// Storage aligned to Eigen's packet size. Vectorised reductions peel a
// prefix that depends on the buffer address; fixed alignment keeps the
// summation order, and therefore every result bit, independent of where
// the allocator happens to place a buffer.
using Values = std::vector<double, Eigen::aligned_allocator<double>>;

// Dense row-major array. Two-dimensional views treat the first dimension as
// rows and the product of the rest as columns.
struct Array {
  std::vector<std::size_t> shape;
  Values values;

  Array() = default;
  explicit Array(std::vector<std::size_t> dims, double fill = 0.0);
  static Array FromMatrix(const RowMatrix &m);
  static Array FromVector(const Eigen::VectorXd &v);

  std::size_t size() const { return values.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const;

  double &operator()(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return values[r * cols() + c];
  }

  MatrixMap Matrix();
  ConstMatrixMap Matrix() const;
  VectorMap Vector();
  ConstVectorMap Vector() const;

  bool AllFinite() const;
  bool operator==(const Array &) const = default;
};

// Trainable tensor with its gradient accumulator and Adam moments.
struct Parameter {
  std::string name;
  Array value;
  Array grad;
  Array adam_m;
  Array adam_v;
  std::uint64_t step_count = 0;

  Parameter() = default;
  Parameter(std::string name, std::vector<std::size_t> shape);

  void ZeroGrad();
  void InitUniform(double bound, Rng &rng);
};

enum class LayerKind { kEmbedding, kConv1d, kRelu, kLstm, kLinear, kSigmoid };

const char *LayerKindName(LayerKind kind);
LayerKind ParseLayerKind(const std::string &name);

struct LayerSpec {
  LayerKind kind;
  std::vector<std::size_t> dims;

  bool operator==(const LayerSpec &) const = default;
};

// --- embedding -------------------------------------------------------------

// table: vocab x dim. Output: T x dim.
Array EmbeddingForward(std::span<const int> ids, const Parameter &table);
void EmbeddingBackward(std::span<const int> ids, const Array &grad_out,
                       Parameter &table);

// --- conv1d ----------------------------------------------------------------

// Zero "same" padding, odd kernel. weights: C_out x K x C_in, bias: C_out.
Array Conv1dForward(const Array &x, const Parameter &weights,
                    const Parameter &bias);
// Accumulates weight/bias grads and returns the input gradient.
Array Conv1dBackward(const Array &x, const Array &grad_out, Parameter &weights,
                     Parameter &bias);

// --- relu ------------------------------------------------------------------

Array ReluForward(const Array &x);
// Gradient mask taken from the forward input.
Array ReluBackward(const Array &x, const Array &grad_out);

// --- lstm ------------------------------------------------------------------

// Gate order i, f, g, o along the 4H axis.
struct LstmLayerParams {
  Parameter w_input;   // 4H x In
  Parameter w_hidden;  // 4H x H
  Parameter bias;      // 4H

  LstmLayerParams() = default;
  LstmLayerParams(const std::string &prefix, std::size_t input,
                  std::size_t hidden);
  std::size_t hidden() const { return w_hidden.value.shape[1]; }
  std::size_t input() const { return w_input.value.shape[1]; }
};

struct LstmLayerCache {
  RowMatrix input;   // T x In
  RowMatrix gates;   // T x 4H, post-activation
  RowMatrix cell;    // T x H
  RowMatrix hidden;  // T x H
};

struct LstmCache {
  std::vector<LstmLayerCache> layers;
};

struct LstmOutput {
  Array hidden;        // T x H of the top layer
  Array final_hidden;  // layers x H
  Array final_cell;    // layers x H
};

// Zero initial states. cache may be null for inference.
LstmOutput LstmForward(const Array &x, const std::vector<LstmLayerParams> &layers,
                       LstmCache *cache = nullptr);
// Backpropagation through time. grad_hidden is T x H for the top layer.
Array LstmBackward(const LstmCache &cache, const Array &grad_hidden,
                   std::vector<LstmLayerParams> &layers);

// --- linear + sigmoid head ---------------------------------------------------

// weights: I x H, bias: I.
Array LinearSigmoidForward(std::span<const double> h, const Parameter &weights,
                           const Parameter &bias);
Array LinearSigmoidBackward(std::span<const double> h, const Array &probs,
                            const Array &grad_probs, Parameter &weights,
                            Parameter &bias);
// Same as above with the sigmoid derivative already folded into grad_logits.
Array LinearBackwardFromLogits(std::span<const double> h,
                               const Array &grad_logits, Parameter &weights,
                               Parameter &bias);

double Sigmoid(double x);

// --- loss ------------------------------------------------------------------

inline constexpr double kProbClamp = 1e-7;

struct LossResult {
  double loss = 0.0;
  Array grad;  // d loss / d probs
};

// Mean per-class binary cross-entropy against a one-hot target.
LossResult BceLoss(const Array &probs, const Array &target);

// d loss / d logits for sigmoid outputs: (p - y) / I.
Array BceLogitGrad(const Array &probs, const Array &target);

// --- optimiser ---------------------------------------------------------------

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam update; zeroes the gradient afterwards.
void AdamStep(Parameter &p, const AdamConfig &cfg);

}  // namespace phonaug::nn
