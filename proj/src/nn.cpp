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

#include "phonaug/nn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "phonaug/error.hpp"

namespace phonaug::nn {

Array::Array(std::vector<std::size_t> dims, double fill) : shape(std::move(dims)) {
  std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                                  std::multiplies<>());
  values.assign(n, fill);
}

Array Array::FromMatrix(const RowMatrix &m) {
  Array a({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  std::copy(m.data(), m.data() + m.size(), a.values.begin());
  return a;
}

Array Array::FromVector(const Eigen::VectorXd &v) {
  Array a({static_cast<std::size_t>(v.size())});
  std::copy(v.data(), v.data() + v.size(), a.values.begin());
  return a;
}

std::size_t Array::cols() const {
  if (shape.empty()) return 0;
  if (shape.size() == 1) return 1;
  return std::accumulate(shape.begin() + 1, shape.end(), std::size_t{1},
                         std::multiplies<>());
}

MatrixMap Array::Matrix() {
  return MatrixMap(values.data(), static_cast<Eigen::Index>(rows()),
                   static_cast<Eigen::Index>(cols()));
}

ConstMatrixMap Array::Matrix() const {
  return ConstMatrixMap(values.data(), static_cast<Eigen::Index>(rows()),
                        static_cast<Eigen::Index>(cols()));
}

VectorMap Array::Vector() {
  return VectorMap(values.data(), static_cast<Eigen::Index>(values.size()));
}

ConstVectorMap Array::Vector() const {
  return ConstVectorMap(values.data(), static_cast<Eigen::Index>(values.size()));
}

bool Array::AllFinite() const {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

Parameter::Parameter(std::string n, std::vector<std::size_t> shape)
    : name(std::move(n)),
      value(shape),
      grad(shape),
      adam_m(shape),
      adam_v(std::move(shape)) {}

void Parameter::ZeroGrad() { std::fill(grad.values.begin(), grad.values.end(), 0.0); }

void Parameter::InitUniform(double bound, Rng &rng) {
  for (double &v : value.values) v = rng.Uniform(-bound, bound);
}

const char *LayerKindName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kEmbedding: return "embedding";
    case LayerKind::kConv1d: return "conv1d";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kLstm: return "lstm";
    case LayerKind::kLinear: return "linear";
    case LayerKind::kSigmoid: return "sigmoid";
  }
  return "?";
}

LayerKind ParseLayerKind(const std::string &name) {
  for (LayerKind k : {LayerKind::kEmbedding, LayerKind::kConv1d, LayerKind::kRelu,
                      LayerKind::kLstm, LayerKind::kLinear, LayerKind::kSigmoid})
    if (name == LayerKindName(k)) return k;
  throw Error(ErrorKind::kParse, "unknown layer kind '" + name + "'");
}

// ---------------------------------------------------------------------------

Array EmbeddingForward(std::span<const int> ids, const Parameter &table) {
  const std::size_t vocab = table.value.rows();
  const std::size_t dim = table.value.cols();
  Array out({ids.size(), dim});
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || static_cast<std::size_t>(ids[t]) >= vocab)
      throw Error(ErrorKind::kIndex, "embedding id " + std::to_string(ids[t]) +
                                         " outside table of " +
                                         std::to_string(vocab) + " rows");
    std::copy_n(table.value.values.begin() + ids[t] * dim, dim,
                out.values.begin() + t * dim);
  }
  return out;
}

void EmbeddingBackward(std::span<const int> ids, const Array &grad_out,
                       Parameter &table) {
  const std::size_t dim = table.value.cols();
  for (std::size_t t = 0; t < ids.size(); ++t) {
    double *row = table.grad.values.data() + ids[t] * dim;
    const double *g = grad_out.values.data() + t * dim;
    for (std::size_t j = 0; j < dim; ++j) row[j] += g[j];
  }
}

namespace {

void CheckConvShapes(const Array &x, const Parameter &weights,
                     const Parameter &bias) {
  const auto &ws = weights.value.shape;
  if (ws.size() != 3)
    throw Error(ErrorKind::kShape, "conv1d weights must be C_out x K x C_in");
  if (ws[1] % 2 == 0) throw Error(ErrorKind::kShape, "conv1d kernel must be odd");
  if (x.shape.size() != 2 || x.cols() != ws[2])
    throw Error(ErrorKind::kShape, "conv1d input has " + std::to_string(x.cols()) +
                                       " channels, weights expect " +
                                       std::to_string(ws[2]));
  if (bias.value.size() != ws[0])
    throw Error(ErrorKind::kShape, "conv1d bias size mismatch");
}

// Row t holds x[t-h .. t+h] concatenated, zeros outside the sequence.
RowMatrix Im2Col(const Array &x, std::size_t kernel) {
  const std::size_t T = x.rows(), C = x.cols();
  const auto half = static_cast<std::ptrdiff_t>(kernel / 2);
  RowMatrix cols = RowMatrix::Zero(static_cast<Eigen::Index>(T),
                                   static_cast<Eigen::Index>(kernel * C));
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < kernel; ++k) {
      const auto src = static_cast<std::ptrdiff_t>(t) + static_cast<std::ptrdiff_t>(k) - half;
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(T)) continue;
      std::copy_n(x.values.data() + src * C, C, cols.data() + t * kernel * C + k * C);
    }
  }
  return cols;
}

}  // namespace

Array Conv1dForward(const Array &x, const Parameter &weights,
                    const Parameter &bias) {
  CheckConvShapes(x, weights, bias);
  if (x.rows() == 0) throw Error(ErrorKind::kShape, "conv1d needs T >= 1");
  const RowMatrix cols = Im2Col(x, weights.value.shape[1]);
  RowMatrix out = cols * weights.value.Matrix().transpose();
  out.rowwise() += bias.value.Vector().transpose();
  return Array::FromMatrix(out);
}

Array Conv1dBackward(const Array &x, const Array &grad_out, Parameter &weights,
                     Parameter &bias) {
  CheckConvShapes(x, weights, bias);
  const std::size_t kernel = weights.value.shape[1];
  const std::size_t T = x.rows(), C = x.cols();
  const RowMatrix cols = Im2Col(x, kernel);
  const auto g = grad_out.Matrix();
  weights.grad.Matrix().noalias() += g.transpose() * cols;
  bias.grad.Vector() += g.colwise().sum().transpose();
  const RowMatrix grad_cols = g * weights.value.Matrix();

  Array dx({T, C});
  const auto half = static_cast<std::ptrdiff_t>(kernel / 2);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < kernel; ++k) {
      const auto dst = static_cast<std::ptrdiff_t>(t) + static_cast<std::ptrdiff_t>(k) - half;
      if (dst < 0 || dst >= static_cast<std::ptrdiff_t>(T)) continue;
      const double *src = grad_cols.data() + t * kernel * C + k * C;
      double *out = dx.values.data() + dst * C;
      for (std::size_t c = 0; c < C; ++c) out[c] += src[c];
    }
  }
  return dx;
}

Array ReluForward(const Array &x) {
  Array y = x;
  for (double &v : y.values) v = v > 0.0 ? v : 0.0;
  return y;
}

Array ReluBackward(const Array &x, const Array &grad_out) {
  Array g = grad_out;
  for (std::size_t i = 0; i < g.values.size(); ++i)
    if (!(x.values[i] > 0.0)) g.values[i] = 0.0;
  return g;
}

// ---------------------------------------------------------------------------

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LstmLayerParams::LstmLayerParams(const std::string &prefix, std::size_t input,
                                 std::size_t hidden)
    : w_input(prefix + ".w_input", {4 * hidden, input}),
      w_hidden(prefix + ".w_hidden", {4 * hidden, hidden}),
      bias(prefix + ".bias", {4 * hidden}) {}

LstmOutput LstmForward(const Array &x, const std::vector<LstmLayerParams> &layers,
                       LstmCache *cache) {
  if (layers.empty()) throw Error(ErrorKind::kShape, "LSTM needs >= 1 layer");
  if (x.shape.size() != 2 || x.rows() == 0)
    throw Error(ErrorKind::kShape, "LSTM input must be T x In with T >= 1");
  const auto T = static_cast<Eigen::Index>(x.rows());
  if (cache) cache->layers.assign(layers.size(), {});

  LstmOutput out;
  const std::size_t H_top = layers.back().hidden();
  out.final_hidden = Array({layers.size(), H_top});
  out.final_cell = Array({layers.size(), H_top});

  RowMatrix input = x.Matrix();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto &p = layers[l];
    const auto H = static_cast<Eigen::Index>(p.hidden());
    if (static_cast<std::size_t>(input.cols()) != p.input())
      throw Error(ErrorKind::kShape, "LSTM layer " + std::to_string(l) +
                                         " expects input width " +
                                         std::to_string(p.input()));
    RowMatrix gates = input * p.w_input.value.Matrix().transpose();
    gates.rowwise() += p.bias.value.Vector().transpose();
    RowMatrix cell(T, H), hidden(T, H);
    const auto w_hidden = p.w_hidden.value.Matrix();
    Eigen::VectorXd h = Eigen::VectorXd::Zero(H), c = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd z(4 * H);
    for (Eigen::Index t = 0; t < T; ++t) {
      z.noalias() = gates.row(t).transpose();
      if (t > 0) z.noalias() += w_hidden * h;
      for (Eigen::Index j = 0; j < H; ++j) {
        const double i_g = Sigmoid(z(j));
        const double f_g = Sigmoid(z(H + j));
        const double g_g = std::tanh(z(2 * H + j));
        const double o_g = Sigmoid(z(3 * H + j));
        c(j) = f_g * c(j) + i_g * g_g;
        h(j) = o_g * std::tanh(c(j));
        gates(t, j) = i_g;
        gates(t, H + j) = f_g;
        gates(t, 2 * H + j) = g_g;
        gates(t, 3 * H + j) = o_g;
      }
      cell.row(t) = c.transpose();
      hidden.row(t) = h.transpose();
    }
    for (Eigen::Index j = 0; j < H; ++j) {
      out.final_hidden(l, j) = h(j);
      out.final_cell(l, j) = c(j);
    }
    if (cache) {
      auto &lc = cache->layers[l];
      lc.input = std::move(input);
      lc.gates = std::move(gates);
      lc.cell = std::move(cell);
      lc.hidden = hidden;
    }
    input = std::move(hidden);
  }
  out.hidden = Array::FromMatrix(input);
  return out;
}

Array LstmBackward(const LstmCache &cache, const Array &grad_hidden,
                   std::vector<LstmLayerParams> &layers) {
  if (cache.layers.size() != layers.size())
    throw Error(ErrorKind::kShape, "LSTM cache does not match parameters");
  RowMatrix grad_h = grad_hidden.Matrix();
  for (std::size_t l = layers.size(); l-- > 0;) {
    auto &p = layers[l];
    const auto &lc = cache.layers[l];
    const Eigen::Index T = lc.hidden.rows();
    const auto H = static_cast<Eigen::Index>(p.hidden());
    const auto w_hidden = p.w_hidden.value.Matrix();

    RowMatrix grad_z(T, 4 * H);
    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd dz(4 * H);
    for (Eigen::Index t = T - 1; t >= 0; --t) {
      for (Eigen::Index j = 0; j < H; ++j) {
        const double i_g = lc.gates(t, j);
        const double f_g = lc.gates(t, H + j);
        const double g_g = lc.gates(t, 2 * H + j);
        const double o_g = lc.gates(t, 3 * H + j);
        const double c_t = lc.cell(t, j);
        const double c_prev = t > 0 ? lc.cell(t - 1, j) : 0.0;
        const double tc = std::tanh(c_t);
        const double dh = grad_h(t, j) + dh_next(j);
        const double d_o = dh * tc;
        const double dc = dh * o_g * (1.0 - tc * tc) + dc_next(j);
        dc_next(j) = dc * f_g;
        dz(j) = dc * g_g * i_g * (1.0 - i_g);
        dz(H + j) = dc * c_prev * f_g * (1.0 - f_g);
        dz(2 * H + j) = dc * i_g * (1.0 - g_g * g_g);
        dz(3 * H + j) = d_o * o_g * (1.0 - o_g);
      }
      grad_z.row(t) = dz.transpose();
      dh_next.noalias() = w_hidden.transpose() * dz;
    }

    p.w_input.grad.Matrix().noalias() += grad_z.transpose() * lc.input;
    if (T > 1)
      p.w_hidden.grad.Matrix().noalias() +=
          grad_z.bottomRows(T - 1).transpose() * lc.hidden.topRows(T - 1);
    p.bias.grad.Vector() += grad_z.colwise().sum().transpose();
    grad_h = grad_z * p.w_input.value.Matrix();
  }
  return Array::FromMatrix(grad_h);
}

// ---------------------------------------------------------------------------

Array LinearSigmoidForward(std::span<const double> h, const Parameter &weights,
                           const Parameter &bias) {
  if (weights.value.cols() != h.size())
    throw Error(ErrorKind::kShape, "linear layer expects input of size " +
                                       std::to_string(weights.value.cols()));
  ConstVectorMap hv(h.data(), static_cast<Eigen::Index>(h.size()));
  Eigen::VectorXd z = weights.value.Matrix() * hv + bias.value.Vector();
  for (auto &v : z) v = Sigmoid(v);
  return Array::FromVector(z);
}

Array LinearBackwardFromLogits(std::span<const double> h,
                               const Array &grad_logits, Parameter &weights,
                               Parameter &bias) {
  ConstVectorMap hv(h.data(), static_cast<Eigen::Index>(h.size()));
  const auto dz = grad_logits.Vector();
  weights.grad.Matrix().noalias() += dz * hv.transpose();
  bias.grad.Vector() += dz;
  return Array::FromVector(weights.value.Matrix().transpose() * dz);
}

Array LinearSigmoidBackward(std::span<const double> h, const Array &probs,
                            const Array &grad_probs, Parameter &weights,
                            Parameter &bias) {
  Array dz = grad_probs;
  for (std::size_t i = 0; i < dz.values.size(); ++i)
    dz.values[i] *= probs.values[i] * (1.0 - probs.values[i]);
  return LinearBackwardFromLogits(h, dz, weights, bias);
}

LossResult BceLoss(const Array &probs, const Array &target) {
  if (probs.size() != target.size() || probs.size() == 0)
    throw Error(ErrorKind::kShape, "loss inputs differ in size");
  const auto n = static_cast<double>(probs.size());
  LossResult r;
  r.grad = Array(probs.shape);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    // gradient is evaluated at the clamped probability
    const double p = std::clamp(probs.values[i], kProbClamp, 1.0 - kProbClamp);
    const double y = target.values[i];
    r.loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    r.grad.values[i] = (p - y) / (p * (1.0 - p)) / n;
  }
  r.loss /= n;
  return r;
}

Array BceLogitGrad(const Array &probs, const Array &target) {
  const auto n = static_cast<double>(probs.size());
  Array g(probs.shape);
  for (std::size_t i = 0; i < probs.size(); ++i)
    g.values[i] = (probs.values[i] - target.values[i]) / n;
  return g;
}

void AdamStep(Parameter &p, const AdamConfig &cfg) {
  ++p.step_count;
  const double t = static_cast<double>(p.step_count);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  auto value = p.value.Vector().array();
  auto grad = p.grad.Vector().array();
  auto m = p.adam_m.Vector().array();
  auto v = p.adam_v.Vector().array();
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.square();
  value -= cfg.lr * (m / c1) / ((v / c2).sqrt() + cfg.eps);
  grad.setZero();
}

}  // namespace phonaug::nn
