#include "dek/netcore.hpp"

#include <cmath>
#include <string>

#include "dek/error.hpp"
#include "dek/random.hpp"

namespace dek::net {

namespace {

// z = W x + b. Column-major axpy form: every output element accumulates its
// terms in ascending input index, independent of anything else in flight.
void affine(const Matrix& w, const Vector& b, std::span<const double> x, Vector& z) {
  const Eigen::Index rows = w.rows();
  z.resize(rows);
  double* zp = z.data();
  const double* bp = b.data();
  for (Eigen::Index i = 0; i < rows; ++i) zp[i] = bp[i];
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    const double xj = x[static_cast<std::size_t>(j)];
    if (xj == 0.0) continue;
    const double* col = w.data() + j * rows;
    for (Eigen::Index i = 0; i < rows; ++i) zp[i] += col[i] * xj;
  }
}

double apply_one(Activation kind, double z) {
  switch (kind) {
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::tanh: return std::tanh(z);
    case Activation::identity: return z;
  }
  return z;
}

// d act / d z, expressed through the pre-activation z and the output a.
double derivative_one(Activation kind, double z, double a) {
  switch (kind) {
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: return a * (1.0 - a);
    case Activation::tanh: return 1.0 - a * a;
    case Activation::identity: return 1.0;
  }
  return 1.0;
}

void apply_into(Activation kind, const Vector& z, Vector& out, std::size_t layer) {
  out.resize(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i])) {
      throw DomainError("non-finite pre-activation in layer " + std::to_string(layer));
    }
    out[i] = apply_one(kind, z[i]);
  }
}

Activation layer_activation(const MlpParams& params, std::size_t layer) {
  return layer + 1 == params.layers.size() ? params.output_activation
                                           : params.hidden_activation;
}

void check_trace(const MlpParams& params, const ForwardTrace& trace) {
  const std::size_t n = params.layers.size();
  if (trace.pre_activations.size() != n || trace.activations.size() != n + 1) {
    throw ShapeError("forward trace has " + std::to_string(trace.pre_activations.size()) +
                     " layers, network has " + std::to_string(n));
  }
  for (std::size_t l = 0; l < n; ++l) {
    const auto& layer = params.layers[l];
    if (trace.activations[l].size() != layer.in_dim() ||
        trace.pre_activations[l].size() != layer.out_dim()) {
      throw ShapeError("forward trace does not match layer " + std::to_string(l));
    }
  }
}

}  // namespace

std::string_view to_string(Activation kind) {
  switch (kind) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
  }
  return "identity";
}

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  if (name == "identity") return Activation::identity;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

Eigen::Index MlpParams::input_dim() const {
  return layers.empty() ? 0 : layers.front().in_dim();
}

Eigen::Index MlpParams::output_dim() const {
  return layers.empty() ? 0 : layers.back().out_dim();
}

std::size_t MlpParams::parameter_count() const {
  std::size_t count = 0;
  for (const auto& l : layers) count += static_cast<std::size_t>(l.weights.size() + l.biases.size());
  return count;
}

void MlpParams::validate() const {
  if (layers.empty()) throw ShapeError("network has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.weights.rows() != layer.biases.size()) {
      throw ShapeError("layer " + std::to_string(l) + ": weights have " +
                       std::to_string(layer.weights.rows()) + " rows but " +
                       std::to_string(layer.biases.size()) + " biases");
    }
    if (layer.weights.rows() == 0 || layer.weights.cols() == 0) {
      throw ShapeError("layer " + std::to_string(l) + " is empty");
    }
    if (l > 0 && layers[l - 1].out_dim() != layer.in_dim()) {
      throw ShapeError("layer " + std::to_string(l) + " expects " +
                       std::to_string(layer.in_dim()) + " inputs, previous layer gives " +
                       std::to_string(layers[l - 1].out_dim()));
    }
  }
}

MlpGrads MlpGrads::zeros_like(const MlpParams& params) {
  MlpGrads g;
  g.layers.reserve(params.layers.size());
  for (const auto& l : params.layers) {
    g.layers.push_back({Matrix::Zero(l.weights.rows(), l.weights.cols()),
                        Vector::Zero(l.biases.size())});
  }
  return g;
}

void MlpGrads::set_zero() {
  for (auto& l : layers) {
    l.weights.setZero();
    l.biases.setZero();
  }
}

MlpGrads& MlpGrads::operator+=(const MlpGrads& other) {
  if (other.layers.size() != layers.size()) throw ShapeError("gradient layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].weights.rows() != other.layers[l].weights.rows() ||
        layers[l].weights.cols() != other.layers[l].weights.cols()) {
      throw ShapeError("gradient shape mismatch in layer " + std::to_string(l));
    }
    layers[l].weights += other.layers[l].weights;
    layers[l].biases += other.layers[l].biases;
  }
  return *this;
}

MlpGrads& MlpGrads::operator*=(double factor) {
  for (auto& l : layers) {
    l.weights *= factor;
    l.biases *= factor;
  }
  return *this;
}

bool MlpGrads::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weights.allFinite() || !l.biases.allFinite()) return false;
  }
  return true;
}

Vector activate(Activation kind, const Vector& z) {
  Vector out;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i])) {
      throw DomainError("activate: non-finite input at index " + std::to_string(i));
    }
  }
  out.resize(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = apply_one(kind, z[i]);
  return out;
}

void mlp_forward_into(const MlpParams& params, std::span<const double> input,
                      ForwardTrace& trace) {
  const std::size_t n = params.layers.size();
  if (n == 0) throw ShapeError("network has no layers");
  if (static_cast<Eigen::Index>(input.size()) != params.input_dim()) {
    throw ShapeError("layer 0 expects " + std::to_string(params.input_dim()) +
                     " inputs, got " + std::to_string(input.size()));
  }
  trace.pre_activations.resize(n);
  trace.activations.resize(n + 1);
  trace.activations[0] = Eigen::Map<const Vector>(input.data(), static_cast<Eigen::Index>(input.size()));
  for (std::size_t l = 0; l < n; ++l) {
    const auto& layer = params.layers[l];
    if (layer.in_dim() != trace.activations[l].size()) {
      throw ShapeError("layer " + std::to_string(l) + " expects " +
                       std::to_string(layer.in_dim()) + " inputs, got " +
                       std::to_string(trace.activations[l].size()));
    }
    const Vector& x = trace.activations[l];
    affine(layer.weights, layer.biases, {x.data(), static_cast<std::size_t>(x.size())},
           trace.pre_activations[l]);
    apply_into(layer_activation(params, l), trace.pre_activations[l], trace.activations[l + 1], l);
  }
}

ForwardTrace mlp_forward(const MlpParams& params, std::span<const double> input) {
  ForwardTrace trace;
  mlp_forward_into(params, input, trace);
  return trace;
}

void mlp_backward_accumulate(const MlpParams& params, const ForwardTrace& trace,
                             std::span<const double> output_grad, MlpGrads& acc,
                             Vector* input_grad, BackwardWorkspace& ws) {
  check_trace(params, trace);
  const std::size_t n = params.layers.size();
  if (acc.layers.size() != n) throw ShapeError("gradient accumulator does not match network");
  if (static_cast<Eigen::Index>(output_grad.size()) != params.output_dim()) {
    throw ShapeError("output gradient has length " + std::to_string(output_grad.size()) +
                     ", network output has " + std::to_string(params.output_dim()));
  }

  ws.delta = Eigen::Map<const Vector>(output_grad.data(), static_cast<Eigen::Index>(output_grad.size()));
  for (std::size_t l = n; l-- > 0;) {
    const auto& layer = params.layers[l];
    const Vector& z = trace.pre_activations[l];
    const Vector& a = trace.activations[l + 1];
    const Vector& x = trace.activations[l];
    const Activation kind = layer_activation(params, l);
    const Eigen::Index rows = layer.out_dim();
    const Eigen::Index cols = layer.in_dim();

    double* d = ws.delta.data();
    for (Eigen::Index i = 0; i < rows; ++i) d[i] *= derivative_one(kind, z[i], a[i]);

    auto& g = acc.layers[l];
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double xj = x[j];
      if (xj == 0.0) continue;
      double* gcol = g.weights.data() + j * rows;
      for (Eigen::Index i = 0; i < rows; ++i) gcol[i] += d[i] * xj;
    }
    double* gb = g.biases.data();
    for (Eigen::Index i = 0; i < rows; ++i) gb[i] += d[i];

    if (l == 0 && input_grad == nullptr) break;
    ws.next_delta.resize(cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double* wcol = layer.weights.data() + j * rows;
      double s = 0.0;
      for (Eigen::Index i = 0; i < rows; ++i) s += wcol[i] * d[i];
      ws.next_delta[j] = s;
    }
    std::swap(ws.delta, ws.next_delta);
  }
  if (input_grad != nullptr) *input_grad = ws.delta;
}

BackwardResult mlp_backward(const MlpParams& params, const ForwardTrace& trace,
                            std::span<const double> output_grad) {
  BackwardResult result{MlpGrads::zeros_like(params), Vector()};
  BackwardWorkspace ws;
  mlp_backward_accumulate(params, trace, output_grad, result.grads, &result.input_grad, ws);
  return result;
}

void sgd_update_in_place(MlpParams& params, const MlpGrads& grads, double learning_rate) {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw DomainError("learning rate must be finite and non-negative");
  }
  if (grads.layers.size() != params.layers.size()) {
    throw ShapeError("gradient has " + std::to_string(grads.layers.size()) +
                     " layers, network has " + std::to_string(params.layers.size()));
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& g = grads.layers[l];
    const auto& p = params.layers[l];
    if (g.weights.rows() != p.weights.rows() || g.weights.cols() != p.weights.cols() ||
        g.biases.size() != p.biases.size()) {
      throw ShapeError("gradient shape mismatch in layer " + std::to_string(l));
    }
  }
  if (!grads.all_finite()) throw DomainError("non-finite gradient; update aborted");
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    params.layers[l].weights -= learning_rate * grads.layers[l].weights;
    params.layers[l].biases -= learning_rate * grads.layers[l].biases;
  }
}

MlpParams sgd_update(MlpParams params, const MlpGrads& grads, double learning_rate) {
  sgd_update_in_place(params, grads, learning_rate);
  return params;
}

MlpParams init_mlp(std::span<const int> widths, Activation hidden, Activation output,
                   Rng& rng) {
  if (widths.size() < 2) throw ShapeError("a network needs at least an input and an output width");
  MlpParams params;
  params.hidden_activation = hidden;
  params.output_activation = output;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int fan_in = widths[l];
    const int fan_out = widths[l + 1];
    if (fan_in <= 0 || fan_out <= 0) throw ShapeError("layer widths must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    LayerParams layer{Matrix(fan_out, fan_in), Vector::Zero(fan_out)};
    // Row-major draw order so the stream matches the serialized layout.
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) layer.weights(r, c) = rng.uniform(-limit, limit);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

}  // namespace dek::net
