#pragma once

// Dense feed-forward networks with exact backpropagation and plain
// gradient-descent updates. Both DEK component networks are built on this.

#include <Eigen/Core>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dek {
class Rng;
}

namespace dek::net {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Activation { relu, sigmoid, tanh, identity };

std::string_view to_string(Activation kind);
Activation activation_from_string(std::string_view name);

struct LayerParams {
  Matrix weights;  // out_dim x in_dim
  Vector biases;   // out_dim

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
};

struct MlpParams {
  std::vector<LayerParams> layers;
  Activation hidden_activation = Activation::relu;
  Activation output_activation = Activation::identity;

  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;
  std::size_t parameter_count() const;

  /// Throws ShapeError if the layer list is empty, a layer's weights and
  /// biases disagree, or consecutive layers do not chain.
  void validate() const;
};

/// Gradients share the parameter layout; activations are irrelevant.
struct MlpGrads {
  std::vector<LayerParams> layers;

  static MlpGrads zeros_like(const MlpParams& params);
  void set_zero();
  MlpGrads& operator+=(const MlpGrads& other);
  MlpGrads& operator*=(double factor);
  bool all_finite() const;
};

/// Per-layer values kept for backpropagation. activations[0] is the input;
/// activations[l + 1] = act(pre_activations[l]).
struct ForwardTrace {
  std::vector<Vector> pre_activations;
  std::vector<Vector> activations;

  const Vector& output() const { return activations.back(); }
};

Vector activate(Activation kind, const Vector& z);

ForwardTrace mlp_forward(const MlpParams& params, std::span<const double> input);
/// Same as mlp_forward but reuses the buffers already held by `trace`.
void mlp_forward_into(const MlpParams& params, std::span<const double> input,
                      ForwardTrace& trace);

struct BackwardResult {
  MlpGrads grads;
  Vector input_grad;
};

BackwardResult mlp_backward(const MlpParams& params, const ForwardTrace& trace,
                            std::span<const double> output_grad);

// Scratch buffers for the allocation-free backward pass.
struct BackwardWorkspace {
  Vector delta;
  Vector next_delta;
};

/// Adds this sample's parameter gradients into `acc` and, when `input_grad`
/// is non-null, writes dL/d(input) into it.
void mlp_backward_accumulate(const MlpParams& params, const ForwardTrace& trace,
                             std::span<const double> output_grad, MlpGrads& acc,
                             Vector* input_grad, BackwardWorkspace& ws);

/// p <- p - learning_rate * grad(p). Throws DomainError (leaving nothing
/// modified) when any gradient entry is non-finite.
MlpParams sgd_update(MlpParams params, const MlpGrads& grads, double learning_rate);
void sgd_update_in_place(MlpParams& params, const MlpGrads& grads, double learning_rate);

/// Layer widths [in, h1, ..., out]; weights uniform in
/// +-sqrt(6 / (fan_in + fan_out)), biases zero.
MlpParams init_mlp(std::span<const int> widths, Activation hidden, Activation output,
                   Rng& rng);

}  // namespace dek::net
