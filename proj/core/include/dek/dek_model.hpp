#pragma once

// The deep embedding kernel: a shared-weight embedding network applied to
// both samples of a pair, a symmetric dimension-wise combine layer, and a
// kernel head that maps the combined vector to a scalar similarity.

#include <cstdint>
#include <string_view>

#include "dek/gram_matrix.hpp"
#include "dek/netcore.hpp"
#include "dek/types.hpp"

namespace dek {

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);

struct DekArchitecture {
  int input_dim = 0;
  int width_factor = 1;
  int embedding_layers = 2;      // k1, each of width k = width_factor * input_dim
  int kernel_hidden_layers = 2;  // k2, each of width 2k
  Task task = Task::classification;
  net::Activation hidden_activation = net::Activation::relu;
};

struct DekModel {
  net::MlpParams embedding;
  net::MlpParams kernel;
  int width_factor = 1;
  int input_dim = 0;
  Task task = Task::classification;

  /// k: width of every embedding layer.
  int embedding_width() const { return width_factor * input_dim; }
  int embedding_layer_count() const { return static_cast<int>(embedding.layers.size()); }
  int kernel_hidden_layer_count() const { return static_cast<int>(kernel.layers.size()) - 1; }

  /// Checks the k / 2k width rule, the single-unit head and the task's
  /// output activation. Throws ShapeError / ConfigError.
  void validate() const;
};

/// Fresh model with seeded uniform (Glorot-range) weights and zero biases.
/// Regression heads start with output bias 0.5 so the ReLU output is live.
DekModel make_dek_model(const DekArchitecture& arch, std::uint64_t seed);

/// [o_i * o_j, |o_i - o_j|], dimension-wise. Symmetric in its arguments.
Eigen::VectorXd combine(std::span<const double> o_i, std::span<const double> o_j);
void combine_into(std::span<const double> o_i, std::span<const double> o_j,
                  Eigen::VectorXd& out);

struct CombineGrads {
  Eigen::VectorXd grad_o_i;
  Eigen::VectorXd grad_o_j;
};

/// Chain rule through `combine`; |.| uses subgradient 0 at equality.
CombineGrads combine_backward(std::span<const double> o_i, std::span<const double> o_j,
                              std::span<const double> upstream_grad);

struct PairTrace {
  net::ForwardTrace branch_i;
  net::ForwardTrace branch_j;
  net::ForwardTrace head;  // head.activations[0] is the combined vector
  Eigen::VectorXd combined;
};

struct PairEvaluation {
  double similarity = 0.0;
  PairTrace trace;
};

PairEvaluation dek_forward(const DekModel& model, std::span<const double> x_i,
                           std::span<const double> x_j);
/// Allocation-free variant for hot loops; returns the similarity.
double dek_forward_into(const DekModel& model, std::span<const double> x_i,
                        std::span<const double> x_j, PairTrace& trace);
double similarity(const DekModel& model, std::span<const double> x_i,
                  std::span<const double> x_j);

struct DekGrads {
  net::MlpGrads embedding;
  net::MlpGrads kernel;

  static DekGrads zeros_like(const DekModel& model);
  void set_zero();
  DekGrads& operator+=(const DekGrads& other);
  DekGrads& operator*=(double factor);
  bool all_finite() const;
};

struct DekBackwardWorkspace {
  net::BackwardWorkspace net;
  Eigen::VectorXd combined_grad;
  Eigen::VectorXd grad_o_i;
  Eigen::VectorXd grad_o_j;
};

DekGrads dek_backward(const DekModel& model, const PairTrace& trace, double dl_dk);
/// Adds the pair's gradients into `acc`; both branch contributions land in
/// the shared embedding gradients.
void dek_backward_accumulate(const DekModel& model, const PairTrace& trace, double dl_dk,
                             DekGrads& acc, DekBackwardWorkspace& ws);

/// Plain gradient-descent step on both component networks.
void apply_update(DekModel& model, const DekGrads& grads, double learning_rate);

/// Embedding of every row of `samples`; one row per sample.
SampleMatrix embed_all(const DekModel& model, const SampleMatrix& samples);

/// Kernel head on two precomputed embeddings.
double head_similarity(const DekModel& model, std::span<const double> o_i,
                       std::span<const double> o_j, Eigen::VectorXd& combined,
                       net::ForwardTrace& scratch);

/// K(a_p, b_q) for every pair of rows.
GramMatrix gram(const DekModel& model, const SampleMatrix& a, const SampleMatrix& b);
/// K(x_p, x_q) over one set; exactly symmetric, flagged as such.
GramMatrix gram(const DekModel& model, const SampleMatrix& x);

}  // namespace dek
