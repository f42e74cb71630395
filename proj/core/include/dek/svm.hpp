#pragma once

// Soft-margin SVM over a precomputed kernel, trained with sequential minimal
// optimization; multiclass through one-vs-rest.

#include <span>
#include <vector>

#include "dek/gram_matrix.hpp"

namespace dek {

struct SmoOptions {
  double C = 1.0;
  double tol = 1e-3;
  /// Iteration cap in passes; one pass is n pair updates.
  int max_passes = 10000;
};

struct BinarySvm {
  std::vector<double> alpha;           // one per training sample
  std::vector<double> dual_coefs;      // alpha_p * y_p, support samples only
  std::vector<std::size_t> support_indices;
  double bias = 0.0;
  double C = 1.0;
  bool converged = false;
  std::size_t iterations = 0;
  double max_violation = 0.0;  // final m(alpha) - M(alpha)

  /// sum_p dual_coefs[p] * kernel_row[support_indices[p]] + bias, where
  /// kernel_row holds K(query, training sample) for every training sample.
  double decision(std::span<const double> kernel_row) const;
};

/// Labels are -1 / +1 and both must be present. Stops when the maximal KKT
/// violation falls below tol or at the iteration cap (converged = false).
BinarySvm smo_train(const GramMatrix& gram, std::span<const int> labels, const SmoOptions& options);

/// sum(alpha) - 1/2 sum_pq alpha_p alpha_q y_p y_q K_pq.
double dual_objective(const GramMatrix& gram, std::span<const int> labels,
                      std::span<const double> alpha);

struct SvmModel {
  std::vector<int> classes;       // class index per head
  std::vector<BinarySvm> heads;   // head c separates classes[c] (+1) from the rest (-1)
};

/// One-vs-rest over class labels 0..C-1 (at least two present).
SvmModel svm_fit(const GramMatrix& gram, std::span<const int> labels, const SmoOptions& options);

/// queries x heads matrix of decision values.
Eigen::MatrixXd svm_decision_values(const SvmModel& model, const GramMatrix& cross_gram);

/// argmax over heads, ties to the lowest class index.
std::vector<int> svm_predict(const SvmModel& model, const GramMatrix& cross_gram);

}  // namespace dek
