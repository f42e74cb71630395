#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dek/dataset.hpp"
#include "dek/gram_matrix.hpp"
#include "dek/svm.hpp"

namespace dek {

/// exp(-gamma ||a_p - b_q||^2).
GramMatrix rbf_kernel(const SampleMatrix& a, const SampleMatrix& b, double gamma);
/// Same set on both sides; exactly symmetric and flagged.
GramMatrix rbf_kernel(const SampleMatrix& x, double gamma);

struct GridCell {
  double gamma = 0.0;
  double C = 0.0;
  double score = 0.0;  // mean cross-validated accuracy (or R^2)
  int folds_used = 0;
};

struct GridSearchOptions {
  int folds = 3;
  std::uint64_t seed = 0;
  int knn_k = 5;  // regression scoring uses KNN/RBF
  SmoOptions smo;
};

struct GridSearchResult {
  double gamma = 0.0;
  double C = 0.0;
  double score = 0.0;
  std::vector<GridCell> cells;
  std::vector<std::string> warnings;
};

/// k-fold cross-validated search over gamma x C on the given (training) data
/// only. Classification scores SVM/RBF accuracy; regression scores KNN/RBF
/// R^2 and ignores C. Ties keep the first cell in grid order (gamma-major).
/// Folds whose training part holds a single class are skipped with a warning.
GridSearchResult rbf_grid_search(const Dataset& data, std::span<const double> gamma_grid,
                                 std::span<const double> c_grid, const GridSearchOptions& options);

}  // namespace dek
