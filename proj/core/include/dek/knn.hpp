#pragma once

#include <span>
#include <vector>

#include "dek/gram_matrix.hpp"

namespace dek {

/// Indices of the k largest entries of a kernel row (most similar first;
/// equal similarities ordered by ascending index).
std::vector<std::size_t> most_similar(std::span<const double> gram_row, std::size_t k);

/// Majority class of the k most similar training samples. Vote ties go to
/// the tied class whose best neighbor ranks highest.
int knn_classify(std::span<const double> gram_row, std::span<const int> train_labels, int k);

/// Mean target of the k most similar training samples; with
/// `kernel_weighted`, the similarity-weighted mean (falls back to the plain
/// mean when all k similarities are zero).
double knn_regress(std::span<const double> gram_row, std::span<const double> train_targets, int k,
                   bool kernel_weighted = false);

/// Row-wise application over a queries x training Gram block.
std::vector<int> knn_classify_all(const GramMatrix& cross, std::span<const int> train_labels, int k);
std::vector<double> knn_regress_all(const GramMatrix& cross, std::span<const double> train_targets,
                                    int k, bool kernel_weighted = false);

}  // namespace dek
