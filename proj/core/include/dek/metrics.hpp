#pragma once

#include <Eigen/Core>
#include <span>

namespace dek {

/// Fraction of positions where pred == truth.
double metric_accuracy(std::span<const int> pred, std::span<const int> truth);

/// 1 - SS_res / SS_tot. Throws DataError when truth is constant.
double metric_r2(std::span<const double> pred, std::span<const double> truth);

/// Mean silhouette coefficient of labelled points under Euclidean distance.
/// Points alone in their cluster score 0.
double silhouette_score(const Eigen::MatrixXd& points, std::span<const int> labels);

}  // namespace dek
