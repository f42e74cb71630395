#pragma once

#include <span>

namespace dek {

/// Similarities are clamped into [kLogClamp, 1 - kLogClamp] before the logs.
inline constexpr double kLogClamp = 1e-12;

/// Mean binary cross-entropy: -(1/N) sum Y log K + (1 - Y) log(1 - K).
double classification_loss(std::span<const double> similarities, std::span<const double> targets);
/// Per-pair loss term and its derivative in K, (K - Y) / (K (1 - K)) on the
/// clamped K.
double classification_pair_loss(double similarity, double target);
double classification_loss_derivative(double similarity, double target);

/// exp(-gamma |y_i - y_j|).
double regression_target(double y_i, double y_j, double gamma);

/// Mean squared difference between similarities and targets.
double regression_loss(std::span<const double> similarities, std::span<const double> targets);
double regression_pair_loss(double similarity, double target);
double regression_loss_derivative(double similarity, double target);

}  // namespace dek
