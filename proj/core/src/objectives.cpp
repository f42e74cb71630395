#include "dek/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dek/error.hpp"

namespace dek {

namespace {

void check_batch(std::span<const double> a, std::span<const double> b) {
  if (a.empty()) throw DataError("loss over an empty batch");
  if (a.size() != b.size()) {
    throw ShapeError("loss: " + std::to_string(a.size()) + " similarities vs " +
                     std::to_string(b.size()) + " targets");
  }
}

double clamp_k(double k) { return std::clamp(k, kLogClamp, 1.0 - kLogClamp); }

}  // namespace

double classification_pair_loss(double similarity, double target) {
  const double k = clamp_k(similarity);
  return -(target * std::log(k) + (1.0 - target) * std::log(1.0 - k));
}

double classification_loss_derivative(double similarity, double target) {
  const double k = clamp_k(similarity);
  return (k - target) / (k * (1.0 - k));
}

double classification_loss(std::span<const double> similarities, std::span<const double> targets) {
  check_batch(similarities, targets);
  double sum = 0.0;
  for (std::size_t p = 0; p < similarities.size(); ++p)
    sum += classification_pair_loss(similarities[p], targets[p]);
  return sum / static_cast<double>(similarities.size());
}

double regression_target(double y_i, double y_j, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  return std::exp(-gamma * std::fabs(y_i - y_j));
}

double regression_pair_loss(double similarity, double target) {
  const double d = similarity - target;
  return d * d;
}

double regression_loss_derivative(double similarity, double target) {
  return 2.0 * (similarity - target);
}

double regression_loss(std::span<const double> similarities, std::span<const double> targets) {
  check_batch(similarities, targets);
  double sum = 0.0;
  for (std::size_t p = 0; p < similarities.size(); ++p)
    sum += regression_pair_loss(similarities[p], targets[p]);
  return sum / static_cast<double>(similarities.size());
}

}  // namespace dek
