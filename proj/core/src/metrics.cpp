#include "dek/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dek/error.hpp"

namespace dek {

double metric_accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.empty()) throw DataError("accuracy of an empty prediction list");
  if (pred.size() != truth.size()) throw ShapeError("accuracy: prediction and truth lengths differ");
  std::size_t hits = 0;
  for (std::size_t p = 0; p < pred.size(); ++p) hits += pred[p] == truth[p];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double metric_r2(std::span<const double> pred, std::span<const double> truth) {
  if (pred.empty()) throw DataError("R^2 of an empty prediction list");
  if (pred.size() != truth.size()) throw ShapeError("R^2: prediction and truth lengths differ");
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= static_cast<double>(truth.size());
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t p = 0; p < truth.size(); ++p) {
    ss_tot += (truth[p] - mean) * (truth[p] - mean);
    ss_res += (truth[p] - pred[p]) * (truth[p] - pred[p]);
  }
  if (ss_tot == 0.0) throw DataError("R^2 undefined for constant truth");
  return 1.0 - ss_res / ss_tot;
}

double silhouette_score(const Eigen::MatrixXd& points, std::span<const int> labels) {
  const Eigen::Index n = points.rows();
  if (n != static_cast<Eigen::Index>(labels.size())) throw ShapeError("silhouette: label count mismatch");
  int classes = 0;
  for (int l : labels) {
    if (l < 0) throw DataError("silhouette: negative label");
    classes = std::max(classes, l + 1);
  }
  std::vector<std::size_t> size(static_cast<std::size_t>(classes), 0);
  for (int l : labels) ++size[static_cast<std::size_t>(l)];
  if (std::count_if(size.begin(), size.end(), [](std::size_t s) { return s > 0; }) < 2) {
    throw DataError("silhouette needs at least two clusters");
  }

  double total = 0.0;
  std::vector<double> dist_sum(static_cast<std::size_t>(classes));
  for (Eigen::Index p = 0; p < n; ++p) {
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    for (Eigen::Index q = 0; q < n; ++q) {
      if (q == p) continue;
      dist_sum[static_cast<std::size_t>(labels[static_cast<std::size_t>(q)])] +=
          (points.row(p) - points.row(q)).norm();
    }
    const auto own = static_cast<std::size_t>(labels[static_cast<std::size_t>(p)]);
    if (size[own] <= 1) continue;
    const double a = dist_sum[own] / static_cast<double>(size[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < size.size(); ++c)
      if (c != own && size[c] > 0) b = std::min(b, dist_sum[c] / static_cast<double>(size[c]));
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

}  // namespace dek
