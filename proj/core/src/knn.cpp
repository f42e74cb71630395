#include "dek/knn.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "dek/error.hpp"

namespace dek {

namespace {

void check_args(std::size_t row, std::size_t labels, int k) {
  if (row == 0) throw DataError("knn: empty kernel row");
  if (k <= 0) throw ConfigError("knn: k must be positive");
  if (row != labels) {
    throw ShapeError("knn: kernel row has " + std::to_string(row) + " entries, " +
                     std::to_string(labels) + " training targets");
  }
  if (static_cast<std::size_t>(k) > row) {
    throw ConfigError("knn: k = " + std::to_string(k) + " exceeds " + std::to_string(row) +
                      " training samples");
  }
}

}  // namespace

std::vector<std::size_t> most_similar(std::span<const double> gram_row, std::size_t k) {
  std::vector<std::size_t> idx(gram_row.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (gram_row[a] != gram_row[b]) return gram_row[a] > gram_row[b];
                      return a < b;
                    });
  idx.resize(k);
  return idx;
}

int knn_classify(std::span<const double> gram_row, std::span<const int> train_labels, int k) {
  check_args(gram_row.size(), train_labels.size(), k);
  const auto nearest = most_similar(gram_row, static_cast<std::size_t>(k));
  std::vector<int> votes;
  std::vector<std::size_t> first_rank;
  for (std::size_t rank = 0; rank < nearest.size(); ++rank) {
    const int label = train_labels[nearest[rank]];
    if (label < 0) throw DataError("knn: negative class label");
    if (static_cast<std::size_t>(label) >= votes.size()) {
      votes.resize(label + 1, 0);
      first_rank.resize(label + 1, nearest.size());
    }
    ++votes[label];
    first_rank[label] = std::min(first_rank[label], rank);
  }
  int best = -1;
  for (int c = 0; c < static_cast<int>(votes.size()); ++c) {
    if (votes[c] == 0) continue;
    if (best < 0 || votes[c] > votes[best] ||
        (votes[c] == votes[best] && first_rank[c] < first_rank[best])) {
      best = c;
    }
  }
  return best;
}

double knn_regress(std::span<const double> gram_row, std::span<const double> train_targets, int k,
                   bool kernel_weighted) {
  check_args(gram_row.size(), train_targets.size(), k);
  const auto nearest = most_similar(gram_row, static_cast<std::size_t>(k));
  double plain = 0.0;
  double weighted = 0.0;
  double weight = 0.0;
  for (std::size_t idx : nearest) {
    plain += train_targets[idx];
    weighted += gram_row[idx] * train_targets[idx];
    weight += gram_row[idx];
  }
  if (kernel_weighted && weight > 0.0) return weighted / weight;
  return plain / static_cast<double>(nearest.size());
}

std::vector<int> knn_classify_all(const GramMatrix& cross, std::span<const int> train_labels, int k) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(cross.rows()));
  std::vector<double> row(static_cast<std::size_t>(cross.cols()));
  for (Eigen::Index p = 0; p < cross.rows(); ++p) {
    for (Eigen::Index q = 0; q < cross.cols(); ++q) row[static_cast<std::size_t>(q)] = cross(p, q);
    out.push_back(knn_classify(row, train_labels, k));
  }
  return out;
}

std::vector<double> knn_regress_all(const GramMatrix& cross, std::span<const double> train_targets,
                                    int k, bool kernel_weighted) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(cross.rows()));
  std::vector<double> row(static_cast<std::size_t>(cross.cols()));
  for (Eigen::Index p = 0; p < cross.rows(); ++p) {
    for (Eigen::Index q = 0; q < cross.cols(); ++q) row[static_cast<std::size_t>(q)] = cross(p, q);
    out.push_back(knn_regress(row, train_targets, k, kernel_weighted));
  }
  return out;
}

}  // namespace dek
