#include "dek/rbf.hpp"

#include <algorithm>
#include <cmath>

#include "dek/error.hpp"
#include "dek/knn.hpp"
#include "dek/metrics.hpp"
#include "dek/random.hpp"

namespace dek {

namespace {

double squared_distance(const SampleMatrix& a, Eigen::Index p, const SampleMatrix& b, Eigen::Index q) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const double d = a(p, c) - b(q, c);
    s += d * d;
  }
  return s;
}

GramMatrix submatrix(const GramMatrix& g, const std::vector<std::size_t>& rows,
                     const std::vector<std::size_t>& cols, bool symmetric) {
  GramMatrix out;
  out.symmetric = symmetric;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          g(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
  return out;
}

}  // namespace

GramMatrix rbf_kernel(const SampleMatrix& a, const SampleMatrix& b, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("rbf gamma must be positive");
  if (a.rows() > 0 && b.rows() > 0 && a.cols() != b.cols()) {
    throw ShapeError("rbf: sample sets differ in dimension");
  }
  GramMatrix g;
  g.values.resize(a.rows(), b.rows());
  for (Eigen::Index p = 0; p < a.rows(); ++p)
    for (Eigen::Index q = 0; q < b.rows(); ++q)
      g.values(p, q) = std::exp(-gamma * squared_distance(a, p, b, q));
  return g;
}

GramMatrix rbf_kernel(const SampleMatrix& x, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("rbf gamma must be positive");
  GramMatrix g;
  g.symmetric = true;
  g.values.resize(x.rows(), x.rows());
  for (Eigen::Index p = 0; p < x.rows(); ++p) {
    g.values(p, p) = 1.0;
    for (Eigen::Index q = p + 1; q < x.rows(); ++q) {
      const double v = std::exp(-gamma * squared_distance(x, p, x, q));
      g.values(p, q) = v;
      g.values(q, p) = v;
    }
  }
  return g;
}

GridSearchResult rbf_grid_search(const Dataset& data, std::span<const double> gamma_grid,
                                 std::span<const double> c_grid, const GridSearchOptions& options) {
  if (gamma_grid.empty() || c_grid.empty()) throw ConfigError("grid search needs non-empty grids");
  if (options.folds < 2) throw ConfigError("grid search needs at least 2 folds");
  if (data.size() < static_cast<std::size_t>(options.folds)) {
    throw DataError("fewer samples than folds");
  }
  const bool classification = data.task == Task::classification;

  std::vector<std::size_t> order(data.size());
  for (std::size_t r = 0; r < order.size(); ++r) order[r] = r;
  Rng rng(options.seed);
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> fold_rows(static_cast<std::size_t>(options.folds));
  for (std::size_t r = 0; r < order.size(); ++r)
    fold_rows[r % fold_rows.size()].push_back(order[r]);
  for (auto& f : fold_rows) std::sort(f.begin(), f.end());

  GridSearchResult result;
  bool have_best = false;
  for (double gamma : gamma_grid) {
    const GramMatrix full = rbf_kernel(data.features, gamma);
    const std::size_t c_count = classification ? c_grid.size() : 1;
    for (std::size_t ci = 0; ci < c_count; ++ci) {
      const double C = c_grid[ci];
      GridCell cell{gamma, C, 0.0, 0};
      double score_sum = 0.0;
      for (std::size_t f = 0; f < fold_rows.size(); ++f) {
        std::vector<std::size_t> train_rows;
        for (std::size_t g = 0; g < fold_rows.size(); ++g)
          if (g != f) train_rows.insert(train_rows.end(), fold_rows[g].begin(), fold_rows[g].end());
        std::sort(train_rows.begin(), train_rows.end());
        const auto& held = fold_rows[f];
        const GramMatrix train_gram = submatrix(full, train_rows, train_rows, true);
        const GramMatrix cross = submatrix(full, held, train_rows, false);
        if (classification) {
          std::vector<int> train_labels;
          std::vector<int> held_labels;
          for (auto r : train_rows) train_labels.push_back(data.labels[r]);
          for (auto r : held) held_labels.push_back(data.labels[r]);
          const int first = train_labels.front();
          if (std::all_of(train_labels.begin(), train_labels.end(), [&](int l) { return l == first; })) {
            if (gamma == gamma_grid.front() && ci == 0) {
              result.warnings.push_back("fold " + std::to_string(f) + " has a single class; skipped");
            }
            continue;
          }
          const SvmModel svm = svm_fit(train_gram, train_labels, {C, options.smo.tol, options.smo.max_passes});
          score_sum += metric_accuracy(svm_predict(svm, cross), held_labels);
        } else {
          std::vector<double> train_targets;
          std::vector<double> held_targets;
          for (auto r : train_rows) train_targets.push_back(data.targets[r]);
          for (auto r : held) held_targets.push_back(data.targets[r]);
          const int k = std::min<int>(options.knn_k, static_cast<int>(train_rows.size()));
          score_sum += metric_r2(knn_regress_all(cross, train_targets, k), held_targets);
        }
        ++cell.folds_used;
      }
      if (cell.folds_used == 0) continue;
      cell.score = score_sum / cell.folds_used;
      result.cells.push_back(cell);
      if (!have_best || cell.score > result.score) {
        have_best = true;
        result.gamma = cell.gamma;
        result.C = cell.C;
        result.score = cell.score;
      }
    }
  }
  if (!have_best) throw DataError("grid search: every fold was degenerate");
  return result;
}

}  // namespace dek
