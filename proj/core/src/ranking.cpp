#include "dek/ranking.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>

#include "dek/error.hpp"

namespace dek {

std::vector<std::size_t> rank_references(std::span<const double> gram_row) {
  std::vector<std::size_t> order(gram_row.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gram_row[a] > gram_row[b]; });
  return order;
}

PrCurve rank_and_pr_curve(const GramMatrix& gram, std::span<const int> query_labels,
                          std::span<const int> reference_labels) {
  if (gram.rows() == 0 || gram.cols() == 0) throw DataError("ranking needs queries and references");
  if (gram.rows() != static_cast<Eigen::Index>(query_labels.size()) ||
      gram.cols() != static_cast<Eigen::Index>(reference_labels.size())) {
    throw ShapeError("ranking: gram is " + std::to_string(gram.rows()) + "x" +
                     std::to_string(gram.cols()) + ", labels are " +
                     std::to_string(query_labels.size()) + " and " +
                     std::to_string(reference_labels.size()));
  }
  PrCurve curve;
  curve.precision.assign(kRecallGridPoints, 0.0);
  for (int g = 1; g <= kRecallGridPoints; ++g) curve.recall.push_back(g / double(kRecallGridPoints));

  std::vector<double> row(reference_labels.size());
  for (Eigen::Index p = 0; p < gram.rows(); ++p) {
    const int label = query_labels[static_cast<std::size_t>(p)];
    const auto positives = static_cast<std::size_t>(
        std::count(reference_labels.begin(), reference_labels.end(), label));
    if (positives == 0) {
      ++curve.queries_skipped;
      continue;
    }
    for (std::size_t q = 0; q < row.size(); ++q) row[q] = gram(p, static_cast<Eigen::Index>(q));
    const auto order = rank_references(row);

    std::size_t hits = 0;
    std::size_t rank = 0;
    for (int g = 1; g <= kRecallGridPoints; ++g) {
      // ceil(g / 20 * positives) in integer arithmetic.
      const std::size_t needed = (static_cast<std::size_t>(g) * positives + kRecallGridPoints - 1) /
                                 kRecallGridPoints;
      while (hits < needed) {
        if (reference_labels[order[rank]] == label) ++hits;
        ++rank;
      }
      curve.precision[static_cast<std::size_t>(g - 1)] +=
          static_cast<double>(hits) / static_cast<double>(rank);
    }
    ++curve.queries_used;
  }
  if (curve.queries_used == 0) throw DataError("no query has a same-class reference");
  for (auto& v : curve.precision) v /= static_cast<double>(curve.queries_used);
  return curve;
}

void write_pr_csv(const PrCurve& curve, std::ostream& out) {
  out << "recall,precision\n";
  for (std::size_t g = 0; g < curve.recall.size(); ++g) {
    out << format_double(curve.recall[g]) << ',' << format_double(curve.precision[g]) << '\n';
  }
}

void write_pr_csv(const PrCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_pr_csv(curve, out);
}

}  // namespace dek
