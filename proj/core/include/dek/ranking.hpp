#pragma once

// Retrieval-style evaluation: every query ranks all references by
// descending similarity and the precision-recall curves are averaged.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dek/gram_matrix.hpp"

namespace dek {

inline constexpr int kRecallGridPoints = 20;  // 0.05, 0.10, ..., 1.00

struct PrCurve {
  std::vector<double> recall;
  std::vector<double> precision;  // mean over the queries used
  std::size_t queries_used = 0;
  std::size_t queries_skipped = 0;  // no same-class reference
};

/// References ordered by descending similarity, ties by ascending index.
std::vector<std::size_t> rank_references(std::span<const double> gram_row);

/// Interpolated precision at each grid recall r: precision of the shortest
/// ranked prefix that reaches recall r, averaged over queries.
PrCurve rank_and_pr_curve(const GramMatrix& gram, std::span<const int> query_labels,
                          std::span<const int> reference_labels);

/// Header "recall,precision".
void write_pr_csv(const PrCurve& curve, std::ostream& out);
void write_pr_csv(const PrCurve& curve, const std::string& path);

}  // namespace dek
