#pragma once

// Training-pair generation: exhaustive pairing and kernel-ranked local
// pairing at a recall level.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dek/dek_model.hpp"
#include "dek/gram_matrix.hpp"

namespace dek {

struct IndexPair {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

struct PairBatch {
  std::vector<IndexPair> pairs;
  std::vector<double> targets;  // aligned with pairs

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }

  /// Checks i != j, no duplicate unordered pairs, aligned targets, and the
  /// target range for the task ({0,1} or [0,1]).
  void validate(Task task) const;
};

/// All n(n-1)/2 unordered pairs (i < j, lexicographic), target 1 iff the
/// labels agree.
PairBatch make_pairs_full(std::span<const int> labels);

/// All unordered pairs with target exp(-gamma |y_i - y_j|).
PairBatch make_pairs_full_regression(std::span<const double> targets, double gamma);

struct LocalPairingOptions {
  double recall_level = 0.1;
  /// 0 keeps every pair in a neighborhood; otherwise at most this many pairs
  /// per reference, taken in rank order.
  std::size_t max_pairs_per_reference = 0;
};

/// Local pairing over a precomputed symmetric kernel. For each reference r,
/// the other samples are ranked by descending K(r, .) (ties: ascending
/// index); the neighborhood is the shortest prefix holding
/// ceil(recall_level * same_class_count) same-class samples. A reference with
/// no same-class partner takes the top ceil(recall_level * (n - 1)) samples.
/// Pairs (r, s) are emitted in rank order, duplicates (as unordered pairs)
/// dropped keeping the first occurrence.
PairBatch make_pairs_local(const GramMatrix& kernel, std::span<const int> labels,
                           const LocalPairingOptions& options);

/// Local pairing with the kernel computed by `model` over `samples`.
PairBatch make_pairs_local(const DekModel& model, const SampleMatrix& samples,
                           std::span<const int> labels, const LocalPairingOptions& options);

/// Delimited dump: header "i,j,target".
void write_pairs_csv(const PairBatch& batch, std::ostream& out);
void write_pairs_csv(const PairBatch& batch, const std::string& path);

}  // namespace dek
