#include "dek/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "dek/error.hpp"
#include "dek/objectives.hpp"

namespace dek {

namespace {

std::uint64_t unordered_key(std::size_t a, std::size_t b) {
  const std::uint64_t lo = std::min(a, b);
  const std::uint64_t hi = std::max(a, b);
  return (hi << 32) | lo;
}

// ceil(fraction * count) without being tripped up by 0.1 * 30 = 3.0000000000000004.
std::size_t fraction_ceil(double fraction, std::size_t count) {
  const double raw = fraction * static_cast<double>(count);
  const double eps = 1e-9 * std::max(1.0, raw);
  return static_cast<std::size_t>(std::ceil(raw - eps));
}

}  // namespace

void PairBatch::validate(Task task) const {
  if (targets.size() != pairs.size()) throw ShapeError("pair targets are not aligned with pairs");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(pairs.size() * 2);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& pr = pairs[p];
    if (pr.i == pr.j) throw DataError("pair " + std::to_string(p) + " pairs a sample with itself");
    if (!seen.insert(unordered_key(pr.i, pr.j)).second) {
      throw DataError("duplicate unordered pair (" + std::to_string(pr.i) + ", " +
                      std::to_string(pr.j) + ")");
    }
    const double t = targets[p];
    if (task == Task::classification ? (t != 0.0 && t != 1.0) : !(t >= 0.0 && t <= 1.0)) {
      throw DataError("pair target " + format_double(t) + " out of range");
    }
  }
}

PairBatch make_pairs_full(std::span<const int> labels) {
  const std::size_t n = labels.size();
  if (n < 2) throw DataError("pairing needs at least 2 samples");
  PairBatch batch;
  batch.pairs.reserve(n * (n - 1) / 2);
  batch.targets.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      batch.pairs.push_back({i, j});
      batch.targets.push_back(labels[i] == labels[j] ? 1.0 : 0.0);
    }
  return batch;
}

PairBatch make_pairs_full_regression(std::span<const double> targets, double gamma) {
  const std::size_t n = targets.size();
  if (n < 2) throw DataError("pairing needs at least 2 samples");
  PairBatch batch;
  batch.pairs.reserve(n * (n - 1) / 2);
  batch.targets.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      batch.pairs.push_back({i, j});
      batch.targets.push_back(regression_target(targets[i], targets[j], gamma));
    }
  return batch;
}

PairBatch make_pairs_local(const GramMatrix& kernel, std::span<const int> labels,
                           const LocalPairingOptions& options) {
  const std::size_t n = labels.size();
  if (n < 2) throw DataError("pairing needs at least 2 samples");
  if (kernel.rows() != static_cast<Eigen::Index>(n) || kernel.cols() != kernel.rows()) {
    throw ShapeError("local pairing needs an n x n kernel over the labelled samples");
  }
  if (!(options.recall_level > 0.0 && options.recall_level <= 1.0)) {
    throw ConfigError("recall_level must lie in (0, 1]");
  }

  std::vector<std::size_t> class_size;
  for (int label : labels) {
    if (label < 0) throw DataError("class labels must be non-negative");
    if (static_cast<std::size_t>(label) >= class_size.size()) class_size.resize(label + 1, 0);
    ++class_size[label];
  }

  PairBatch batch;
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    order.clear();
    for (std::size_t s = 0; s < n; ++s)
      if (s != r) order.push_back(s);
    const auto row = kernel.values.row(static_cast<Eigen::Index>(r));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return row(static_cast<Eigen::Index>(a)) > row(static_cast<Eigen::Index>(b));
    });

    const std::size_t same = class_size[labels[r]] - 1;
    std::size_t prefix = 0;
    if (same == 0) {
      prefix = std::max<std::size_t>(1, fraction_ceil(options.recall_level, n - 1));
    } else {
      const std::size_t needed = std::max<std::size_t>(1, fraction_ceil(options.recall_level, same));
      std::size_t found = 0;
      while (found < needed) {
        if (labels[order[prefix]] == labels[r]) ++found;
        ++prefix;
      }
    }
    if (options.max_pairs_per_reference > 0) {
      prefix = std::min(prefix, options.max_pairs_per_reference);
    }
    for (std::size_t t = 0; t < prefix; ++t) {
      const std::size_t s = order[t];
      if (!seen.insert(unordered_key(r, s)).second) continue;
      batch.pairs.push_back({r, s});
      batch.targets.push_back(labels[r] == labels[s] ? 1.0 : 0.0);
    }
  }
  return batch;
}

PairBatch make_pairs_local(const DekModel& model, const SampleMatrix& samples,
                           std::span<const int> labels, const LocalPairingOptions& options) {
  if (samples.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw ShapeError("samples and labels differ in length");
  }
  return make_pairs_local(gram(model, samples), labels, options);
}

void write_pairs_csv(const PairBatch& batch, std::ostream& out) {
  out << "i,j,target\n";
  for (std::size_t p = 0; p < batch.pairs.size(); ++p) {
    out << batch.pairs[p].i << ',' << batch.pairs[p].j << ',' << format_double(batch.targets[p])
        << '\n';
  }
}

void write_pairs_csv(const PairBatch& batch, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_pairs_csv(batch, out);
}

}  // namespace dek
