#pragma once

// Tabular datasets: CSV ingestion, stratified splitting and z-scoring with
// statistics taken from the training split only.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dek/types.hpp"

namespace dek {

struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  std::vector<bool> scaled;  // false for zero-variance columns (passed through)

  /// (x - mean) / stddev on scaled columns.
  void apply(SampleMatrix& features) const;
};

struct Dataset {
  SampleMatrix features;
  Task task = Task::classification;
  std::vector<int> labels;      // classification: indices into label_names
  std::vector<double> targets;  // regression
  std::vector<std::string> feature_names;
  std::string target_name;
  std::vector<std::string> label_names;
  std::optional<Standardization> standardization;
  std::size_t rejected_rows = 0;

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
  int class_count() const { return static_cast<int>(label_names.size()); }

  /// Rows in the given order; metadata copied.
  Dataset subset(std::span<const std::size_t> rows) const;
};

struct CsvSchema {
  /// Header name, or a zero-based column index when the file has no header
  /// (or when the string parses as an integer and matches no header name).
  std::string target_column;
  Task task = Task::classification;
  char delimiter = ',';
  bool header = true;
  /// Label dictionary to reuse (e.g. from the training file); empty builds a
  /// fresh one sorted numerically when every label is numeric, else lexically.
  std::vector<std::string> label_names;
};

/// Parses every feature column as a real. Rows with an unparseable or
/// missing cell are rejected and counted; more than 50% rejected is an error.
Dataset load_csv(const std::string& path, const CsvSchema& schema);
Dataset read_csv(std::istream& in, const CsvSchema& schema);

/// Writes features and target with a header line, in the same layout
/// load_csv reads (target last).
void write_csv(const Dataset& data, const std::string& path);

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  std::vector<std::string> warnings;
};

/// Seeded shuffle then slice. Classification splits are stratified per class
/// with ceil(fraction * class size) going to train.
SplitResult split(const Dataset& data, double fraction, std::uint64_t seed,
                  bool stratify = true);

struct StandardizeResult {
  Dataset train;
  Dataset test;
  Standardization stats;
  std::vector<std::string> warnings;
};

/// z-scores both splits with population statistics of `train`.
StandardizeResult standardize(const Dataset& train, const Dataset& test);
Standardization fit_standardization(const SampleMatrix& train, std::vector<std::string>* warnings);

}  // namespace dek
