#pragma once

// Experiment configuration. YAML file with optional sections; every key has
// a default, so the smallest useful config is
//
//   paths:
//     data: data/pima.csv
//     target_col: class
//
// Sections and keys:
//   seed                      integer (default 0)
//   paths:        data, test, target_col, out_dir
//   data:         task, delimiter, header, split, stratify, standardize
//   architecture: width_factor, embedding_layers, kernel_hidden_layers, hidden_activation
//   training:     learning_rate, epochs, batch_size, gamma
//   pairing:      mode (full|local), interval, recall_level, max_pairs_per_reference
//   consumer:     kind (knn|svm), k, kernel_weighted, svm_c, svm_tol, kpca_components
//   baseline:     gamma_grid, c_grid, folds

#include <cstdint>
#include <string>
#include <vector>

#include "dek/dek_model.hpp"
#include "dek/trainer.hpp"

namespace dek {

enum class ConsumerKind { knn, svm };

std::string_view to_string(ConsumerKind kind);
ConsumerKind consumer_from_string(std::string_view name);

struct PathsConfig {
  std::string data;
  std::string test;  // optional: explicit test file instead of splitting
  std::string target_col = "class";
  std::string out_dir = "dek-out";
};

struct DataConfig {
  Task task = Task::classification;
  char delimiter = ',';
  bool header = true;
  double split = 0.5;  // training fraction
  bool stratify = true;
  bool standardize = true;
};

struct ConsumerConfig {
  ConsumerKind kind = ConsumerKind::knn;
  int k = 5;
  bool kernel_weighted = false;
  double svm_c = 1.0;
  double svm_tol = 1e-3;
  int kpca_components = 3;
};

struct BaselineConfig {
  std::vector<double> gamma_grid{0.001, 0.01, 0.1, 1.0, 10.0};
  std::vector<double> c_grid{0.1, 1.0, 10.0, 100.0};
  int folds = 3;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  PathsConfig paths;
  DataConfig data;
  DekArchitecture architecture;  // input_dim and task are filled from the data
  TrainConfig training;
  ConsumerConfig consumer;
  BaselineConfig baseline;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  /// Canonical JSON text of every field (used for the report and the hash).
  std::string canonical() const;
  /// 16 hex digits, FNV-1a over canonical().
  std::string hash() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& yaml_text);

}  // namespace dek
