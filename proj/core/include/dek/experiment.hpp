#pragma once

// Pipelines behind the CLI subcommands.
//
// A model bundle is the model file (see model_io.hpp) followed by the
// preprocessing and reference set needed to evaluate it standalone:
//
//   dek-bundle 1
//   target <name>
//   labels <count>            one label name per following line
//   features <count>          one feature name per following line
//   standardization 0|1       if 1: lines "mean ...", "stddev ...", "scaled ..."
//   references <n> <d>        n lines: d standardized features, then label index or target
//   end-bundle

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dek/config.hpp"
#include "dek/dataset.hpp"
#include "dek/dek_model.hpp"
#include "dek/ranking.hpp"
#include "dek/trainer.hpp"

namespace dek {

inline constexpr int kBundleFormatVersion = 1;

struct PreparedData {
  Dataset train;     // standardized when enabled
  Dataset test;      // standardized with the training statistics
  Dataset raw_test;  // as loaded
  std::vector<std::string> warnings;
};

/// Load, split (or load paths.test) and standardize per config.
PreparedData prepare_data(const ExperimentConfig& config);

struct ModelBundle {
  DekModel model;
  Dataset references;  // standardized training split

  /// Standardize raw query rows with the stored training statistics.
  Dataset prepare_queries(Dataset raw) const;
};

void write_bundle(const ModelBundle& bundle, std::ostream& out);
ModelBundle read_bundle(std::istream& in);
void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

/// Raw test file read against the bundle's target column and label dictionary.
Dataset load_queries(const ModelBundle& bundle, const std::string& path, char delimiter = ',',
                     const std::string& target_column = {});

struct EvalResult {
  std::string metric_name;  // "accuracy" or "r2"
  double metric = 0.0;
  std::optional<PrCurve> pr_curve;  // classification only
  std::vector<int> predicted_labels;
  std::vector<double> predicted_targets;
};

/// Score test queries (already standardized) with the chosen consumer over the DEK Gram.
EvalResult evaluate(const ModelBundle& bundle, const Dataset& test, const ConsumerConfig& consumer);

struct TrainRun {
  PreparedData data;
  TrainResult result;
  ModelBundle bundle;
};

TrainRun run_train(const ExperimentConfig& config, const ProgressSink& progress = {});

/// ISO-8601 UTC wall-clock time.
std::string utc_timestamp();

/// Report skeleton: run metadata and config.
nlohmann::ordered_json report_header(const ExperimentConfig& config, const std::string& command,
                                     const std::string& started);
nlohmann::ordered_json training_summary(const TrainRun& run);
nlohmann::ordered_json eval_summary(const EvalResult& eval, const ConsumerConfig& consumer);
void write_report(nlohmann::ordered_json report, const std::string& path);

/// The report with run.timestamps removed, for determinism checks.
nlohmann::ordered_json comparable_report(nlohmann::ordered_json report);

}  // namespace dek
