#include "dek/experiment.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dek/error.hpp"
#include "dek/gram_matrix.hpp"
#include "dek/knn.hpp"
#include "dek/metrics.hpp"
#include "dek/model_io.hpp"
#include "dek/svm.hpp"

namespace dek {

namespace {

CsvSchema schema_for(const ExperimentConfig& config) {
  CsvSchema schema;
  schema.target_column = config.paths.target_col;
  schema.task = config.data.task;
  schema.delimiter = config.data.delimiter;
  schema.header = config.data.header;
  return schema;
}

std::string next_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return line;
  }
  throw DataError("model bundle truncated");
}

// "key rest-of-line" -> rest; throws if the key differs.
std::string keyed(std::istream& in, const std::string& key) {
  const std::string line = next_line(in);
  if (line == key) return {};
  if (line.rfind(key + " ", 0) != 0) throw DataError("model bundle: expected '" + key + "'");
  return line.substr(key.size() + 1);
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  const char* p = text.data();
  const char* end = p + text.size();
  while (p < end) {
    while (p < end && *p == ' ') ++p;
    if (p == end) break;
    double v = 0.0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc()) throw DataError("model bundle: bad number");
    out.push_back(v);
    p = next;
  }
  return out;
}

std::size_t parse_count(const std::string& text) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw DataError("model bundle: bad count '" + text + "'");
  return v;
}

void write_reals(std::ostream& out, const char* key, const Eigen::VectorXd& v) {
  out << key;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << format_double(v[i]);
  out << '\n';
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& config) {
  if (config.paths.data.empty()) throw ConfigError("no data path given (paths.data or --data)");
  PreparedData out;
  const CsvSchema schema = schema_for(config);
  Dataset full = load_csv(config.paths.data, schema);
  if (full.rejected_rows > 0)
    out.warnings.push_back("rejected " + std::to_string(full.rejected_rows) + " malformed rows");

  Dataset train;
  if (config.paths.test.empty()) {
    SplitResult s = split(full, config.data.split, config.seed,
                          config.data.stratify && config.data.task == Task::classification);
    out.warnings.insert(out.warnings.end(), s.warnings.begin(), s.warnings.end());
    train = std::move(s.train);
    out.raw_test = std::move(s.test);
  } else {
    train = std::move(full);
    CsvSchema test_schema = schema;
    test_schema.label_names = train.label_names;
    out.raw_test = load_csv(config.paths.test, test_schema);
  }

  if (config.data.standardize) {
    StandardizeResult st = standardize(train, out.raw_test);
    out.warnings.insert(out.warnings.end(), st.warnings.begin(), st.warnings.end());
    out.train = std::move(st.train);
    out.test = std::move(st.test);
  } else {
    out.train = std::move(train);
    out.test = out.raw_test;
  }
  return out;
}

Dataset ModelBundle::prepare_queries(Dataset raw) const {
  if (raw.dim() != model.input_dim) {
    throw ShapeError("query data has " + std::to_string(raw.dim()) + " features, model expects " +
                     std::to_string(model.input_dim));
  }
  if (references.standardization) {
    references.standardization->apply(raw.features);
    raw.standardization = references.standardization;
  }
  return raw;
}

void write_bundle(const ModelBundle& bundle, std::ostream& out) {
  const Dataset& ref = bundle.references;
  if (ref.dim() != bundle.model.input_dim) throw ShapeError("reference set does not match the model");
  write_model(bundle.model, out);
  out << "dek-bundle " << kBundleFormatVersion << '\n';
  out << "target " << ref.target_name << '\n';
  out << "labels " << ref.label_names.size() << '\n';
  for (const auto& l : ref.label_names) out << l << '\n';
  out << "features " << ref.feature_names.size() << '\n';
  for (const auto& f : ref.feature_names) out << f << '\n';
  if (ref.standardization) {
    const Standardization& s = *ref.standardization;
    out << "standardization 1\n";
    write_reals(out, "mean", s.mean);
    write_reals(out, "stddev", s.stddev);
    out << "scaled";
    for (bool b : s.scaled) out << ' ' << (b ? 1 : 0);
    out << '\n';
  } else {
    out << "standardization 0\n";
  }
  out << "references " << ref.size() << ' ' << ref.dim() << '\n';
  for (std::size_t r = 0; r < ref.size(); ++r) {
    for (int c = 0; c < ref.dim(); ++c)
      out << format_double(ref.features(static_cast<Eigen::Index>(r), c)) << ' ';
    if (ref.task == Task::classification)
      out << ref.labels[r];
    else
      out << format_double(ref.targets[r]);
    out << '\n';
  }
  out << "end-bundle\n";
}

ModelBundle read_bundle(std::istream& in) {
  ModelBundle b;
  b.model = read_model(in);
  const std::string version = keyed(in, "dek-bundle");
  if (version != std::to_string(kBundleFormatVersion))
    throw DataError("unsupported model bundle version '" + version + "'");
  Dataset& ref = b.references;
  ref.task = b.model.task;
  ref.target_name = keyed(in, "target");
  const std::size_t n_labels = parse_count(keyed(in, "labels"));
  for (std::size_t k = 0; k < n_labels; ++k) ref.label_names.push_back(next_line(in));
  const std::size_t n_features = parse_count(keyed(in, "features"));
  for (std::size_t k = 0; k < n_features; ++k) ref.feature_names.push_back(next_line(in));

  const std::string has_std = keyed(in, "standardization");
  if (has_std == "1") {
    Standardization s;
    const auto mean = parse_reals(keyed(in, "mean"));
    const auto stddev = parse_reals(keyed(in, "stddev"));
    const auto scaled = parse_reals(keyed(in, "scaled"));
    if (mean.size() != n_features || stddev.size() != n_features || scaled.size() != n_features)
      throw DataError("model bundle: standardization width mismatch");
    s.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    s.stddev = Eigen::Map<const Eigen::VectorXd>(stddev.data(), static_cast<Eigen::Index>(stddev.size()));
    for (double v : scaled) s.scaled.push_back(v != 0.0);
    ref.standardization = std::move(s);
  } else if (has_std != "0") {
    throw DataError("model bundle: bad standardization flag");
  }

  std::istringstream dims(keyed(in, "references"));
  std::size_t n = 0;
  int d = 0;
  if (!(dims >> n >> d) || d != b.model.input_dim || static_cast<std::size_t>(d) != n_features)
    throw DataError("model bundle: reference shape does not match the model");
  ref.features.resize(static_cast<Eigen::Index>(n), d);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = parse_reals(next_line(in));
    if (row.size() != static_cast<std::size_t>(d) + 1) throw DataError("model bundle: bad reference row");
    for (int c = 0; c < d; ++c) ref.features(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)];
    if (ref.task == Task::classification) {
      const double label = row.back();
      if (label < 0 || label >= static_cast<double>(n_labels) || label != static_cast<int>(label))
        throw DataError("model bundle: bad reference label");
      ref.labels.push_back(static_cast<int>(label));
    } else {
      ref.targets.push_back(row.back());
    }
  }
  if (next_line(in) != "end-bundle") throw DataError("model bundle: missing end-bundle");
  return b;
}

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_bundle(bundle, out);
  if (!out) throw IoError("write failed for '" + path + "'");
}

ModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model '" + path + "'");
  return read_bundle(in);
}

Dataset load_queries(const ModelBundle& bundle, const std::string& path, char delimiter,
                     const std::string& target_column) {
  CsvSchema schema;
  schema.target_column = target_column.empty() ? bundle.references.target_name : target_column;
  schema.task = bundle.model.task;
  schema.delimiter = delimiter;
  schema.label_names = bundle.references.label_names;
  return load_csv(path, schema);
}

EvalResult evaluate(const ModelBundle& bundle, const Dataset& test, const ConsumerConfig& consumer) {
  const Dataset& ref = bundle.references;
  if (test.task != ref.task) throw DataError("test task does not match the model");
  if (test.size() == 0) throw DataError("empty test set");
  const GramMatrix cross = gram(bundle.model, test.features, ref.features);
  EvalResult out;
  if (ref.task == Task::classification) {
    out.metric_name = "accuracy";
    if (consumer.kind == ConsumerKind::knn) {
      out.predicted_labels = knn_classify_all(cross, ref.labels, consumer.k);
    } else {
      SmoOptions smo;
      smo.C = consumer.svm_c;
      smo.tol = consumer.svm_tol;
      const SvmModel svm = svm_fit(gram(bundle.model, ref.features), ref.labels, smo);
      out.predicted_labels = svm_predict(svm, cross);
    }
    out.metric = metric_accuracy(out.predicted_labels, test.labels);
    out.pr_curve = rank_and_pr_curve(cross, test.labels, ref.labels);
  } else {
    if (consumer.kind != ConsumerKind::knn)
      throw ConfigError("the svm consumer supports classification only");
    out.metric_name = "r2";
    out.predicted_targets = knn_regress_all(cross, ref.targets, consumer.k, consumer.kernel_weighted);
    out.metric = metric_r2(out.predicted_targets, test.targets);
  }
  return out;
}

TrainRun run_train(const ExperimentConfig& config, const ProgressSink& progress) {
  TrainRun run;
  run.data = prepare_data(config);
  DekArchitecture arch = config.architecture;
  arch.input_dim = run.data.train.dim();
  arch.task = config.data.task;
  TrainConfig tc = config.training;
  tc.seed = config.seed;
  DekModel model = make_dek_model(arch, config.seed);
  run.result = train(std::move(model), run.data.train, tc, progress);
  run.bundle.model = run.result.model;
  run.bundle.references = run.data.train;
  return run;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::ordered_json report_header(const ExperimentConfig& config, const std::string& command,
                                     const std::string& started) {
  nlohmann::ordered_json j;
  j["format"] = "dek-report 1";
  j["run"] = {{"command", command},
              {"seed", config.seed},
              {"config_hash", config.hash()},
              {"timestamps", {{"started", started}}}};
  j["config"] = nlohmann::ordered_json::parse(config.canonical());
  return j;
}

nlohmann::ordered_json training_summary(const TrainRun& run) {
  nlohmann::ordered_json j;
  j["train_size"] = run.data.train.size();
  j["test_size"] = run.data.test.size();
  j["rejected_rows"] = run.data.train.rejected_rows;
  j["warnings"] = run.data.warnings;
  j["epochs_completed"] = run.result.loss_history.size();
  j["iterations"] = run.result.iterations;
  j["repairings"] = run.result.repairings;
  j["final_loss"] = run.result.loss_history.empty() ? nlohmann::ordered_json(nullptr)
                                                     : nlohmann::ordered_json(run.result.loss_history.back());
  j["diverged"] = run.result.diverged;
  j["diagnostic"] = run.result.diagnostic;
  return j;
}

nlohmann::ordered_json eval_summary(const EvalResult& eval, const ConsumerConfig& consumer) {
  nlohmann::ordered_json j;
  j["consumer"] = to_string(consumer.kind);
  if (consumer.kind == ConsumerKind::knn) j["k"] = consumer.k;
  else j["C"] = consumer.svm_c;
  j[eval.metric_name] = eval.metric;
  if (eval.pr_curve) {
    j["pr_queries_used"] = eval.pr_curve->queries_used;
    j["pr_queries_skipped"] = eval.pr_curve->queries_skipped;
  }
  return j;
}

void write_report(nlohmann::ordered_json report, const std::string& path) {
  report["run"]["timestamps"]["finished"] = utc_timestamp();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << report.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

nlohmann::ordered_json comparable_report(nlohmann::ordered_json report) {
  if (report.contains("run") && report["run"].is_object()) report["run"].erase("timestamps");
  return report;
}

}  // namespace dek
