#include "dek/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "dek/error.hpp"

namespace dek {

std::string_view to_string(ConsumerKind kind) { return kind == ConsumerKind::knn ? "knn" : "svm"; }

ConsumerKind consumer_from_string(std::string_view name) {
  if (name == "knn") return ConsumerKind::knn;
  if (name == "svm") return ConsumerKind::svm;
  throw ConfigError("unknown consumer '" + std::string(name) + "'");
}

namespace {

void reject_unknown(const YAML::Node& node, const std::string& section,
                    const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError("'" + section + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError("unknown key '" + section + "." + key + "'");
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& section) {
  if (!node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + section + "." + key + "'");
  }
}

ExperimentConfig from_yaml(const YAML::Node& root) {
  ExperimentConfig cfg;
  if (!root || root.IsNull()) return cfg;
  reject_unknown(root, "<root>",
                 {"seed", "paths", "data", "architecture", "training", "pairing", "consumer", "baseline"});
  read(root, "seed", cfg.seed, "<root>");

  if (auto n = root["paths"]) {
    reject_unknown(n, "paths", {"data", "test", "target_col", "out_dir"});
    read(n, "data", cfg.paths.data, "paths");
    read(n, "test", cfg.paths.test, "paths");
    read(n, "target_col", cfg.paths.target_col, "paths");
    read(n, "out_dir", cfg.paths.out_dir, "paths");
  }
  if (auto n = root["data"]) {
    reject_unknown(n, "data", {"task", "delimiter", "header", "split", "stratify", "standardize"});
    std::string task(to_string(cfg.data.task));
    read(n, "task", task, "data");
    cfg.data.task = task_from_string(task);
    std::string delim(1, cfg.data.delimiter);
    read(n, "delimiter", delim, "data");
    if (delim == "\\t" || delim == "tab") delim = "\t";
    if (delim.size() != 1) throw ConfigError("data.delimiter must be a single character");
    cfg.data.delimiter = delim[0];
    read(n, "header", cfg.data.header, "data");
    read(n, "split", cfg.data.split, "data");
    read(n, "stratify", cfg.data.stratify, "data");
    read(n, "standardize", cfg.data.standardize, "data");
  }
  if (auto n = root["architecture"]) {
    reject_unknown(n, "architecture",
                   {"width_factor", "embedding_layers", "kernel_hidden_layers", "hidden_activation"});
    read(n, "width_factor", cfg.architecture.width_factor, "architecture");
    read(n, "embedding_layers", cfg.architecture.embedding_layers, "architecture");
    read(n, "kernel_hidden_layers", cfg.architecture.kernel_hidden_layers, "architecture");
    std::string act(net::to_string(cfg.architecture.hidden_activation));
    read(n, "hidden_activation", act, "architecture");
    cfg.architecture.hidden_activation = net::activation_from_string(act);
  }
  if (auto n = root["training"]) {
    reject_unknown(n, "training", {"learning_rate", "epochs", "batch_size", "gamma"});
    read(n, "learning_rate", cfg.training.learning_rate, "training");
    read(n, "epochs", cfg.training.epochs, "training");
    read(n, "batch_size", cfg.training.batch_size, "training");
    read(n, "gamma", cfg.training.gamma, "training");
  }
  if (auto n = root["pairing"]) {
    reject_unknown(n, "pairing", {"mode", "interval", "recall_level", "max_pairs_per_reference"});
    std::string mode(to_string(cfg.training.pairing));
    read(n, "mode", mode, "pairing");
    cfg.training.pairing = pairing_from_string(mode);
    read(n, "interval", cfg.training.pairing_interval, "pairing");
    read(n, "recall_level", cfg.training.recall_level, "pairing");
    read(n, "max_pairs_per_reference", cfg.training.max_pairs_per_reference, "pairing");
  }
  if (auto n = root["consumer"]) {
    reject_unknown(n, "consumer", {"kind", "k", "kernel_weighted", "svm_c", "svm_tol", "kpca_components"});
    std::string kind(to_string(cfg.consumer.kind));
    read(n, "kind", kind, "consumer");
    cfg.consumer.kind = consumer_from_string(kind);
    read(n, "k", cfg.consumer.k, "consumer");
    read(n, "kernel_weighted", cfg.consumer.kernel_weighted, "consumer");
    read(n, "svm_c", cfg.consumer.svm_c, "consumer");
    read(n, "svm_tol", cfg.consumer.svm_tol, "consumer");
    read(n, "kpca_components", cfg.consumer.kpca_components, "consumer");
  }
  if (auto n = root["baseline"]) {
    reject_unknown(n, "baseline", {"gamma_grid", "c_grid", "folds"});
    read(n, "gamma_grid", cfg.baseline.gamma_grid, "baseline");
    read(n, "c_grid", cfg.baseline.c_grid, "baseline");
    read(n, "folds", cfg.baseline.folds, "baseline");
  }
  return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
  training.validate();
  if (!(data.split > 0.0 && data.split < 1.0)) throw ConfigError("data.split must lie in (0, 1)");
  if (architecture.width_factor <= 0) throw ConfigError("architecture.width_factor must be positive");
  if (architecture.embedding_layers <= 0) throw ConfigError("architecture.embedding_layers must be positive");
  if (architecture.kernel_hidden_layers < 0) throw ConfigError("architecture.kernel_hidden_layers must be >= 0");
  if (consumer.k <= 0) throw ConfigError("consumer.k must be positive");
  if (!(consumer.svm_c > 0.0)) throw ConfigError("consumer.svm_c must be positive");
  if (!(consumer.svm_tol > 0.0)) throw ConfigError("consumer.svm_tol must be positive");
  if (consumer.kpca_components <= 0) throw ConfigError("consumer.kpca_components must be positive");
  if (baseline.gamma_grid.empty() || baseline.c_grid.empty()) throw ConfigError("baseline grids must be non-empty");
  if (baseline.folds < 2) throw ConfigError("baseline.folds must be >= 2");
  if (training.pairing == Pairing::local && data.task != Task::classification) {
    throw ConfigError("local pairing needs a classification task");
  }
}

std::string ExperimentConfig::canonical() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["paths"] = {{"data", paths.data}, {"test", paths.test}, {"target_col", paths.target_col},
                {"out_dir", paths.out_dir}};
  j["data"] = {{"task", to_string(data.task)}, {"delimiter", std::string(1, data.delimiter)},
               {"header", data.header}, {"split", data.split}, {"stratify", data.stratify},
               {"standardize", data.standardize}};
  j["architecture"] = {{"width_factor", architecture.width_factor},
                       {"embedding_layers", architecture.embedding_layers},
                       {"kernel_hidden_layers", architecture.kernel_hidden_layers},
                       {"hidden_activation", net::to_string(architecture.hidden_activation)}};
  j["training"] = {{"learning_rate", training.learning_rate}, {"epochs", training.epochs},
                   {"batch_size", training.batch_size}, {"gamma", training.gamma}};
  j["pairing"] = {{"mode", to_string(training.pairing)}, {"interval", training.pairing_interval},
                  {"recall_level", training.recall_level},
                  {"max_pairs_per_reference", training.max_pairs_per_reference}};
  j["consumer"] = {{"kind", to_string(consumer.kind)}, {"k", consumer.k},
                   {"kernel_weighted", consumer.kernel_weighted}, {"svm_c", consumer.svm_c},
                   {"svm_tol", consumer.svm_tol}, {"kpca_components", consumer.kpca_components}};
  j["baseline"] = {{"gamma_grid", baseline.gamma_grid}, {"c_grid", baseline.c_grid},
                   {"folds", baseline.folds}};
  return j.dump();
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  ExperimentConfig cfg;
  try {
    cfg = from_yaml(YAML::Load(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  cfg.training.seed = cfg.seed;
  cfg.architecture.task = cfg.data.task;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace dek
