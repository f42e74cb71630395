// dek: train, evaluate and export deep-kernel models.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "dek/config.hpp"
#include "dek/error.hpp"
#include "dek/experiment.hpp"
#include "dek/gram_matrix.hpp"
#include "dek/kpca.hpp"
#include "dek/metrics.hpp"
#include "dek/model_io.hpp"
#include "dek/pairing.hpp"
#include "dek/rbf.hpp"
#include "dek/svm.hpp"
#include "dek/knn.hpp"

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string data;
  std::string test;
  std::string target_col;
  std::string task;
  std::optional<double> split;
  std::string out_dir;
  std::string out;
  std::string model;
  std::string consumer;
  std::optional<int> k;
  std::optional<int> components;
  std::optional<double> gamma;
  std::string pairing;
  std::optional<double> recall_level;
  std::optional<int> pairing_interval;
  std::optional<int> epochs;
};

void add_data_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "YAML experiment config");
  app->add_option("--seed", f.seed, "Seed for splitting, initialization and shuffling");
  app->add_option("--data", f.data, "Input CSV");
  app->add_option("--target-col", f.target_col, "Target column name or 0-based index");
  app->add_option("--task", f.task, "classification or regression")
      ->check(CLI::IsMember({"classification", "regression"}));
  app->add_option("--split", f.split, "Training fraction in (0,1)");
  app->add_option("--out-dir", f.out_dir, "Output directory");
}

void add_training_flags(CLI::App* app, Flags& f) {
  app->add_option("--pairing", f.pairing, "Pair generation: full or local")
      ->check(CLI::IsMember({"full", "local"}));
  app->add_option("--recall-level", f.recall_level, "Local pairing recall level in (0,1]");
  app->add_option("--pairing-interval", f.pairing_interval, "Iterations between local re-pairings");
  app->add_option("--gamma", f.gamma, "Regression pair target scale");
  app->add_option("--epochs", f.epochs, "Training epochs");
}

void add_consumer_flags(CLI::App* app, Flags& f) {
  app->add_option("--consumer", f.consumer, "knn or svm")->check(CLI::IsMember({"knn", "svm"}));
  app->add_option("--k", f.k, "Neighbors for KNN");
}

dek::ExperimentConfig resolve_config(const Flags& f, bool gamma_is_baseline = false) {
  dek::ExperimentConfig cfg = f.config.empty() ? dek::parse_config("") : dek::load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (!f.data.empty()) cfg.paths.data = f.data;
  if (!f.test.empty()) cfg.paths.test = f.test;
  if (!f.target_col.empty()) cfg.paths.target_col = f.target_col;
  if (!f.task.empty()) cfg.data.task = dek::task_from_string(f.task);
  if (f.split) cfg.data.split = *f.split;
  if (!f.out_dir.empty()) cfg.paths.out_dir = f.out_dir;
  if (!f.consumer.empty()) cfg.consumer.kind = dek::consumer_from_string(f.consumer);
  if (f.k) cfg.consumer.k = *f.k;
  if (f.components) cfg.consumer.kpca_components = *f.components;
  if (f.gamma) {
    if (gamma_is_baseline) cfg.baseline.gamma_grid = {*f.gamma};
    else cfg.training.gamma = *f.gamma;
  }
  if (!f.pairing.empty()) cfg.training.pairing = dek::pairing_from_string(f.pairing);
  if (f.recall_level) cfg.training.recall_level = *f.recall_level;
  if (f.pairing_interval) cfg.training.pairing_interval = *f.pairing_interval;
  if (f.epochs) cfg.training.epochs = *f.epochs;
  cfg.training.seed = cfg.seed;
  cfg.architecture.task = cfg.data.task;
  cfg.validate();
  return cfg;
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw dek::IoError("cannot create directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

dek::ProgressSink progress_printer(int epochs) {
  const int every = std::max(1, epochs / 10);
  return [every, epochs](const dek::EpochStats& s) {
    if (s.epoch % every == 0 || s.epoch == epochs)
      std::cerr << "epoch " << s.epoch << " loss " << s.mean_loss << " pairs " << s.pair_count << '\n';
  };
}

void print_metric(const dek::EvalResult& eval) {
  std::cout << eval.metric_name << '=' << dek::format_double(eval.metric) << '\n';
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_train(const Flags& f) {
  const dek::ExperimentConfig cfg = resolve_config(f);
  const std::string started = dek::utc_timestamp();
  const dek::TrainRun run = dek::run_train(cfg, progress_printer(cfg.training.epochs));
  warn_all(run.data.warnings);
  const fs::path dir = ensure_dir(cfg.paths.out_dir);
  const std::string model_path = f.model.empty() ? (dir / "model.dek").string() : f.model;
  dek::save_bundle(run.bundle, model_path);
  dek::write_loss_history(run.result.loss_history, (dir / "loss_history.csv").string());
  dek::write_csv(run.data.raw_test, (dir / "test_split.csv").string());

  auto report = dek::report_header(cfg, "train", started);
  report["training"] = dek::training_summary(run);
  report["artifacts"] = {{"model", model_path},
                         {"loss_history", (dir / "loss_history.csv").string()},
                         {"test_split", (dir / "test_split.csv").string()}};
  dek::write_report(report, (dir / "train_report.json").string());
  if (run.result.diverged) std::cerr << "warning: " << run.result.diagnostic << '\n';
  std::cout << "model=" << model_path << " epochs=" << run.result.loss_history.size()
            << " final_loss="
            << (run.result.loss_history.empty() ? std::string("nan")
                                                : dek::format_double(run.result.loss_history.back()))
            << '\n';
  return 0;
}

int cmd_eval(const Flags& f) {
  if (f.model.empty()) throw dek::Error(dek::ErrorCode::usage, "eval needs --model");
  const dek::ModelBundle bundle = dek::load_bundle(f.model);
  dek::ExperimentConfig cfg = resolve_config(f);
  const std::string started = dek::utc_timestamp();
  dek::Dataset test;
  if (!f.test.empty()) {
    test = bundle.prepare_queries(dek::load_queries(bundle, f.test, cfg.data.delimiter, f.target_col));
  } else if (!cfg.paths.data.empty()) {
    cfg.data.task = bundle.model.task;
    dek::PreparedData prepared = dek::prepare_data(cfg);
    warn_all(prepared.warnings);
    test = bundle.prepare_queries(std::move(prepared.raw_test));
  } else {
    throw dek::Error(dek::ErrorCode::usage, "eval needs --test or --data");
  }
  const dek::EvalResult eval = dek::evaluate(bundle, test, cfg.consumer);
  const fs::path dir = ensure_dir(cfg.paths.out_dir);
  auto report = dek::report_header(cfg, "eval", started);
  report["metrics"] = dek::eval_summary(eval, cfg.consumer);
  report["artifacts"] = {{"model", f.model}};
  if (eval.pr_curve) {
    const std::string pr = (dir / "pr_curve.csv").string();
    dek::write_pr_csv(*eval.pr_curve, pr);
    report["metrics"]["pr_curve"] = pr;
    report["artifacts"]["pr_curve"] = pr;
  }
  dek::write_report(report, (dir / "eval_report.json").string());
  print_metric(eval);
  return 0;
}

dek::Dataset query_rows(const dek::ModelBundle& bundle, const Flags& f) {
  if (f.data.empty()) return bundle.references;
  return bundle.prepare_queries(dek::load_queries(bundle, f.data, ',', f.target_col));
}

std::string output_path(const Flags& f, const dek::ExperimentConfig& cfg, const char* name) {
  if (!f.out.empty()) return f.out;
  return (ensure_dir(cfg.paths.out_dir) / name).string();
}

int cmd_gram(const Flags& f) {
  if (f.model.empty()) throw dek::Error(dek::ErrorCode::usage, "gram needs --model");
  const dek::ModelBundle bundle = dek::load_bundle(f.model);
  Flags g = f;
  g.data.clear();  // --data names the query file here, not a training set
  const dek::ExperimentConfig cfg = resolve_config(g);
  const dek::Dataset rows = query_rows(bundle, f);
  const dek::GramMatrix k = dek::gram(bundle.model, rows.features);
  const std::string path = output_path(f, cfg, "gram.csv");
  dek::write_gram_csv(k, path);
  std::cout << "gram=" << path << " rows=" << k.rows() << '\n';
  return 0;
}

int cmd_kpca(const Flags& f) {
  if (f.model.empty()) throw dek::Error(dek::ErrorCode::usage, "kpca needs --model");
  const dek::ModelBundle bundle = dek::load_bundle(f.model);
  Flags g = f;
  g.data.clear();
  const dek::ExperimentConfig cfg = resolve_config(g);
  const dek::Dataset& ref = bundle.references;
  const dek::KpcaModel fit = dek::kpca_fit(dek::gram(bundle.model, ref.features), cfg.consumer.kpca_components);
  Eigen::MatrixXd coords;
  dek::Dataset rows;
  if (f.data.empty()) {
    coords = fit.training_coordinates;
    rows = ref;
  } else {
    rows = query_rows(bundle, f);
    coords = dek::kpca_project(fit, dek::gram(bundle.model, rows.features, ref.features));
  }
  const std::string path = output_path(f, cfg, "kpca.csv");
  dek::write_coordinates_csv(coords, path);
  std::cout << "coordinates=" << path << " components=" << coords.cols();
  if (rows.task == dek::Task::classification && rows.class_count() > 1 && coords.rows() > 1)
    std::cout << " silhouette=" << dek::format_double(dek::silhouette_score(coords, rows.labels));
  std::cout << '\n';
  return 0;
}

int cmd_pairs(const Flags& f) {
  const dek::ExperimentConfig cfg = resolve_config(f);
  const dek::PreparedData data = dek::prepare_data(cfg);
  warn_all(data.warnings);
  dek::PairBatch batch;
  if (cfg.training.pairing == dek::Pairing::full) {
    batch = cfg.data.task == dek::Task::classification
                ? dek::make_pairs_full(data.train.labels)
                : dek::make_pairs_full_regression(data.train.targets, cfg.training.gamma);
  } else {
    dek::DekModel model;
    if (!f.model.empty()) {
      model = dek::load_model(f.model);
    } else {
      dek::DekArchitecture arch = cfg.architecture;
      arch.input_dim = data.train.dim();
      model = dek::make_dek_model(arch, cfg.seed);
    }
    dek::LocalPairingOptions opts;
    opts.recall_level = cfg.training.recall_level;
    opts.max_pairs_per_reference = cfg.training.max_pairs_per_reference;
    batch = dek::make_pairs_local(model, data.train.features, data.train.labels, opts);
  }
  const std::string path = output_path(f, cfg, "pairs.csv");
  dek::write_pairs_csv(batch, path);
  std::cout << "pairs=" << path << " count=" << batch.size() << '\n';
  return 0;
}

int cmd_baseline(const Flags& f) {
  const dek::ExperimentConfig cfg = resolve_config(f, /*gamma_is_baseline=*/true);
  const std::string started = dek::utc_timestamp();
  const dek::PreparedData data = dek::prepare_data(cfg);
  warn_all(data.warnings);
  dek::GridSearchOptions opts;
  opts.folds = cfg.baseline.folds;
  opts.seed = cfg.seed;
  opts.knn_k = cfg.consumer.k;
  opts.smo.tol = cfg.consumer.svm_tol;
  const dek::GridSearchResult gs =
      dek::rbf_grid_search(data.train, cfg.baseline.gamma_grid, cfg.baseline.c_grid, opts);
  warn_all(gs.warnings);

  const dek::GramMatrix cross = dek::rbf_kernel(data.test.features, data.train.features, gs.gamma);
  std::string metric_name;
  double metric = 0.0;
  if (cfg.data.task == dek::Task::classification) {
    dek::SmoOptions smo = opts.smo;
    smo.C = gs.C;
    const dek::SvmModel svm = dek::svm_fit(dek::rbf_kernel(data.train.features, gs.gamma), data.train.labels, smo);
    metric_name = "accuracy";
    metric = dek::metric_accuracy(dek::svm_predict(svm, cross), data.test.labels);
  } else {
    metric_name = "r2";
    metric = dek::metric_r2(dek::knn_regress_all(cross, data.train.targets, cfg.consumer.k), data.test.targets);
  }

  auto report = dek::report_header(cfg, "baseline-rbf", started);
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& c : gs.cells) cells.push_back({{"gamma", c.gamma}, {"C", c.C}, {"score", c.score}});
  report["grid_search"] = {{"gamma", gs.gamma}, {"C", gs.C}, {"cv_score", gs.score}, {"cells", cells}};
  report["metrics"] = {{"model", cfg.data.task == dek::Task::classification ? "svm-rbf" : "knn-rbf"},
                       {metric_name, metric}};
  const fs::path dir = ensure_dir(cfg.paths.out_dir);
  dek::write_report(report, (dir / "baseline_report.json").string());
  std::cout << metric_name << '=' << dek::format_double(metric) << " gamma=" << dek::format_double(gs.gamma);
  if (cfg.data.task == dek::Task::classification) std::cout << " C=" << dek::format_double(gs.C);
  std::cout << '\n';
  return 0;
}

int cmd_report(const Flags& f) {
  const dek::ExperimentConfig cfg = resolve_config(f);
  const std::string started = dek::utc_timestamp();
  const dek::TrainRun run = dek::run_train(cfg, progress_printer(cfg.training.epochs));
  warn_all(run.data.warnings);
  const dek::EvalResult eval = dek::evaluate(run.bundle, run.data.test, cfg.consumer);

  const fs::path dir = ensure_dir(cfg.paths.out_dir);
  const std::string model_path = (dir / "model.dek").string();
  const std::string loss_path = (dir / "loss_history.csv").string();
  dek::save_bundle(run.bundle, model_path);
  dek::write_loss_history(run.result.loss_history, loss_path);

  auto report = dek::report_header(cfg, "report", started);
  report["training"] = dek::training_summary(run);
  report["metrics"] = dek::eval_summary(eval, cfg.consumer);
  report["artifacts"] = {{"model", model_path}, {"loss_history", loss_path}};
  if (eval.pr_curve) {
    const std::string pr = (dir / "pr_curve.csv").string();
    dek::write_pr_csv(*eval.pr_curve, pr);
    report["metrics"]["pr_curve"] = pr;
    report["artifacts"]["pr_curve"] = pr;
  }
  const std::string report_path = (dir / "report.json").string();
  dek::write_report(report, report_path);
  std::cerr << "report written to " << report_path << '\n';
  print_metric(eval);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep kernel learning: train, evaluate and export learned similarity models"};
  app.require_subcommand(1);
  Flags f;

  auto* train = app.add_subcommand("train", "Train a model; writes model, loss history and test split");
  add_data_flags(train, f);
  add_training_flags(train, f);
  train->add_option("--model", f.model, "Model output path (default <out-dir>/model.dek)");

  auto* eval = app.add_subcommand("eval", "Evaluate a model on test data; prints the metric line");
  add_data_flags(eval, f);
  add_consumer_flags(eval, f);
  eval->add_option("--model", f.model, "Model bundle")->required();
  eval->add_option("--test", f.test, "Test CSV (raw features); otherwise the config's test split");

  auto* gram = app.add_subcommand("gram", "Export the DEK Gram matrix");
  add_data_flags(gram, f);
  gram->add_option("--model", f.model, "Model bundle")->required();
  gram->add_option("--out", f.out, "Output CSV (default <out-dir>/gram.csv)");

  auto* kpca = app.add_subcommand("kpca", "Kernel PCA coordinates under the DEK Gram");
  add_data_flags(kpca, f);
  kpca->add_option("--model", f.model, "Model bundle")->required();
  kpca->add_option("--components", f.components, "Number of components");
  kpca->add_option("--out", f.out, "Output CSV (default <out-dir>/kpca.csv)");

  auto* pairs = app.add_subcommand("pairs", "Dump the training pair batch");
  add_data_flags(pairs, f);
  add_training_flags(pairs, f);
  pairs->add_option("--model", f.model, "Model used to rank local neighborhoods (default: fresh init)");
  pairs->add_option("--out", f.out, "Output CSV (default <out-dir>/pairs.csv)");

  auto* baseline = app.add_subcommand("baseline-rbf", "Grid-searched RBF baseline (SVM or KNN)");
  add_data_flags(baseline, f);
  baseline->add_option("--k", f.k, "Neighbors for the regression baseline");
  baseline->add_option("--gamma", f.gamma, "Fix the RBF gamma instead of searching");

  auto* report = app.add_subcommand("report", "Train then evaluate; writes all artifacts and report.json");
  add_data_flags(report, f);
  add_training_flags(report, f);
  add_consumer_flags(report, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << dek::to_string(dek::ErrorCode::usage) << ": " << e.what() << '\n';
    std::cerr << "usage: dek <train|eval|gram|kpca|pairs|baseline-rbf|report> [options]; see dek --help\n";
    return dek::exit_status(dek::ErrorCode::usage);
  }

  try {
    if (*train) return cmd_train(f);
    if (*eval) return cmd_eval(f);
    if (*gram) return cmd_gram(f);
    if (*kpca) return cmd_kpca(f);
    if (*pairs) return cmd_pairs(f);
    if (*baseline) return cmd_baseline(f);
    if (*report) return cmd_report(f);
  } catch (const dek::Error& e) {
    std::cerr << "error: " << dek::to_string(e.code()) << ": " << e.what() << '\n';
    return dek::exit_status(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: E_INTERNAL: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
