#include "dek/trainer.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "dek/error.hpp"
#include "dek/objectives.hpp"
#include "dek/random.hpp"

namespace dek {

std::string_view to_string(Pairing pairing) {
  return pairing == Pairing::full ? "full" : "local";
}

Pairing pairing_from_string(std::string_view name) {
  if (name == "full") return Pairing::full;
  if (name == "local") return Pairing::local;
  throw ConfigError("unknown pairing '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be finite and non-negative");
  }
  if (epochs <= 0) throw ConfigError("epochs must be positive");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (pairing_interval <= 0) throw ConfigError("pairing_interval must be positive");
  if (!(recall_level > 0.0 && recall_level <= 1.0)) {
    throw ConfigError("recall_level must lie in (0, 1]");
  }
}

namespace {

void check_task(const DekModel& model, const Dataset& data, const TrainConfig& config) {
  if (model.task != data.task) {
    throw ConfigError("model task is " + std::string(to_string(model.task)) + " but data is " +
                      std::string(to_string(data.task)));
  }
  if (data.dim() != model.input_dim) {
    throw ShapeError("data has " + std::to_string(data.dim()) + " features, model expects " +
                     std::to_string(model.input_dim));
  }
  if (config.pairing == Pairing::local && data.task != Task::classification) {
    throw ConfigError("local pairing needs class labels");
  }
}

bool model_finite(const DekModel& m) {
  for (const auto* net : {&m.embedding, &m.kernel})
    for (const auto& l : net->layers)
      if (!l.weights.allFinite() || !l.biases.allFinite()) return false;
  return true;
}

}  // namespace

PairBatch initial_pairs(const DekModel& model, const Dataset& data, const TrainConfig& config) {
  check_task(model, data, config);
  if (data.task == Task::regression) return make_pairs_full_regression(data.targets, config.gamma);
  if (config.pairing == Pairing::full) return make_pairs_full(data.labels);
  return make_pairs_local(model, data.features, data.labels,
                          {config.recall_level, config.max_pairs_per_reference});
}

TrainResult train(DekModel model, const Dataset& data, const TrainConfig& config,
                  const ProgressSink& progress) {
  config.validate();
  model.validate();
  check_task(model, data, config);

  const bool classification = data.task == Task::classification;
  const auto pair_loss = classification ? classification_pair_loss : regression_pair_loss;
  const auto pair_grad = classification ? classification_loss_derivative : regression_loss_derivative;

  Rng rng(config.seed);
  TrainResult result;
  PairBatch pairs = initial_pairs(model, data, config);
  if (pairs.empty()) throw DataError("no training pairs");
  result.repairings = 1;

  std::vector<std::size_t> order(pairs.size());
  auto reshuffle = [&] {
    order.resize(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
  };
  reshuffle();
  std::size_t cursor = 0;

  DekGrads grads = DekGrads::zeros_like(model);
  DekBackwardWorkspace ws;
  PairTrace trace;
  DekModel last_finite = model;
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const std::size_t steps = (pairs.size() + batch - 1) / batch;
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t step = 0; step < steps; ++step) {
      ++result.iterations;
      if (config.pairing == Pairing::local && result.iterations > 1 &&
          (result.iterations - 1) % static_cast<std::size_t>(config.pairing_interval) == 0) {
        pairs = make_pairs_local(model, data.features, data.labels,
                                 {config.recall_level, config.max_pairs_per_reference});
        ++result.repairings;
        reshuffle();
        cursor = 0;
      }
      if (cursor >= order.size()) {
        reshuffle();
        cursor = 0;
      }
      const std::size_t end = std::min(order.size(), cursor + batch);
      const double scale = 1.0 / static_cast<double>(end - cursor);

      grads.set_zero();
      double batch_loss = 0.0;
      try {
        for (std::size_t b = cursor; b < end; ++b) {
          const std::size_t p = order[b];
          const auto [i, j] = pairs.pairs[p];
          const double target = pairs.targets[p];
          const double k = dek_forward_into(model, row_span(data.features, static_cast<Eigen::Index>(i)),
                                            row_span(data.features, static_cast<Eigen::Index>(j)), trace);
          batch_loss += pair_loss(k, target);
          dek_backward_accumulate(model, trace, scale * pair_grad(k, target), grads, ws);
        }
      } catch (const DomainError& e) {
        result.diverged = true;
        result.diagnostic = "epoch " + std::to_string(epoch) + ", iteration " +
                            std::to_string(result.iterations) + ": " + e.what();
      }
      if (!result.diverged && (!std::isfinite(batch_loss) || !grads.all_finite())) {
        result.diverged = true;
        result.diagnostic = "epoch " + std::to_string(epoch) + ", iteration " +
                            std::to_string(result.iterations) + ": non-finite loss or gradient";
      }
      if (result.diverged) {
        result.model = std::move(model);
        return result;
      }
      last_finite = model;
      apply_update(model, grads, config.learning_rate);
      if (!model_finite(model)) {
        result.diverged = true;
        result.diagnostic = "epoch " + std::to_string(epoch) + ", iteration " +
                            std::to_string(result.iterations) + ": parameters overflowed";
        result.model = std::move(last_finite);
        return result;
      }
      loss_sum += batch_loss;
      loss_count += end - cursor;
      cursor = end;
    }
    result.loss_history.push_back(loss_sum / static_cast<double>(loss_count));
    if (progress) {
      progress({epoch, result.loss_history.back(), pairs.size(), result.iterations});
    }
  }
  result.model = std::move(model);
  return result;
}

void write_loss_history(const std::vector<double>& history, std::ostream& out) {
  out << "epoch,mean_loss\n";
  for (std::size_t e = 0; e < history.size(); ++e) {
    out << e + 1 << ',' << format_double(history[e]) << '\n';
  }
}

void write_loss_history(const std::vector<double>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_loss_history(history, out);
}

}  // namespace dek
