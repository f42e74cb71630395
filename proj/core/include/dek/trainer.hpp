#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dek/dataset.hpp"
#include "dek/dek_model.hpp"
#include "dek/pairing.hpp"

namespace dek {

enum class Pairing { full, local };

std::string_view to_string(Pairing pairing);
Pairing pairing_from_string(std::string_view name);

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 100;
  int batch_size = 256;
  Pairing pairing = Pairing::full;
  int pairing_interval = 50;  // iterations between local re-pairings
  double recall_level = 0.1;
  double gamma = 1.0;         // regression target scale
  std::uint64_t seed = 0;
  std::size_t max_pairs_per_reference = 0;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  std::size_t pair_count = 0;
  std::size_t iterations = 0;
};

using ProgressSink = std::function<void(const EpochStats&)>;

struct TrainResult {
  DekModel model;
  std::vector<double> loss_history;  // per-epoch mean pair loss
  std::size_t iterations = 0;
  std::size_t repairings = 0;
  bool diverged = false;
  std::string diagnostic;
};

/// Mini-batch gradient descent on pair losses. Pairs are shuffled each pass
/// (seeded) and sliced into batches; gradients are batch means. With local
/// pairing the pair set is rebuilt from the current model at iterations
/// 1, 1 + interval, 1 + 2 * interval, ...
///
/// On a non-finite loss or gradient training stops; the result carries the
/// last finite model, `diverged = true` and a diagnostic.
TrainResult train(DekModel model, const Dataset& data, const TrainConfig& config,
                  const ProgressSink& progress = {});

/// Pairs the trainer would use for `data` under `config` at iteration 1.
PairBatch initial_pairs(const DekModel& model, const Dataset& data, const TrainConfig& config);

/// Delimited loss history: header "epoch,mean_loss", epochs from 1.
void write_loss_history(const std::vector<double>& history, std::ostream& out);
void write_loss_history(const std::vector<double>& history, const std::string& path);

}  // namespace dek
