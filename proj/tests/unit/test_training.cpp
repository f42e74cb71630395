#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "dek/error.hpp"
#include "dek/objectives.hpp"
#include "dek/pairing.hpp"
#include "dek/random.hpp"
#include "dek/synthetic.hpp"
#include "dek/trainer.hpp"
#include "oracles/brute_force.hpp"

using namespace dek;

namespace {

using PairSet = std::set<std::pair<std::size_t, std::size_t>>;

PairSet as_set(const PairBatch& b) {
  PairSet s;
  for (const auto& p : b.pairs) s.emplace(std::min(p.i, p.j), std::max(p.i, p.j));
  return s;
}

GramMatrix symmetric_gram(const std::vector<std::vector<double>>& rows) {
  GramMatrix g;
  const auto n = static_cast<Eigen::Index>(rows.size());
  g.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g.values(i, j) = rows[i][j];
  g.symmetric = true;
  return g;
}

std::vector<std::vector<double>> to_rows(const GramMatrix& g) {
  std::vector<std::vector<double>> out(g.rows(), std::vector<double>(g.cols()));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) out[i][j] = g(i, j);
  return out;
}

DekModel model_for(const Dataset& data, std::uint64_t seed, int wf = 2) {
  DekArchitecture arch;
  arch.input_dim = data.dim();
  arch.width_factor = wf;
  arch.task = data.task;
  return make_dek_model(arch, seed);
}

// Hand-built 6-point Gram: classes {0,0,0,1,1,1}.
const std::vector<std::vector<double>> kSixPoint = {
    {1.0, 0.9, 0.2, 0.8, 0.1, 0.3},
    {0.9, 1.0, 0.4, 0.5, 0.6, 0.2},
    {0.2, 0.4, 1.0, 0.7, 0.3, 0.35},
    {0.8, 0.5, 0.7, 1.0, 0.25, 0.15},
    {0.1, 0.6, 0.3, 0.25, 1.0, 0.95},
    {0.3, 0.2, 0.35, 0.15, 0.95, 1.0},
};
const std::vector<int> kSixLabels = {0, 0, 0, 1, 1, 1};

}  // namespace

TEST(PairsFull, ThreeLabels) {
  const std::vector<int> labels{0, 1, 0};
  const PairBatch b = make_pairs_full(labels);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b.pairs[0], (IndexPair{0, 1}));
  EXPECT_EQ(b.targets[0], 0.0);
  EXPECT_EQ(b.pairs[1], (IndexPair{0, 2}));
  EXPECT_EQ(b.targets[1], 1.0);
  EXPECT_EQ(b.pairs[2], (IndexPair{1, 2}));
  EXPECT_EQ(b.targets[2], 0.0);
}

TEST(PairsFull, SingleClassAllPositive) {
  const std::vector<int> labels(7, 2);
  const PairBatch b = make_pairs_full(labels);
  EXPECT_EQ(b.size(), 21u);
  for (double t : b.targets) EXPECT_EQ(t, 1.0);
}

TEST(PairsFull, FourSamplesSixPairs) {
  const std::vector<int> labels{0, 1, 2, 3};
  const PairBatch b = make_pairs_full(labels);
  EXPECT_EQ(b.size(), 6u);
  EXPECT_NO_THROW(b.validate(Task::classification));
}

TEST(PairsFull, TooFewSamples) {
  const std::vector<int> labels{0};
  EXPECT_THROW(make_pairs_full(labels), DataError);
}

TEST(PairsFullRegression, TargetsInUnitInterval) {
  const std::vector<double> y{0.0, 0.5, 3.0, 3.0, -10.0};
  const PairBatch b = make_pairs_full_regression(y, 1.5);
  for (double t : b.targets) {
    EXPECT_GT(t, 0.0);
    EXPECT_LE(t, 1.0);
  }
  EXPECT_NO_THROW(b.validate(Task::regression));
}

TEST(PairsLocal, SixPointMatchesEnumeration) {
  const GramMatrix g = symmetric_gram(kSixPoint);
  for (double recall : {0.1, 0.5, 0.75, 1.0}) {
    LocalPairingOptions opts;
    opts.recall_level = recall;
    const PairBatch b = make_pairs_local(g, kSixLabels, opts);
    EXPECT_EQ(as_set(b), oracle::local_pairs(kSixPoint, kSixLabels, recall)) << "recall " << recall;
    EXPECT_NO_THROW(b.validate(Task::classification));
  }
}

TEST(PairsLocal, SixPointHandListing) {
  // recall 0.5 -> each reference needs 1 of its 2 same-class partners.
  // 0: ranks 1(0) -> {0,1}; 1: ranks 0(0) -> dup; 2: ranks 3(1),1(0) -> {2,3},{1,2};
  // 3: ranks 0(0),2(0),1(0),4(1) -> {0,3},{2,3}dup,{1,3},{3,4}; 4: ranks 5(1) -> {4,5}; 5: ranks 4 -> dup.
  LocalPairingOptions opts;
  opts.recall_level = 0.5;
  const PairBatch b = make_pairs_local(symmetric_gram(kSixPoint), kSixLabels, opts);
  const PairSet expected{{0, 1}, {2, 3}, {1, 2}, {0, 3}, {1, 3}, {3, 4}, {4, 5}};
  EXPECT_EQ(as_set(b), expected);
  ASSERT_EQ(b.size(), expected.size());
  for (std::size_t p = 0; p < b.size(); ++p)
    EXPECT_EQ(b.targets[p], kSixLabels[b.pairs[p].i] == kSixLabels[b.pairs[p].j] ? 1.0 : 0.0);
}

TEST(PairsLocal, FullRecallCoveringEverythingEqualsFull) {
  // Same-class partners ranked last forces every neighborhood to span the row.
  std::vector<std::vector<double>> rows(6, std::vector<double>(6));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) rows[i][j] = i == j ? 1.0 : (kSixLabels[i] == kSixLabels[j] ? 0.1 : 0.9);
  LocalPairingOptions opts;
  opts.recall_level = 1.0;
  EXPECT_EQ(as_set(make_pairs_local(symmetric_gram(rows), kSixLabels, opts)),
            as_set(make_pairs_full(kSixLabels)));
}

TEST(PairsLocal, SubsetOfFullOnRandomKernels) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.below(12);
    std::vector<int> labels(n);
    for (auto& l : labels) l = static_cast<int>(rng.below(3));
    std::vector<std::vector<double>> rows(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) rows[i][j] = rows[j][i] = std::floor(rng.uniform() * 5) / 5;
    LocalPairingOptions opts;
    opts.recall_level = 0.05 + 0.95 * rng.uniform();
    const auto local = as_set(make_pairs_local(symmetric_gram(rows), labels, opts));
    const auto full = as_set(make_pairs_full(labels));
    for (const auto& p : local) EXPECT_TRUE(full.count(p));
    EXPECT_EQ(local, oracle::local_pairs(rows, labels, opts.recall_level));
  }
}

TEST(PairsLocal, ConstantKernelTiesBreakByIndex) {
  std::vector<std::vector<double>> rows(5, std::vector<double>(5, 0.5));
  const std::vector<int> labels{0, 1, 0, 1, 0};
  LocalPairingOptions opts;
  opts.recall_level = 0.5;
  const PairBatch a = make_pairs_local(symmetric_gram(rows), labels, opts);
  const PairBatch b = make_pairs_local(symmetric_gram(rows), labels, opts);
  EXPECT_EQ(a.pairs, b.pairs);
  // Reference 0 needs 1 of {2, 4}: prefix 1, 2 -> pairs (0,1), (0,2).
  EXPECT_EQ(a.pairs[0], (IndexPair{0, 1}));
  EXPECT_EQ(a.pairs[1], (IndexPair{0, 2}));
}

TEST(PairsLocal, SingletonClassTakesTopFraction) {
  const std::vector<int> labels{0, 0, 0, 1};
  std::vector<std::vector<double>> rows(4, std::vector<double>(4, 0.2));
  rows[3][1] = rows[1][3] = 0.9;
  LocalPairingOptions opts;
  opts.recall_level = 0.3;  // ceil(0.3 * 3) = 1 neighbor for the lone class-1 sample
  const PairBatch b = make_pairs_local(symmetric_gram(rows), labels, opts);
  EXPECT_TRUE(as_set(b).count({1, 3}));
}

TEST(PairsLocal, CapTruncatesNeighborhoods) {
  LocalPairingOptions opts;
  opts.recall_level = 1.0;
  opts.max_pairs_per_reference = 1;
  const PairBatch b = make_pairs_local(symmetric_gram(kSixPoint), kSixLabels, opts);
  EXPECT_LE(b.size(), 6u);
}

TEST(PairsLocal, BadRecallLevel) {
  LocalPairingOptions opts;
  opts.recall_level = 0.0;
  EXPECT_THROW(make_pairs_local(symmetric_gram(kSixPoint), kSixLabels, opts), ConfigError);
}

TEST(PairsCsv, HeaderAndRows) {
  std::ostringstream out;
  write_pairs_csv(make_pairs_full(std::vector<int>{0, 1}), out);
  EXPECT_EQ(out.str(), "i,j,target\n0,1,0\n");
}

TEST(ClassificationLoss, UniformPrediction) {
  const std::vector<double> k{0.5, 0.5, 0.5}, y{1, 0, 1};
  EXPECT_NEAR(classification_loss(k, y), std::log(2.0), 1e-15);
}

TEST(ClassificationLoss, PerfectPredictionNearZero) {
  const std::vector<double> k{1.0, 0.0}, y{1, 0};
  EXPECT_LT(classification_loss(k, y), 1e-11);
}

TEST(ClassificationLoss, TwoPairBatch) {
  const std::vector<double> k{0.9, 0.2}, y{1, 0};
  EXPECT_NEAR(classification_loss(k, y), -0.5 * (std::log(0.9) + std::log(0.8)), 1e-15);
  EXPECT_NEAR(classification_loss(k, y), 0.1643, 5e-5);
}

TEST(ClassificationLoss, SaturatedOutputsStayFinite) {
  const std::vector<double> k{0.0, 1.0}, y{1, 0};
  const double l = classification_loss(k, y);
  EXPECT_TRUE(std::isfinite(l));
  EXPECT_NEAR(l, -std::log(kLogClamp), 1e-3);
  EXPECT_TRUE(std::isfinite(classification_loss_derivative(0.0, 1.0)));
  EXPECT_TRUE(std::isfinite(classification_loss_derivative(1.0, 0.0)));
}

TEST(ClassificationLoss, DerivativeMatchesFiniteDifference) {
  for (double k : {0.05, 0.3, 0.5, 0.77, 0.95})
    for (double y : {0.0, 1.0}) {
      const double h = 1e-6;
      const double fd = (classification_pair_loss(k + h, y) - classification_pair_loss(k - h, y)) / (2 * h);
      EXPECT_NEAR(classification_loss_derivative(k, y), fd, 1e-6 * std::max(1.0, std::abs(fd)));
      EXPECT_NEAR(classification_loss_derivative(k, y), (k - y) / (k * (1 - k)), 1e-12);
    }
}

TEST(ClassificationLoss, EmptyBatch) {
  const std::vector<double> none;
  EXPECT_THROW(classification_loss(none, none), DataError);
}

TEST(RegressionTarget, Values) {
  EXPECT_EQ(regression_target(2.0, 2.0, 3.0), 1.0);
  EXPECT_NEAR(regression_target(0.0, std::log(2.0), 1.0), 0.5, 1e-15);
  EXPECT_NEAR(regression_target(1.0, 2.5, 2.0), std::exp(-3.0), 1e-15);
  EXPECT_NEAR(regression_target(1.0, 2.5, 2.0), 0.0498, 5e-5);
}

TEST(RegressionLoss, Values) {
  const std::vector<double> a{0.3, 0.7};
  EXPECT_EQ(regression_loss(a, a), 0.0);
  EXPECT_EQ(regression_loss(std::vector<double>{0.0}, std::vector<double>{1.0}), 1.0);
  EXPECT_DOUBLE_EQ(regression_loss(std::vector<double>{0.5, 0.25}, std::vector<double>{1.0, 0.0}), 0.15625);
  EXPECT_DOUBLE_EQ(regression_loss_derivative(0.5, 1.0), -1.0);
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.learning_rate = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.recall_level = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Train, ZeroLearningRateKeepsParameters) {
  const Dataset data = make_two_blobs(20, 4.0, 1);
  const DekModel init = model_for(data, 5);
  TrainConfig c;
  c.learning_rate = 0.0;
  c.epochs = 3;
  const TrainResult r = train(init, data, c);
  for (std::size_t l = 0; l < init.embedding.layers.size(); ++l)
    EXPECT_EQ(r.model.embedding.layers[l].weights, init.embedding.layers[l].weights);
  for (std::size_t l = 0; l < init.kernel.layers.size(); ++l)
    EXPECT_EQ(r.model.kernel.layers[l].weights, init.kernel.layers[l].weights);
  EXPECT_EQ(r.loss_history.size(), 3u);
}

TEST(Train, SameSeedSameLossHistory) {
  const Dataset data = make_two_moons(40, 0.1, 2);
  TrainConfig c;
  c.epochs = 5;
  c.batch_size = 32;
  c.seed = 17;
  c.pairing = Pairing::local;
  c.pairing_interval = 7;
  const TrainResult a = train(model_for(data, 3), data, c);
  const TrainResult b = train(model_for(data, 3), data, c);
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_GT(a.repairings, 1u);
}

TEST(Train, TwoBlobsSeparate) {
  const Dataset data = make_two_blobs(40, 4.0, 11);
  TrainConfig c;
  c.epochs = 200;
  c.batch_size = 32;
  c.learning_rate = 0.1;
  const TrainResult r = train(model_for(data, 11), data, c);
  ASSERT_FALSE(r.diverged) << r.diagnostic;
  EXPECT_LT(r.loss_history.back(), 0.1);
  const GramMatrix g = gram(r.model, data.features);
  double within = 0, between = 0;
  int nw = 0, nb = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = i + 1; j < data.size(); ++j) {
      if (data.labels[i] == data.labels[j]) {
        within += g(i, j);
        ++nw;
      } else {
        between += g(i, j);
        ++nb;
      }
    }
  EXPECT_GT(within / nw, between / nb);
}

TEST(Train, FinalLossBelowFirstForMostSeeds) {
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset data = make_two_blobs(40, 4.0, 100 + seed);
    TrainConfig c;
    c.epochs = 30;
    c.batch_size = 32;
    c.seed = seed;
    const TrainResult r = train(model_for(data, seed), data, c);
    improved += r.loss_history.back() < r.loss_history.front();
  }
  EXPECT_GE(improved, 9);
}

TEST(Train, RegressionRuns) {
  Rng rng(4);
  Dataset data;
  data.task = Task::regression;
  data.features.resize(30, 2);
  for (Eigen::Index i = 0; i < 30; ++i) {
    data.features(i, 0) = rng.uniform(-1, 1);
    data.features(i, 1) = rng.uniform(-1, 1);
    data.targets.push_back(data.features(i, 0) + 0.5 * data.features(i, 1));
  }
  TrainConfig c;
  c.epochs = 40;
  c.batch_size = 16;
  c.gamma = 1.0;
  const TrainResult r = train(model_for(data, 1), data, c);
  EXPECT_FALSE(r.diverged);
  EXPECT_LT(r.loss_history.back(), r.loss_history.front());
}

TEST(Train, LocalPairingWithRegressionIsConfigError) {
  Dataset data;
  data.task = Task::regression;
  data.features = SampleMatrix::Zero(4, 1);
  data.targets = {0, 1, 2, 3};
  TrainConfig c;
  c.pairing = Pairing::local;
  EXPECT_THROW(train(model_for(data, 1), data, c), ConfigError);
}

TEST(Train, HugeLearningRateReportsDivergence) {
  const Dataset data = make_two_blobs(20, 4.0, 3);
  TrainConfig c;
  c.learning_rate = 1e12;
  c.epochs = 20;
  c.batch_size = 4;
  const TrainResult r = train(model_for(data, 3), data, c);
  if (r.diverged) {
    EXPECT_FALSE(r.diagnostic.empty());
    EXPECT_NO_THROW(r.model.validate());
    for (const auto& l : r.model.embedding.layers) EXPECT_TRUE(l.weights.allFinite());
  }
}

TEST(LossHistory, CsvFormat) {
  std::ostringstream out;
  write_loss_history({0.5, 0.25}, out);
  EXPECT_EQ(out.str(), "epoch,mean_loss\n1,0.5\n2,0.25\n");
}
