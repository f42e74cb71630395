#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dek/error.hpp"
#include "dek/knn.hpp"
#include "dek/kpca.hpp"
#include "dek/random.hpp"
#include "dek/ranking.hpp"
#include "dek/rbf.hpp"
#include "dek/svm.hpp"
#include "dek/synthetic.hpp"
#include "oracles/brute_force.hpp"
#include "oracles/dual_qp.hpp"
#include "oracles/jacobi.hpp"

using namespace dek;

namespace {

GramMatrix from_rows(const std::vector<std::vector<double>>& rows, bool symmetric) {
  GramMatrix g;
  g.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) g.values(i, j) = rows[i][j];
  g.symmetric = symmetric;
  return g;
}

std::vector<std::vector<double>> to_rows(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

GramMatrix linear_gram(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  GramMatrix g;
  g.values.resize(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      double s = 0;
      for (std::size_t t = 0; t < a[i].size(); ++t) s += a[i][t] * b[j][t];
      g.values(i, j) = s;
    }
  g.symmetric = &a == &b;
  return g;
}

Eigen::MatrixXd random_psd(int n, Rng& rng) {
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.uniform(-1, 1);
  Eigen::MatrixXd k = a * a.transpose();
  return 0.5 * (k + k.transpose());
}

struct Separable {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
};

Separable separable_set(std::size_t n, Rng& rng) {
  Separable s;
  const double angle = rng.uniform(0, 6.283185307179586);
  const double nx = std::cos(angle), ny = std::sin(angle);
  while (s.x.size() < n) {
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    const double side = a * nx + b * ny;
    if (std::abs(side) < 0.3) continue;
    s.x.push_back({a, b});
    s.y.push_back(side > 0 ? 1 : -1);
  }
  if (std::count(s.y.begin(), s.y.end(), 1) == 0) s.y[0] = 1, s.x[0] = {nx, ny};
  if (std::count(s.y.begin(), s.y.end(), -1) == 0) s.y[1] = -1, s.x[1] = {-nx, -ny};
  return s;
}

}  // namespace

TEST(Knn, ArgmaxNeighbor) {
  const std::vector<double> row{0.1, 0.9, 0.3};
  const std::vector<int> labels{0, 1, 0};
  EXPECT_EQ(knn_classify(row, labels, 1), 1);
  EXPECT_EQ(knn_classify(row, labels, 3), 0);
}

TEST(Knn, TwentyPointGramMatchesBruteForceVote) {
  Rng rng(20);
  std::vector<int> labels(20);
  for (auto& l : labels) l = static_cast<int>(rng.below(3));
  for (int q = 0; q < 20; ++q) {
    std::vector<double> row(20);
    for (auto& v : row) v = std::floor(rng.uniform() * 8) / 8;  // coarse values force ties
    for (int k : {1, 3, 5}) EXPECT_EQ(knn_classify(row, labels, k), oracle::knn_vote(row, labels, k));
  }
}

TEST(Knn, SelfGramWithDominantDiagonalRecoversLabels) {
  Rng rng(2);
  const int n = 12;
  std::vector<std::vector<double>> rows(n, std::vector<double>(n));
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(rng.below(4));
    for (int j = 0; j < n; ++j) rows[i][j] = i == j ? 1.0 : rng.uniform(0, 0.9);
  }
  const auto pred = knn_classify_all(from_rows(rows, false), labels, 1);
  EXPECT_EQ(pred, labels);
}

TEST(Knn, Regression) {
  const std::vector<double> row{0.9, 0.8, 0.1};
  EXPECT_DOUBLE_EQ(knn_regress(row, std::vector<double>{1, 3, 100}, 2), 2.0);
  EXPECT_DOUBLE_EQ(knn_regress(row, std::vector<double>{1, 3, 100}, 1), 1.0);
  for (int k = 1; k <= 3; ++k) EXPECT_DOUBLE_EQ(knn_regress(row, std::vector<double>{7, 7, 7}, k), 7.0);
  EXPECT_NEAR(knn_regress(row, std::vector<double>{1, 3, 100}, 2, true), (0.9 * 1 + 0.8 * 3) / 1.7, 1e-15);
}

TEST(Knn, BadArguments) {
  const std::vector<double> row{0.1, 0.2};
  EXPECT_THROW(knn_classify(row, std::vector<int>{0, 1}, 3), ConfigError);
  EXPECT_THROW(knn_classify(row, std::vector<int>{0, 1}, 0), ConfigError);
  EXPECT_THROW(knn_classify(row, std::vector<int>{0}, 1), ShapeError);
}

TEST(Ranking, PerfectRankingGivesUnitPrecision) {
  const auto g = from_rows({{0.9, 0.8, 0.2, 0.1}}, false);
  const auto c = rank_and_pr_curve(g, std::vector<int>{1}, std::vector<int>{1, 1, 0, 0});
  ASSERT_EQ(c.recall.size(), 20u);
  for (double p : c.precision) EXPECT_DOUBLE_EQ(p, 1.0);
  EXPECT_DOUBLE_EQ(c.recall.front(), 0.05);
  EXPECT_DOUBLE_EQ(c.recall.back(), 1.0);
}

TEST(Ranking, ReversedSinglePositive) {
  const int n = 8;
  std::vector<double> row(n);
  std::vector<int> refs(n, 0);
  for (int i = 0; i < n; ++i) row[i] = 1.0 - 0.1 * i;
  refs[n - 1] = 1;
  const auto c = rank_and_pr_curve(from_rows({row}, false), std::vector<int>{1}, refs);
  EXPECT_DOUBLE_EQ(c.precision.back(), 1.0 / n);
}

TEST(Ranking, FiveQueryToyMatchesEnumeration) {
  Rng rng(5);
  std::vector<std::vector<double>> rows(5, std::vector<double>(9));
  for (auto& r : rows)
    for (auto& v : r) v = std::floor(rng.uniform() * 6) / 6;
  const std::vector<int> q{0, 1, 2, 0, 1};
  const std::vector<int> refs{0, 1, 0, 2, 1, 1, 0, 2, 0};
  const auto c = rank_and_pr_curve(from_rows(rows, false), q, refs);
  const auto expected = oracle::pr_curve(rows, q, refs);
  for (int g = 0; g < 20; ++g) EXPECT_NEAR(c.precision[g], expected[g], 1e-15);
  EXPECT_EQ(c.queries_used, 5u);
}

TEST(Ranking, QueriesWithoutRelevantReferencesAreSkipped) {
  const auto g = from_rows({{0.9, 0.8}, {0.5, 0.4}}, false);
  const auto c = rank_and_pr_curve(g, std::vector<int>{0, 5}, std::vector<int>{0, 1});
  EXPECT_EQ(c.queries_used, 1u);
  EXPECT_EQ(c.queries_skipped, 1u);
  EXPECT_THROW(rank_and_pr_curve(g, std::vector<int>{7, 5}, std::vector<int>{0, 1}), DataError);
}

TEST(Ranking, CsvHeader) {
  PrCurve c;
  c.recall = {0.5, 1.0};
  c.precision = {1.0, 0.75};
  std::ostringstream out;
  write_pr_csv(c, out);
  EXPECT_EQ(out.str(), "recall,precision\n0.5,1\n1,0.75\n");
}

TEST(Kpca, ConstantKernelHasNoVariance) {
  GramMatrix g;
  g.values = Eigen::MatrixXd::Ones(4, 4);
  g.symmetric = true;
  try {
    kpca_fit(g, 2);
    FAIL() << "expected no_variance";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_variance);
  }
}

TEST(Kpca, IdentityTwoByTwo) {
  GramMatrix g;
  g.values = Eigen::MatrixXd::Identity(2, 2);
  g.symmetric = true;
  const KpcaModel m = kpca_fit(g, 2);
  EXPECT_NEAR(m.eigenvalues[0], 1.0, 1e-12);
  EXPECT_EQ(m.eigenvalues[1], 0.0);  // clamped, column left zero
  EXPECT_EQ(m.scaled_eigenvectors.col(1).norm(), 0.0);
}

TEST(Kpca, ProjectedVarianceProportionalToEigenvalues) {
  Rng rng(9);
  GramMatrix g;
  g.values = random_psd(10, rng);
  g.symmetric = true;
  const KpcaModel m = kpca_fit(g, 3);
  const Eigen::MatrixXd& z = m.training_coordinates;
  for (int c = 0; c < 3; ++c) {
    const double mean = z.col(c).mean();
    EXPECT_NEAR(mean, 0.0, 1e-10);
    EXPECT_NEAR(z.col(c).squaredNorm(), m.eigenvalues[c], 1e-9 * std::max(1.0, m.eigenvalues[c]));
  }
}

TEST(Kpca, ProjectTrainingReproducesFit) {
  Rng rng(10);
  GramMatrix g;
  g.values = random_psd(8, rng);
  g.symmetric = true;
  const KpcaModel m = kpca_fit(g, 3);
  GramMatrix cross = g;
  cross.symmetric = false;
  EXPECT_LT((kpca_project(m, cross) - m.training_coordinates).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Kpca, DuplicateQueriesGiveIdenticalRows) {
  Rng rng(11);
  GramMatrix g;
  g.values = random_psd(6, rng);
  g.symmetric = true;
  const KpcaModel m = kpca_fit(g, 2);
  GramMatrix cross;
  cross.values.resize(2, 6);
  for (int j = 0; j < 6; ++j) cross.values(0, j) = cross.values(1, j) = rng.uniform();
  const Eigen::MatrixXd z = kpca_project(m, cross);
  EXPECT_EQ(z.row(0), z.row(1));
}

TEST(Kpca, ToyKernelMatchesNaiveOracle) {
  const std::vector<std::vector<double>> k{{2.0, 0.5, 0.1, 0.3}, {0.5, 1.5, 0.2, 0.4}, {0.1, 0.2, 1.0, 0.6}, {0.3, 0.4, 0.6, 1.2}};
  const std::vector<std::vector<double>> q{{0.3, 0.1, 0.9, 0.2}, {1.0, 0.2, 0.2, 0.5}};
  const KpcaModel m = kpca_fit(from_rows(k, true), 2);
  const auto o = oracle::kpca(k, q, 2);
  const Eigen::MatrixXd z = kpca_project(m, from_rows(q, false));
  for (int c = 0; c < 2; ++c) {
    EXPECT_NEAR(m.eigenvalues[c], o.eigenvalues[c], 1e-10);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(m.training_coordinates(i, c), o.train_coords[i][c], 1e-8);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(z(i, c), o.query_coords[i][c], 1e-8);
  }
}

TEST(Kpca, NonPsdKernelIsClampedNotRejected) {
  const std::vector<std::vector<double>> k{{1.0, 0.9, 0.0}, {0.9, 1.0, 0.9}, {0.0, 0.9, 1.0}};
  const KpcaModel m = kpca_fit(from_rows(k, true), 3);
  for (Eigen::Index c = 0; c < 3; ++c) EXPECT_GE(m.eigenvalues[c], 0.0);
}

TEST(Kpca, BadComponentCount) {
  GramMatrix g;
  g.values = Eigen::MatrixXd::Identity(3, 3);
  g.symmetric = true;
  EXPECT_THROW(kpca_fit(g, 4), ConfigError);
  EXPECT_THROW(kpca_fit(g, 0), ConfigError);
}

TEST(Smo, TwoPointLinearKernel) {
  const std::vector<std::vector<double>> x{{-1.0}, {1.0}};
  const GramMatrix k = linear_gram(x, x);
  SmoOptions o;
  o.C = 10;
  const BinarySvm svm = smo_train(k, std::vector<int>{-1, 1}, o);
  ASSERT_TRUE(svm.converged);
  EXPECT_NEAR(svm.alpha[0], 0.5, 1e-9);
  EXPECT_NEAR(svm.alpha[1], 0.5, 1e-9);
  EXPECT_EQ(svm.support_indices.size(), 2u);
  for (double probe : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
    const std::vector<std::vector<double>> p{{probe}};
    const GramMatrix row = linear_gram(p, x);
    EXPECT_NEAR(svm.decision(std::span<const double>(row.values.data(), 2)), probe, 1e-9);
  }
  EXPECT_LT(svm.decision(std::vector<double>{1.0, -1.0}), 0.0);
  EXPECT_GT(svm.decision(std::vector<double>{-1.0, 1.0}), 0.0);
}

TEST(Smo, ZeroCoefficientsGiveSignOfBias) {
  BinarySvm svm;
  svm.bias = -0.25;
  EXPECT_EQ(svm.decision(std::vector<double>{0.3, 0.9}), -0.25);
}

TEST(Smo, FlippingLabelsFlipsDecision) {
  Rng rng(4);
  const auto s = separable_set(12, rng);
  const GramMatrix k = linear_gram(s.x, s.x);
  std::vector<int> flipped(s.y);
  for (auto& v : flipped) v = -v;
  SmoOptions o;
  o.tol = 1e-9;
  const BinarySvm a = smo_train(k, s.y, o);
  const BinarySvm b = smo_train(k, flipped, o);
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    const auto row = std::span<const double>(k.values.data() + i * s.x.size(), s.x.size());
    EXPECT_NEAR(a.decision(row), -b.decision(row), 1e-6);
  }
}

TEST(Smo, DuplicatedDatasetKeepsDecisionValues) {
  Rng rng(6);
  const auto s = separable_set(10, rng);
  auto x2 = s.x;
  auto y2 = s.y;
  x2.insert(x2.end(), s.x.begin(), s.x.end());
  y2.insert(y2.end(), s.y.begin(), s.y.end());
  SmoOptions o;
  o.C = 10;
  o.tol = 1e-8;
  const BinarySvm a = smo_train(linear_gram(s.x, s.x), s.y, o);
  const BinarySvm b = smo_train(linear_gram(x2, x2), y2, o);
  for (double u = -2; u <= 2; u += 0.5)
    for (double v = -2; v <= 2; v += 0.5) {
      const std::vector<std::vector<double>> p{{u, v}};
      const GramMatrix ra = linear_gram(p, s.x), rb = linear_gram(p, x2);
      EXPECT_NEAR(a.decision(std::span<const double>(ra.values.data(), ra.cols())),
                  b.decision(std::span<const double>(rb.values.data(), rb.cols())), 1e-6);
    }
}

TEST(Smo, MatchesProjectedGradientOracleAndKkt) {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = separable_set(20, rng);
    const GramMatrix k = linear_gram(s.x, s.x);
    SmoOptions o;
    o.C = 1.0;
    const BinarySvm svm = smo_train(k, s.y, o);
    ASSERT_TRUE(svm.converged);
    const auto ref = oracle::solve_dual(to_rows(k.values), s.y, o.C);
    EXPECT_GE(dual_objective(k, s.y, svm.alpha), oracle::dual_value(to_rows(k.values), s.y, ref) - 1e-4);
    double balance = 0;
    for (std::size_t p = 0; p < s.y.size(); ++p) balance += svm.alpha[p] * s.y[p];
    EXPECT_NEAR(balance, 0.0, 1e-6);
    for (std::size_t p = 0; p < s.y.size(); ++p) {
      const auto row = std::span<const double>(k.values.data() + p * s.y.size(), s.y.size());
      const double margin = s.y[p] * svm.decision(row);
      if (svm.alpha[p] < 1e-9) EXPECT_GE(margin, 1 - 1e-3);
      else if (svm.alpha[p] > o.C - 1e-9) EXPECT_LE(margin, 1 + 1e-3);
      else EXPECT_NEAR(margin, 1.0, 1e-3);
    }
  }
}

TEST(Smo, RejectsBadLabels) {
  const std::vector<std::vector<double>> x{{-1.0}, {1.0}};
  EXPECT_THROW(smo_train(linear_gram(x, x), std::vector<int>{0, 1}, {}), DataError);
}

TEST(SvmMulticlass, OneVsRestOnBlobs) {
  Rng rng(3);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  const double centers[3][2] = {{0, 0}, {5, 0}, {0, 5}};
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 8; ++i) {
      x.push_back({centers[c][0] + rng.uniform(-1, 1), centers[c][1] + rng.uniform(-1, 1)});
      y.push_back(c);
    }
  SampleMatrix m(static_cast<Eigen::Index>(x.size()), 2);
  for (std::size_t i = 0; i < x.size(); ++i) m.row(i) << x[i][0], x[i][1];
  const GramMatrix k = rbf_kernel(m, 0.5);
  const SvmModel svm = svm_fit(k, y, {});
  EXPECT_EQ(svm.heads.size(), 3u);
  GramMatrix cross = k;
  cross.symmetric = false;
  EXPECT_EQ(svm_predict(svm, cross), y);
}

TEST(Rbf, KernelValues) {
  SampleMatrix x(2, 1);
  x << 0.0, 1.0;
  const GramMatrix g = rbf_kernel(x, std::log(2.0));
  EXPECT_EQ(g(0, 0), 1.0);
  EXPECT_EQ(g(1, 1), 1.0);
  EXPECT_NEAR(g(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(rbf_kernel(x, 1e-12)(0, 1), 1.0, 1e-11);
}

TEST(Rbf, GramIsSymmetricPsd) {
  const Dataset d = make_two_moons(30, 0.1, 1);
  const GramMatrix g = rbf_kernel(d.features, 2.0);
  EXPECT_EQ(g.values, g.values.transpose());
  const auto e = oracle::jacobi_eigen(to_rows(g.values));
  EXPECT_GE(e.values.back(), -1e-9);
}

TEST(Rbf, GridSearchPicksAWorkingCell) {
  const Dataset d = make_two_blobs(60, 5.0, 2);
  GridSearchOptions o;
  o.seed = 1;
  const std::vector<double> gammas{0.01, 1.0}, cs{1.0, 10.0};
  const auto r = rbf_grid_search(d, gammas, cs, o);
  EXPECT_EQ(r.cells.size(), 4u);
  EXPECT_GT(r.score, 0.9);
  const auto again = rbf_grid_search(d, gammas, cs, o);
  EXPECT_EQ(r.gamma, again.gamma);
  EXPECT_EQ(r.C, again.C);
  EXPECT_EQ(r.score, again.score);
}
