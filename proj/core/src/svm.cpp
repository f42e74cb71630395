#include "dek/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dek/error.hpp"

namespace dek {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

double BinarySvm::decision(std::span<const double> kernel_row) const {
  double f = bias;
  for (std::size_t s = 0; s < support_indices.size(); ++s) {
    const std::size_t p = support_indices[s];
    if (p >= kernel_row.size()) throw ShapeError("kernel row shorter than the training set");
    f += dual_coefs[s] * kernel_row[p];
  }
  return f;
}

double dual_objective(const GramMatrix& gram, std::span<const int> labels,
                      std::span<const double> alpha) {
  const std::size_t n = labels.size();
  double linear = 0.0;
  double quad = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    linear += alpha[p];
    if (alpha[p] == 0.0) continue;
    for (std::size_t q = 0; q < n; ++q) {
      quad += alpha[p] * alpha[q] * labels[p] * labels[q] *
              gram(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
    }
  }
  return linear - 0.5 * quad;
}

BinarySvm smo_train(const GramMatrix& gram, std::span<const int> labels, const SmoOptions& options) {
  const std::size_t n = labels.size();
  if (gram.rows() != static_cast<Eigen::Index>(n) || gram.cols() != gram.rows()) {
    throw ShapeError("smo_train: gram must be n x n for n labels");
  }
  if (!(options.C > 0.0)) throw ConfigError("C must be positive");
  if (!(options.tol > 0.0)) throw ConfigError("tol must be positive");
  bool has_pos = false;
  bool has_neg = false;
  for (int y : labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else throw DataError("smo_train: labels must be -1 or +1");
  }
  if (!has_pos || !has_neg) throw DataError("smo_train: both classes must be present");

  const double C = options.C;
  const auto& K = gram.values;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a
  auto y = [&](std::size_t t) { return static_cast<double>(labels[t]); };
  auto in_up = [&](std::size_t t) {
    return (labels[t] == 1 && alpha[t] < C) || (labels[t] == -1 && alpha[t] > 0.0);
  };
  auto in_low = [&](std::size_t t) {
    return (labels[t] == 1 && alpha[t] > 0.0) || (labels[t] == -1 && alpha[t] < C);
  };

  BinarySvm model;
  model.C = C;
  const std::size_t cap = static_cast<std::size_t>(options.max_passes) * std::max<std::size_t>(n, 1);
  double gap = std::numeric_limits<double>::infinity();

  while (true) {
    // Maximal violating i from I_up; j chosen by second-order gain.
    double g_max = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && (i == n || -y(t) * grad[t] > g_max)) {
        i = t;
        g_max = -y(t) * grad[t];
      }
    }
    double g_min = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    double best_gain = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y(t) * grad[t];
      g_min = std::min(g_min, v);
      if (i == n) continue;
      const double b = g_max - v;
      if (b > 0.0) {
        double a = K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) +
                   K(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t)) -
                   2.0 * K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
        if (a <= 0.0) a = kTau;
        const double gain = -(b * b) / a;
        if (gain < best_gain) {
          best_gain = gain;
          j = t;
        }
      }
    }
    gap = g_max - g_min;
    if (i == n || j == n || gap < options.tol) {
      model.converged = true;
      break;
    }
    if (model.iterations >= cap) break;
    ++model.iterations;

    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    double quad = K(ii, ii) + K(jj, jj) - 2.0 * K(ii, jj);
    if (quad <= 0.0) quad = kTau;

    if (labels[i] != labels[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double di = alpha[i] - old_ai;
    const double dj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      const auto tt = static_cast<Eigen::Index>(t);
      grad[t] += y(t) * (y(i) * K(tt, ii) * di + y(j) * K(tt, jj) * dj);
    }
  }
  model.max_violation = gap;

  // rho: mean of y*grad over free vectors, else the midpoint of the bounds.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y(t) * grad[t];
    if (alpha[t] >= C) {
      if (labels[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (labels[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);
  model.bias = -rho;
  model.alpha = alpha;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.support_indices.push_back(t);
      model.dual_coefs.push_back(alpha[t] * y(t));
    }
  }
  return model;
}

SvmModel svm_fit(const GramMatrix& gram, std::span<const int> labels, const SmoOptions& options) {
  int max_label = -1;
  for (int l : labels) {
    if (l < 0) throw DataError("svm_fit: class labels must be non-negative");
    max_label = std::max(max_label, l);
  }
  std::vector<int> present;
  for (int c = 0; c <= max_label; ++c)
    if (std::find(labels.begin(), labels.end(), c) != labels.end()) present.push_back(c);
  if (present.size() < 2) throw DataError("svm_fit: need at least two classes");

  SvmModel model;
  std::vector<int> signed_labels(labels.size());
  for (int c : present) {
    for (std::size_t t = 0; t < labels.size(); ++t) signed_labels[t] = labels[t] == c ? 1 : -1;
    model.classes.push_back(c);
    model.heads.push_back(smo_train(gram, signed_labels, options));
  }
  return model;
}

Eigen::MatrixXd svm_decision_values(const SvmModel& model, const GramMatrix& cross_gram) {
  if (model.heads.empty()) throw DataError("svm model has no heads");
  const std::size_t n_train = model.heads.front().alpha.size();
  if (cross_gram.cols() != static_cast<Eigen::Index>(n_train)) {
    throw ShapeError("svm: cross Gram has " + std::to_string(cross_gram.cols()) +
                     " columns, model was trained on " + std::to_string(n_train));
  }
  Eigen::MatrixXd out(cross_gram.rows(), static_cast<Eigen::Index>(model.heads.size()));
  std::vector<double> row(n_train);
  for (Eigen::Index p = 0; p < cross_gram.rows(); ++p) {
    for (std::size_t q = 0; q < n_train; ++q) row[q] = cross_gram(p, static_cast<Eigen::Index>(q));
    for (std::size_t h = 0; h < model.heads.size(); ++h)
      out(p, static_cast<Eigen::Index>(h)) = model.heads[h].decision(row);
  }
  return out;
}

std::vector<int> svm_predict(const SvmModel& model, const GramMatrix& cross_gram) {
  const Eigen::MatrixXd values = svm_decision_values(model, cross_gram);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(values.rows()));
  for (Eigen::Index p = 0; p < values.rows(); ++p) {
    Eigen::Index best = 0;
    for (Eigen::Index h = 1; h < values.cols(); ++h)
      if (values(p, h) > values(p, best)) best = h;
    out.push_back(model.classes[static_cast<std::size_t>(best)]);
  }
  return out;
}

}  // namespace dek
