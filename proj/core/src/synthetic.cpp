#include "dek/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "dek/random.hpp"

namespace dek {

namespace {

Dataset labelled(std::size_t n, int dim, int classes) {
  Dataset d;
  d.task = Task::classification;
  d.features.resize(static_cast<Eigen::Index>(n), dim);
  d.labels.resize(n);
  for (int c = 0; c < dim; ++c) d.feature_names.push_back("x" + std::to_string(c + 1));
  d.target_name = "class";
  for (int c = 0; c < classes; ++c) d.label_names.push_back(std::to_string(c));
  return d;
}

}  // namespace

Dataset make_two_moons(std::size_t n, double noise, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d = labelled(n, 2, 2);
  const std::size_t upper = (n + 1) / 2;
  const std::size_t lower = n - upper;
  for (std::size_t p = 0; p < n; ++p) {
    const bool first = p < upper;
    const std::size_t idx = first ? p : p - upper;
    const std::size_t count = first ? upper : lower;
    const double t = count > 1 ? std::numbers::pi * static_cast<double>(idx) / static_cast<double>(count - 1)
                               : 0.0;
    double x = first ? std::cos(t) : 1.0 - std::cos(t);
    double y = first ? std::sin(t) : 0.5 - std::sin(t);
    x += noise * rng.normal();
    y += noise * rng.normal();
    const auto row = static_cast<Eigen::Index>(p);
    d.features(row, 0) = x;
    d.features(row, 1) = y;
    d.labels[p] = first ? 0 : 1;
  }
  return d;
}

Dataset make_two_blobs(std::size_t n, double separation, std::uint64_t seed, int dim) {
  Rng rng(seed);
  Dataset d = labelled(n, dim, 2);
  const std::size_t first = (n + 1) / 2;
  for (std::size_t p = 0; p < n; ++p) {
    const int label = p < first ? 0 : 1;
    const auto row = static_cast<Eigen::Index>(p);
    for (int c = 0; c < dim; ++c) d.features(row, c) = rng.normal();
    d.features(row, 0) += (label == 0 ? -0.5 : 0.5) * separation;
    d.labels[p] = label;
  }
  return d;
}

Dataset make_waveform(std::size_t n, std::uint64_t seed) {
  constexpr int kFeatures = 21;
  // h1 peaks at position 11 (1-based); h2 and h3 are h1 shifted by 4 either way.
  std::array<std::array<double, kFeatures>, 3> base{};
  for (int i = 0; i < kFeatures; ++i) {
    const int pos = i + 1;
    base[0][i] = std::max(6 - std::abs(pos - 11), 0);
    base[1][i] = std::max(6 - std::abs(pos - 15), 0);
    base[2][i] = std::max(6 - std::abs(pos - 7), 0);
  }
  constexpr int mix[3][2] = {{0, 1}, {0, 2}, {1, 2}};

  Rng rng(seed);
  Dataset d = labelled(n, kFeatures, 3);
  for (std::size_t p = 0; p < n; ++p) {
    const int label = static_cast<int>(rng.below(3));
    const double u = rng.uniform();
    const auto row = static_cast<Eigen::Index>(p);
    const auto& a = base[mix[label][0]];
    const auto& b = base[mix[label][1]];
    for (int i = 0; i < kFeatures; ++i) d.features(row, i) = u * a[i] + (1.0 - u) * b[i] + rng.normal();
    d.labels[p] = label;
  }
  return d;
}

}  // namespace dek
