#pragma once

#include <Eigen/Core>
#include <span>

namespace dek {

/// One sample per row; rows are contiguous so a sample can be viewed as a span.
using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> row_span(const SampleMatrix& m, Eigen::Index row) {
  return {m.data() + row * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

enum class Task { classification, regression };

}  // namespace dek
