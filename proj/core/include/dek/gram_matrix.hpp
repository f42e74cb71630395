#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>

namespace dek {

/// Block of kernel evaluations K(a_p, b_q): rows index the first sample set,
/// columns the second. `symmetric` is set when both sets were the same.
struct GramMatrix {
  Eigen::MatrixXd values;
  bool symmetric = false;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  double operator()(Eigen::Index p, Eigen::Index q) const { return values(p, q); }

  /// Throws DomainError/ShapeError when the invariants (finite, non-negative,
  /// square and equal to its transpose when symmetric) do not hold.
  void validate() const;
};

/// Delimited export: header "row,col,value" followed by one line per entry in
/// row-major order.
void write_gram_csv(const GramMatrix& gram, std::ostream& out, char delimiter = ',');
void write_gram_csv(const GramMatrix& gram, const std::string& path, char delimiter = ',');

std::string format_double(double value);

}  // namespace dek
