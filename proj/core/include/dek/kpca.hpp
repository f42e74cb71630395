#pragma once

#include <iosfwd>
#include <string>

#include "dek/gram_matrix.hpp"

namespace dek {

struct KpcaModel {
  GramMatrix training_gram;
  /// Leading eigenvalues of the double-centered Gram, nonincreasing, >= 0.
  Eigen::VectorXd eigenvalues;
  /// n x n_components; column c is eigenvector c divided by sqrt(eigenvalue c)
  /// (zero for padded components without variance).
  Eigen::MatrixXd scaled_eigenvectors;
  int n_components = 0;
  Eigen::VectorXd column_means;  // per training sample
  double total_mean = 0.0;
  Eigen::MatrixXd training_coordinates;  // n x n_components
};

/// Double-centers the Gram matrix, eigendecomposes it, clamps negative
/// eigenvalues to zero and keeps the top n_components. When fewer components
/// carry variance than requested, the remainder are zero columns.
/// Throws Error(no_variance) when no eigenvalue is positive.
KpcaModel kpca_fit(const GramMatrix& gram, int n_components);

/// Coordinates of queries given their kernel values against the training set.
Eigen::MatrixXd kpca_project(const KpcaModel& model, const GramMatrix& cross_gram);

/// Header "index,c1,...,cn".
void write_coordinates_csv(const Eigen::MatrixXd& coords, std::ostream& out);
void write_coordinates_csv(const Eigen::MatrixXd& coords, const std::string& path);

}  // namespace dek
