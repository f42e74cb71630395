#include "dek/kpca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <ostream>

#include "dek/error.hpp"

namespace dek {

KpcaModel kpca_fit(const GramMatrix& gram, int n_components) {
  if (!gram.symmetric) throw ShapeError("kpca_fit needs a symmetric training Gram matrix");
  const Eigen::Index n = gram.rows();
  if (n == 0 || gram.cols() != n) throw ShapeError("kpca_fit needs a non-empty square Gram matrix");
  if (n_components <= 0 || n_components > n) {
    throw ConfigError("n_components must lie in [1, " + std::to_string(n) + "]");
  }
  if (!gram.values.allFinite()) throw DomainError("kpca_fit: non-finite Gram entries");

  KpcaModel model;
  model.training_gram = gram;
  model.n_components = n_components;
  model.column_means = gram.values.colwise().mean().transpose();
  model.total_mean = gram.values.mean();

  Eigen::MatrixXd centered = gram.values;
  centered.rowwise() -= model.column_means.transpose();
  centered.colwise() -= model.column_means;
  centered.array() += model.total_mean;
  // Remove rounding asymmetry before the symmetric solver reads one triangle.
  centered = 0.5 * (centered + centered.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(centered);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::numeric, "kpca eigendecomposition failed");
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  const double largest = values[n - 1];
  const double floor = 1e-12 * std::max(1.0, std::fabs(values.cwiseAbs().maxCoeff()));
  if (!(largest > floor)) {
    throw Error(ErrorCode::no_variance, "kernel carries no variance after centering");
  }

  model.eigenvalues = Eigen::VectorXd::Zero(n_components);
  model.scaled_eigenvectors = Eigen::MatrixXd::Zero(n, n_components);
  for (int c = 0; c < n_components; ++c) {
    const Eigen::Index src = n - 1 - c;
    const double lambda = values[src];
    if (!(lambda > floor)) break;  // clamped to zero: dropped, column stays zero
    Eigen::VectorXd v = vectors.col(src);
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v[pivot] < 0.0) v = -v;
    model.eigenvalues[c] = lambda;
    model.scaled_eigenvectors.col(c) = v / std::sqrt(lambda);
  }
  model.training_coordinates = centered * model.scaled_eigenvectors;
  return model;
}

Eigen::MatrixXd kpca_project(const KpcaModel& model, const GramMatrix& cross_gram) {
  const Eigen::Index n = model.training_gram.rows();
  if (cross_gram.cols() != n) {
    throw ShapeError("kpca_project: cross Gram has " + std::to_string(cross_gram.cols()) +
                     " columns, training set has " + std::to_string(n));
  }
  Eigen::MatrixXd centered = cross_gram.values;
  const Eigen::VectorXd row_means = centered.rowwise().mean();
  centered.rowwise() -= model.column_means.transpose();
  centered.colwise() -= row_means;
  centered.array() += model.total_mean;
  return centered * model.scaled_eigenvectors;
}

void write_coordinates_csv(const Eigen::MatrixXd& coords, std::ostream& out) {
  out << "index";
  for (Eigen::Index c = 0; c < coords.cols(); ++c) out << ",c" << c + 1;
  out << '\n';
  for (Eigen::Index r = 0; r < coords.rows(); ++r) {
    out << r;
    for (Eigen::Index c = 0; c < coords.cols(); ++c) out << ',' << format_double(coords(r, c));
    out << '\n';
  }
}

void write_coordinates_csv(const Eigen::MatrixXd& coords, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_coordinates_csv(coords, out);
}

}  // namespace dek
