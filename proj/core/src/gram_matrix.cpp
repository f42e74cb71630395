#include "dek/gram_matrix.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "dek/error.hpp"

namespace dek {

void GramMatrix::validate() const {
  if (!values.allFinite()) throw DomainError("gram matrix has non-finite entries");
  if (values.size() > 0 && values.minCoeff() < 0.0) {
    throw DomainError("gram matrix has negative entries");
  }
  if (symmetric) {
    if (values.rows() != values.cols()) throw ShapeError("symmetric gram matrix is not square");
    for (Eigen::Index p = 0; p < values.rows(); ++p)
      for (Eigen::Index q = p + 1; q < values.cols(); ++q)
        if (values(p, q) != values(q, p)) {
          throw DomainError("gram matrix flagged symmetric differs from its transpose");
        }
  }
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw DomainError("cannot format value");
  return std::string(buf, ptr);
}

void write_gram_csv(const GramMatrix& gram, std::ostream& out, char delimiter) {
  out << "row" << delimiter << "col" << delimiter << "value\n";
  for (Eigen::Index p = 0; p < gram.rows(); ++p)
    for (Eigen::Index q = 0; q < gram.cols(); ++q)
      out << p << delimiter << q << delimiter << format_double(gram(p, q)) << '\n';
}

void write_gram_csv(const GramMatrix& gram, const std::string& path, char delimiter) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_gram_csv(gram, out, delimiter);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace dek
