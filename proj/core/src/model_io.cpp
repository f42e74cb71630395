#include "dek/model_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dek/error.hpp"

namespace dek {

namespace {

void write_network(const char* name, const net::MlpParams& params, std::ostream& out) {
  out << "network " << name << '\n';
  out << "hidden_activation " << net::to_string(params.hidden_activation) << '\n';
  out << "output_activation " << net::to_string(params.output_activation) << '\n';
  out << "layers " << params.layers.size() << '\n';
  for (const auto& layer : params.layers) {
    out << "layer " << layer.out_dim() << ' ' << layer.in_dim() << '\n';
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        if (c) out << ' ';
        out << format_double(layer.weights(r, c));
      }
      out << '\n';
    }
    for (Eigen::Index r = 0; r < layer.biases.size(); ++r) {
      if (r) out << ' ';
      out << format_double(layer.biases[r]);
    }
    out << '\n';
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw DataError("model file truncated");
    return w;
  }

  void expect(const std::string& keyword) {
    const std::string w = word();
    if (w != keyword) throw DataError("model file: expected '" + keyword + "', found '" + w + "'");
  }

  long integer() {
    const std::string w = word();
    long v = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size()) {
      throw DataError("model file: bad integer '" + w + "'");
    }
    return v;
  }

  double real() {
    const std::string w = word();
    double v = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size()) {
      throw DataError("model file: bad number '" + w + "'");
    }
    return v;
  }

 private:
  std::istream& in_;
};

net::MlpParams read_network(Reader& r, const std::string& name) {
  r.expect("network");
  r.expect(name);
  net::MlpParams params;
  r.expect("hidden_activation");
  params.hidden_activation = net::activation_from_string(r.word());
  r.expect("output_activation");
  params.output_activation = net::activation_from_string(r.word());
  r.expect("layers");
  const long count = r.integer();
  if (count <= 0 || count > 1000) throw DataError("model file: bad layer count");
  for (long l = 0; l < count; ++l) {
    r.expect("layer");
    const long rows = r.integer();
    const long cols = r.integer();
    if (rows <= 0 || cols <= 0 || rows > 1'000'000 || cols > 1'000'000) {
      throw DataError("model file: bad layer shape");
    }
    net::LayerParams layer{net::Matrix(rows, cols), net::Vector(rows)};
    for (long i = 0; i < rows; ++i)
      for (long j = 0; j < cols; ++j) layer.weights(i, j) = r.real();
    for (long i = 0; i < rows; ++i) layer.biases[i] = r.real();
    params.layers.push_back(std::move(layer));
  }
  return params;
}

}  // namespace

void write_model(const DekModel& model, std::ostream& out) {
  out << "dek-model " << kModelFormatVersion << '\n';
  out << "task " << to_string(model.task) << '\n';
  out << "input_dim " << model.input_dim << '\n';
  out << "width_factor " << model.width_factor << '\n';
  write_network("embedding", model.embedding, out);
  write_network("kernel", model.kernel, out);
  out << "end-model\n";
}

DekModel read_model(std::istream& in) {
  Reader r(in);
  r.expect("dek-model");
  const long version = r.integer();
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  DekModel model;
  r.expect("task");
  model.task = task_from_string(r.word());
  r.expect("input_dim");
  model.input_dim = static_cast<int>(r.integer());
  r.expect("width_factor");
  model.width_factor = static_cast<int>(r.integer());
  model.embedding = read_network(r, "embedding");
  model.kernel = read_network(r, "kernel");
  r.expect("end-model");
  model.validate();
  return model;
}

void save_model(const DekModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_model(model, out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

DekModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  return read_model(in);
}

}  // namespace dek
