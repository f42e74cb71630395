#include "dek/dek_model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "dek/error.hpp"
#include "dek/random.hpp"

namespace dek {

std::string_view to_string(Task task) {
  return task == Task::classification ? "classification" : "regression";
}

Task task_from_string(std::string_view name) {
  if (name == "classification") return Task::classification;
  if (name == "regression") return Task::regression;
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

void DekModel::validate() const {
  if (input_dim <= 0) throw ShapeError("input_dim must be positive");
  if (width_factor <= 0) throw ShapeError("width_factor must be positive");
  embedding.validate();
  kernel.validate();
  const Eigen::Index k = embedding_width();
  if (embedding.input_dim() != input_dim) {
    throw ShapeError("embedding network expects " + std::to_string(embedding.input_dim()) +
                     " inputs, model input_dim is " + std::to_string(input_dim));
  }
  for (std::size_t l = 0; l < embedding.layers.size(); ++l) {
    if (embedding.layers[l].out_dim() != k) {
      throw ShapeError("embedding layer " + std::to_string(l) + " has width " +
                       std::to_string(embedding.layers[l].out_dim()) + ", expected " +
                       std::to_string(k));
    }
  }
  if (kernel.layers.size() < 1) throw ShapeError("kernel network has no output layer");
  for (std::size_t l = 0; l + 1 < kernel.layers.size(); ++l) {
    if (kernel.layers[l].out_dim() != 2 * k) {
      throw ShapeError("kernel layer " + std::to_string(l) + " has width " +
                       std::to_string(kernel.layers[l].out_dim()) + ", expected " +
                       std::to_string(2 * k));
    }
  }
  if (kernel.input_dim() != 2 * k) {
    throw ShapeError("kernel network expects " + std::to_string(kernel.input_dim()) +
                     " inputs, combine produces " + std::to_string(2 * k));
  }
  if (kernel.output_dim() != 1) throw ShapeError("kernel output layer must have one unit");
  const net::Activation expected =
      task == Task::classification ? net::Activation::sigmoid : net::Activation::relu;
  if (kernel.output_activation != expected) {
    throw ConfigError("kernel output activation must be " +
                      std::string(net::to_string(expected)) + " for " +
                      std::string(to_string(task)));
  }
}

DekModel make_dek_model(const DekArchitecture& arch, std::uint64_t seed) {
  if (arch.input_dim <= 0) throw ConfigError("input_dim must be positive");
  if (arch.width_factor <= 0) throw ConfigError("width_factor must be positive");
  if (arch.embedding_layers <= 0) throw ConfigError("embedding_layers must be positive");
  if (arch.kernel_hidden_layers < 0) throw ConfigError("kernel_hidden_layers must be >= 0");

  const int k = arch.width_factor * arch.input_dim;
  Rng rng(seed);

  std::vector<int> emb_widths{arch.input_dim};
  for (int l = 0; l < arch.embedding_layers; ++l) emb_widths.push_back(k);
  std::vector<int> head_widths{2 * k};
  for (int l = 0; l < arch.kernel_hidden_layers; ++l) head_widths.push_back(2 * k);
  head_widths.push_back(1);

  DekModel model;
  model.width_factor = arch.width_factor;
  model.input_dim = arch.input_dim;
  model.task = arch.task;
  model.embedding = net::init_mlp(emb_widths, arch.hidden_activation, arch.hidden_activation, rng);
  model.kernel = net::init_mlp(head_widths, arch.hidden_activation,
                               arch.task == Task::classification ? net::Activation::sigmoid
                                                                 : net::Activation::relu,
                               rng);
  if (arch.task == Task::regression) model.kernel.layers.back().biases.setConstant(0.5);
  return model;
}

void combine_into(std::span<const double> o_i, std::span<const double> o_j,
                  Eigen::VectorXd& out) {
  if (o_i.size() != o_j.size()) {
    throw ShapeError("combine: embeddings have lengths " + std::to_string(o_i.size()) +
                     " and " + std::to_string(o_j.size()));
  }
  const std::size_t d = o_i.size();
  out.resize(static_cast<Eigen::Index>(2 * d));
  double* u = out.data();
  for (std::size_t m = 0; m < d; ++m) {
    u[m] = o_i[m] * o_j[m];
    u[d + m] = std::fabs(o_i[m] - o_j[m]);
  }
}

Eigen::VectorXd combine(std::span<const double> o_i, std::span<const double> o_j) {
  Eigen::VectorXd out;
  combine_into(o_i, o_j, out);
  return out;
}

namespace {

void combine_backward_into(std::span<const double> o_i, std::span<const double> o_j,
                           std::span<const double> g, Eigen::VectorXd& gi,
                           Eigen::VectorXd& gj) {
  const std::size_t d = o_i.size();
  if (o_j.size() != d || g.size() != 2 * d) {
    throw ShapeError("combine_backward: inconsistent lengths " + std::to_string(o_i.size()) +
                     ", " + std::to_string(o_j.size()) + ", " + std::to_string(g.size()));
  }
  gi.resize(static_cast<Eigen::Index>(d));
  gj.resize(static_cast<Eigen::Index>(d));
  for (std::size_t m = 0; m < d; ++m) {
    const double diff = o_i[m] - o_j[m];
    const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    gi[static_cast<Eigen::Index>(m)] = g[m] * o_j[m] + g[d + m] * sign;
    gj[static_cast<Eigen::Index>(m)] = g[m] * o_i[m] - g[d + m] * sign;
  }
}

}  // namespace

CombineGrads combine_backward(std::span<const double> o_i, std::span<const double> o_j,
                              std::span<const double> upstream_grad) {
  CombineGrads out;
  combine_backward_into(o_i, o_j, upstream_grad, out.grad_o_i, out.grad_o_j);
  return out;
}

double dek_forward_into(const DekModel& model, std::span<const double> x_i,
                        std::span<const double> x_j, PairTrace& trace) {
  if (static_cast<int>(x_i.size()) != model.input_dim ||
      static_cast<int>(x_j.size()) != model.input_dim) {
    throw ShapeError("dek_forward: model expects inputs of length " +
                     std::to_string(model.input_dim) + ", got " + std::to_string(x_i.size()) +
                     " and " + std::to_string(x_j.size()));
  }
  net::mlp_forward_into(model.embedding, x_i, trace.branch_i);
  net::mlp_forward_into(model.embedding, x_j, trace.branch_j);
  combine_into(as_span(trace.branch_i.output()), as_span(trace.branch_j.output()),
               trace.combined);
  net::mlp_forward_into(model.kernel, as_span(trace.combined), trace.head);
  return trace.head.output()[0];
}

PairEvaluation dek_forward(const DekModel& model, std::span<const double> x_i,
                           std::span<const double> x_j) {
  PairEvaluation eval;
  eval.similarity = dek_forward_into(model, x_i, x_j, eval.trace);
  return eval;
}

double similarity(const DekModel& model, std::span<const double> x_i,
                  std::span<const double> x_j) {
  PairTrace trace;
  return dek_forward_into(model, x_i, x_j, trace);
}

DekGrads DekGrads::zeros_like(const DekModel& model) {
  return {net::MlpGrads::zeros_like(model.embedding), net::MlpGrads::zeros_like(model.kernel)};
}

void DekGrads::set_zero() {
  embedding.set_zero();
  kernel.set_zero();
}

DekGrads& DekGrads::operator+=(const DekGrads& other) {
  embedding += other.embedding;
  kernel += other.kernel;
  return *this;
}

DekGrads& DekGrads::operator*=(double factor) {
  embedding *= factor;
  kernel *= factor;
  return *this;
}

bool DekGrads::all_finite() const { return embedding.all_finite() && kernel.all_finite(); }

void dek_backward_accumulate(const DekModel& model, const PairTrace& trace, double dl_dk,
                             DekGrads& acc, DekBackwardWorkspace& ws) {
  const double seed[1] = {dl_dk};
  net::mlp_backward_accumulate(model.kernel, trace.head, seed, acc.kernel, &ws.combined_grad,
                               ws.net);
  combine_backward_into(as_span(trace.branch_i.output()), as_span(trace.branch_j.output()),
                        as_span(ws.combined_grad), ws.grad_o_i, ws.grad_o_j);
  net::mlp_backward_accumulate(model.embedding, trace.branch_i, as_span(ws.grad_o_i),
                               acc.embedding, nullptr, ws.net);
  net::mlp_backward_accumulate(model.embedding, trace.branch_j, as_span(ws.grad_o_j),
                               acc.embedding, nullptr, ws.net);
}

DekGrads dek_backward(const DekModel& model, const PairTrace& trace, double dl_dk) {
  DekGrads grads = DekGrads::zeros_like(model);
  DekBackwardWorkspace ws;
  dek_backward_accumulate(model, trace, dl_dk, grads, ws);
  return grads;
}

void apply_update(DekModel& model, const DekGrads& grads, double learning_rate) {
  if (!grads.all_finite()) throw DomainError("non-finite gradient; update aborted");
  net::sgd_update_in_place(model.embedding, grads.embedding, learning_rate);
  net::sgd_update_in_place(model.kernel, grads.kernel, learning_rate);
}

SampleMatrix embed_all(const DekModel& model, const SampleMatrix& samples) {
  if (samples.rows() > 0 && samples.cols() != model.input_dim) {
    throw ShapeError("samples have " + std::to_string(samples.cols()) +
                     " features, model expects " + std::to_string(model.input_dim));
  }
  SampleMatrix out(samples.rows(), model.embedding_width());
  net::ForwardTrace trace;
  for (Eigen::Index p = 0; p < samples.rows(); ++p) {
    net::mlp_forward_into(model.embedding, row_span(samples, p), trace);
    out.row(p) = trace.output().transpose();
  }
  return out;
}

double head_similarity(const DekModel& model, std::span<const double> o_i,
                       std::span<const double> o_j, Eigen::VectorXd& combined,
                       net::ForwardTrace& scratch) {
  combine_into(o_i, o_j, combined);
  net::mlp_forward_into(model.kernel, as_span(combined), scratch);
  return scratch.output()[0];
}

GramMatrix gram(const DekModel& model, const SampleMatrix& a, const SampleMatrix& b) {
  GramMatrix g;
  g.values.resize(a.rows(), b.rows());
  if (a.rows() == 0 || b.rows() == 0) return g;
  const SampleMatrix ea = embed_all(model, a);
  const SampleMatrix eb = embed_all(model, b);
  Eigen::VectorXd combined;
  net::ForwardTrace scratch;
  for (Eigen::Index p = 0; p < ea.rows(); ++p)
    for (Eigen::Index q = 0; q < eb.rows(); ++q)
      g.values(p, q) = head_similarity(model, row_span(ea, p), row_span(eb, q), combined, scratch);
  return g;
}

GramMatrix gram(const DekModel& model, const SampleMatrix& x) {
  GramMatrix g;
  g.symmetric = true;
  g.values.resize(x.rows(), x.rows());
  if (x.rows() == 0) return g;
  const SampleMatrix e = embed_all(model, x);
  Eigen::VectorXd combined;
  net::ForwardTrace scratch;
  for (Eigen::Index p = 0; p < e.rows(); ++p) {
    for (Eigen::Index q = p; q < e.rows(); ++q) {
      const double v = head_similarity(model, row_span(e, p), row_span(e, q), combined, scratch);
      g.values(p, q) = v;
      g.values(q, p) = v;
    }
  }
  return g;
}

}  // namespace dek
