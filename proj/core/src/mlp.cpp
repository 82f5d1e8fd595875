#include "ocflow/mlp.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ocflow/errors.hpp"

namespace ocflow {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Mlp::Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) {
    throw invalid_input_error("mlp: at least one layer required");
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    if (l.weight.rows() != l.bias.size()) {
      throw invalid_input_error("mlp: bias size does not match weight rows");
    }
    if (i > 0 && layers_[i - 1].weight.rows() != l.weight.cols()) {
      throw invalid_input_error("mlp: layer dimensions do not chain");
    }
  }
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  Eigen::VectorXd h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i].weight * h + layers_[i].bias;
    if (i + 1 < layers_.size()) h = h.array().tanh().matrix();
  }
  return h;
}

Eigen::VectorXd Mlp::vjp(const Eigen::VectorXd& x,
                         const Eigen::VectorXd& cotangent) const {
  // Forward pass caching post-activation values per hidden layer.
  std::vector<Eigen::VectorXd> act(layers_.size());
  Eigen::VectorXd h = x;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    h = (layers_[i].weight * h + layers_[i].bias).array().tanh().matrix();
    act[i] = h;
  }
  Eigen::VectorXd g = layers_.back().weight.transpose() * cotangent;
  for (std::size_t i = layers_.size() - 1; i-- > 0;) {
    // d tanh(u)/du = 1 - tanh(u)^2, with tanh(u) already cached.
    g = (1.0 - act[i].array().square()) * g.array();
    g = layers_[i].weight.transpose() * g;
  }
  return g;
}

Eigen::VectorXd Mlp::jvp(const Eigen::VectorXd& x,
                         const Eigen::VectorXd& tangent) const {
  Eigen::VectorXd h = x;
  Eigen::VectorXd d = tangent;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::VectorXd u = layers_[i].weight * h + layers_[i].bias;
    d = layers_[i].weight * d;
    if (i + 1 < layers_.size()) {
      h = u.array().tanh().matrix();
      d = (1.0 - h.array().square()) * d.array();
    } else {
      h = u;
    }
  }
  return d;
}

Mlp Mlp::random(const std::vector<int>& sizes, Rng& rng, double gain) {
  if (sizes.size() < 2) {
    throw invalid_input_error("mlp: need input and output sizes");
  }
  std::vector<Layer> layers(sizes.size() - 1);
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    const int rows = sizes[i + 1];
    const int cols = sizes[i];
    const double scale = gain / std::sqrt(static_cast<double>(cols));
    layers[i].weight.resize(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) layers[i].weight(r, c) = scale * rng.normal();
    layers[i].bias = Eigen::VectorXd::Zero(rows);
  }
  return Mlp(std::move(layers));
}

void Mlp::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw invalid_input_error("mlp: cannot open '" + path + "' for writing");
  out << "layers: " << layers_.size() << "\n";
  for (const Layer& l : layers_) {
    out << l.weight.rows() << " " << l.weight.cols() << "\n";
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
        out << (c ? " " : "") << fmt17(l.weight(r, c));
      }
      out << "\n";
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
      out << (r ? " " : "") << fmt17(l.bias[r]);
    }
    out << "\n";
  }
  if (!out) throw invalid_input_error("mlp: write to '" + path + "' failed");
}

Mlp Mlp::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input_error("mlp: cannot open '" + path + "'");
  std::string tag;
  std::size_t count = 0;
  in >> tag >> count;
  if (!in || tag != "layers:" || count == 0) {
    throw invalid_input_error("mlp: '" + path + "' missing 'layers: n' header");
  }
  std::vector<Layer> layers(count);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    in >> rows >> cols;
    if (!in || rows <= 0 || cols <= 0) {
      throw invalid_input_error("mlp: bad layer shape in '" + path + "'");
    }
    layers[i].weight.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) in >> layers[i].weight(r, c);
    layers[i].bias.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) in >> layers[i].bias[r];
    if (!in) throw invalid_input_error("mlp: truncated data in '" + path + "'");
  }
  return Mlp(std::move(layers));
}

}  // namespace ocflow
