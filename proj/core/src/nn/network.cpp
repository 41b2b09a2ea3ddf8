#include "cdqn/nn/network.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "cdqn/error.hpp"
#include "cdqn/rng.hpp"

namespace cdqn::nn {

namespace {

std::uint64_t next_stamp() noexcept {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

void validate_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) {
    throw ConfigError("network needs at least an input and an output layer, got " +
                      std::to_string(sizes.size()) + " layer size(s)");
  }
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] <= 0) {
      throw ConfigError("layer size " + std::to_string(k) + " must be positive, got " +
                        std::to_string(sizes[k]));
    }
  }
}

}  // namespace

void Gradients::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

Gradients& Gradients::operator+=(const Gradients& other) {
  if (other.weights.size() != weights.size()) throw ShapeError("gradient layer count mismatch");
  for (std::size_t k = 0; k < weights.size(); ++k) {
    weights[k] += other.weights[k];
    biases[k] += other.biases[k];
  }
  return *this;
}

Gradients& Gradients::operator*=(double factor) {
  for (auto& w : weights) w *= factor;
  for (auto& b : biases) b *= factor;
  return *this;
}

bool Gradients::all_finite() const {
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!weights[k].allFinite() || !biases[k].allFinite()) return false;
  }
  return true;
}

double Gradients::squared_norm() const {
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    total += weights[k].squaredNorm() + biases[k].squaredNorm();
  }
  return total;
}

DenseNetwork::DenseNetwork(std::vector<int> layer_sizes, std::vector<Matrix> weights,
                           std::vector<Vector> biases)
    : layer_sizes_(std::move(layer_sizes)),
      weights_(std::move(weights)),
      biases_(std::move(biases)),
      stamp_(next_stamp()) {
  validate_sizes(layer_sizes_);
  const std::size_t layers = layer_sizes_.size() - 1;
  if (weights_.size() != layers || biases_.size() != layers) {
    throw ShapeError("expected " + std::to_string(layers) + " weight matrices and bias vectors");
  }
  for (std::size_t k = 0; k < layers; ++k) {
    if (weights_[k].rows() != layer_sizes_[k + 1] || weights_[k].cols() != layer_sizes_[k] ||
        biases_[k].size() != layer_sizes_[k + 1]) {
      throw ShapeError("layer " + std::to_string(k) + " parameters do not match sizes " +
                       std::to_string(layer_sizes_[k]) + " -> " + std::to_string(layer_sizes_[k + 1]));
    }
  }
}

int DenseNetwork::input_size() const {
  if (layer_sizes_.empty()) throw UsageError("network is uninitialized");
  return layer_sizes_.front();
}

int DenseNetwork::output_size() const {
  if (layer_sizes_.empty()) throw UsageError("network is uninitialized");
  return layer_sizes_.back();
}

std::size_t DenseNetwork::parameter_count() const noexcept {
  std::size_t count = 0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    count += static_cast<std::size_t>(weights_[k].size() + biases_[k].size());
  }
  return count;
}

Matrix& DenseNetwork::weights(std::size_t layer) {
  touch();
  return weights_.at(layer);
}

Vector& DenseNetwork::biases(std::size_t layer) {
  touch();
  return biases_.at(layer);
}

void DenseNetwork::touch() noexcept { stamp_ = next_stamp(); }

void DenseNetwork::check_input_rows(Eigen::Index rows) const {
  if (layer_sizes_.empty()) throw UsageError("network is uninitialized");
  if (rows != layer_sizes_.front()) {
    throw ShapeError("input has " + std::to_string(rows) + " features, network expects " +
                     std::to_string(layer_sizes_.front()));
  }
}

Vector DenseNetwork::forward(const Vector& input) const {
  check_input_rows(input.size());
  Vector h = input;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    Vector z = weights_[k] * h + biases_[k];
    if (k + 1 < weights_.size()) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h;
}

Matrix DenseNetwork::forward(const Matrix& inputs) const {
  check_input_rows(inputs.rows());
  Matrix h = inputs;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    Matrix z = weights_[k] * h;
    z.colwise() += biases_[k];
    if (k + 1 < weights_.size()) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h;
}

Matrix DenseNetwork::forward(const Matrix& inputs, ForwardCache& cache) const {
  check_input_rows(inputs.rows());
  const std::size_t layers = weights_.size();
  cache.layer_sizes = layer_sizes_;
  cache.stamp = stamp_;
  cache.activations.resize(layers + 1);
  cache.pre_activations.resize(layers);
  cache.activations[0] = inputs;
  for (std::size_t k = 0; k < layers; ++k) {
    Matrix& z = cache.pre_activations[k];
    z.noalias() = weights_[k] * cache.activations[k];
    z.colwise() += biases_[k];
    cache.activations[k + 1] = (k + 1 < layers) ? Matrix(z.cwiseMax(0.0)) : z;
  }
  return cache.activations.back();
}

Gradients DenseNetwork::backward(const ForwardCache& cache, const Matrix& output_grad) const {
  if (cache.stamp != stamp_ || cache.layer_sizes != layer_sizes_ ||
      cache.activations.size() != weights_.size() + 1) {
    throw UsageError("forward cache does not belong to the current network parameters");
  }
  const Matrix& output = cache.activations.back();
  if (output_grad.rows() != output.rows() || output_grad.cols() != output.cols()) {
    throw ShapeError("output gradient shape does not match the cached forward output");
  }
  Gradients grads;
  const std::size_t layers = weights_.size();
  grads.weights.resize(layers);
  grads.biases.resize(layers);
  Matrix delta = output_grad;
  for (std::size_t k = layers; k-- > 0;) {
    grads.weights[k].noalias() = delta * cache.activations[k].transpose();
    grads.biases[k] = delta.rowwise().sum();
    if (k > 0) {
      Matrix upstream = weights_[k].transpose() * delta;
      delta = (cache.pre_activations[k - 1].array() > 0.0).select(upstream, 0.0);
    }
  }
  return grads;
}

Gradients DenseNetwork::zero_gradients() const {
  Gradients grads;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    grads.weights.push_back(Matrix::Zero(weights_[k].rows(), weights_[k].cols()));
    grads.biases.push_back(Vector::Zero(biases_[k].size()));
  }
  return grads;
}

std::vector<double> DenseNetwork::flat_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    for (Eigen::Index r = 0; r < weights_[k].rows(); ++r) {
      for (Eigen::Index c = 0; c < weights_[k].cols(); ++c) flat.push_back(weights_[k](r, c));
    }
    for (Eigen::Index r = 0; r < biases_[k].size(); ++r) flat.push_back(biases_[k](r));
  }
  return flat;
}

void DenseNetwork::assign_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw ShapeError("expected " + std::to_string(parameter_count()) + " parameters, got " +
                     std::to_string(values.size()));
  }
  std::size_t i = 0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    for (Eigen::Index r = 0; r < weights_[k].rows(); ++r) {
      for (Eigen::Index c = 0; c < weights_[k].cols(); ++c) weights_[k](r, c) = values[i++];
    }
    for (Eigen::Index r = 0; r < biases_[k].size(); ++r) biases_[k](r) = values[i++];
  }
  touch();
}

bool operator==(const DenseNetwork& a, const DenseNetwork& b) {
  if (a.layer_sizes_ != b.layer_sizes_) return false;
  for (std::size_t k = 0; k < a.weights_.size(); ++k) {
    if (a.weights_[k] != b.weights_[k] || a.biases_[k] != b.biases_[k]) return false;
  }
  return true;
}

DenseNetwork init_network(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  validate_sizes(layer_sizes);
  Rng rng(seed);
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
    const int fan_in = layer_sizes[k];
    const int fan_out = layer_sizes[k + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    // Row-major draw order so the stream does not depend on Eigen's storage order.
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-limit, limit);
    }
    weights.push_back(std::move(w));
    biases.push_back(Vector::Zero(fan_out));
  }
  return DenseNetwork(layer_sizes, std::move(weights), std::move(biases));
}

void copy_weights(const DenseNetwork& source, DenseNetwork& target) {
  if (source.layer_sizes() != target.layer_sizes()) {
    throw ShapeError("cannot copy weights between networks with different architectures");
  }
  target = source;
  target.touch();
}

}  // namespace cdqn::nn
