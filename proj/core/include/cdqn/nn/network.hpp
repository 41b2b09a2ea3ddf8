#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cdqn::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Parameter-shaped storage used for gradients and optimizer moments.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  void set_zero();
  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double factor);
  bool all_finite() const;
  double squared_norm() const;
};

/// Intermediate values of a batched forward pass, consumed by backward().
///
/// The cache remembers the parameter stamp of the network that produced it;
/// backward() rejects a cache whose network has since been modified.
struct ForwardCache {
  std::vector<int> layer_sizes;
  std::uint64_t stamp = 0;
  std::vector<Matrix> activations;      // activations[0] is the input batch
  std::vector<Matrix> pre_activations;  // one per affine layer
};

/// Fully connected feedforward network: ReLU on hidden layers, identity on
/// the output layer. Batches are stored one sample per column.
class DenseNetwork {
 public:
  DenseNetwork() = default;

  /// Builds a network from explicit parameters; weights[k] must be
  /// layer_sizes[k+1] x layer_sizes[k] and biases[k] of length layer_sizes[k+1].
  DenseNetwork(std::vector<int> layer_sizes, std::vector<Matrix> weights, std::vector<Vector> biases);

  const std::vector<int>& layer_sizes() const noexcept { return layer_sizes_; }
  std::size_t num_layers() const noexcept { return weights_.size(); }
  int input_size() const;
  int output_size() const;
  std::size_t parameter_count() const noexcept;

  const Matrix& weights(std::size_t layer) const { return weights_.at(layer); }
  const Vector& biases(std::size_t layer) const { return biases_.at(layer); }
  // Mutable access counts as a modification and invalidates outstanding caches.
  Matrix& weights(std::size_t layer);
  Vector& biases(std::size_t layer);

  /// Identifies the current parameter values; changes on every mutation.
  std::uint64_t stamp() const noexcept { return stamp_; }

  Vector forward(const Vector& input) const;
  Matrix forward(const Matrix& inputs) const;
  Matrix forward(const Matrix& inputs, ForwardCache& cache) const;

  /// Reverse-mode derivatives of sum_{i,b} output_grad(i,b) * output(i,b)
  /// with respect to every parameter.
  Gradients backward(const ForwardCache& cache, const Matrix& output_grad) const;

  Gradients zero_gradients() const;

  /// Parameters flattened as [W0 row-major, b0, W1 row-major, b1, ...].
  std::vector<double> flat_parameters() const;
  void assign_flat_parameters(std::span<const double> values);

  /// Marks the parameters as changed.
  void touch() noexcept;

  friend bool operator==(const DenseNetwork& a, const DenseNetwork& b);

 private:
  void check_input_rows(Eigen::Index rows) const;

  std::vector<int> layer_sizes_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
  std::uint64_t stamp_ = 0;
};

/// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero, drawn from
/// an Rng seeded with `seed`. Requires at least two positive layer sizes.
DenseNetwork init_network(const std::vector<int>& layer_sizes, std::uint64_t seed);

/// Overwrites `target` with the parameters of `source`.
void copy_weights(const DenseNetwork& source, DenseNetwork& target);

}  // namespace cdqn::nn
