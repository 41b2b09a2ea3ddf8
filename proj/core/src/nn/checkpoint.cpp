#include "cdqn/nn/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "cdqn/error.hpp"

namespace cdqn::nn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'D', 'Q', 'N', 'N', 'E', 'T', '\0'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("truncated network checkpoint");
  return value;
}

}  // namespace

void write_network(std::ostream& out, const DenseNetwork& net) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kCheckpointVersion);
  const auto& sizes = net.layer_sizes();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(sizes.size()));
  for (int s : sizes) put<std::int32_t>(out, s);
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    const Matrix& w = net.weights(k);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) put<double>(out, w(r, c));
    }
    const Vector& b = net.biases(k);
    for (Eigen::Index r = 0; r < b.size(); ++r) put<double>(out, b(r));
  }
  if (!out) throw IoError("failed to write network checkpoint");
}

DenseNetwork read_network(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError("not a network checkpoint (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw IoError("unsupported network checkpoint version " + std::to_string(version));
  }
  const auto count = get<std::uint32_t>(in);
  if (count < 2 || count > 1024) throw IoError("corrupt network checkpoint (layer count)");
  std::vector<int> sizes(count);
  for (auto& s : sizes) {
    s = get<std::int32_t>(in);
    if (s <= 0) throw IoError("corrupt network checkpoint (layer size)");
  }
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    Matrix w(sizes[k + 1], sizes[k]);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = get<double>(in);
    }
    Vector b(sizes[k + 1]);
    for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = get<double>(in);
    weights.push_back(std::move(w));
    biases.push_back(std::move(b));
  }
  return DenseNetwork(std::move(sizes), std::move(weights), std::move(biases));
}

void save_network(const std::filesystem::path& path, const DenseNetwork& net) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_network(out, net);
}

DenseNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_network(in);
}

}  // namespace cdqn::nn
