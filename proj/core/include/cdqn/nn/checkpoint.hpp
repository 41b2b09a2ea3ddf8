#pragma once

#include <filesystem>
#include <iosfwd>

#include "cdqn/nn/network.hpp"

namespace cdqn::nn {

// Binary network checkpoint, little-endian:
//
//   magic    8 bytes  "CDQNNET\0"
//   version  u32      1
//   count    u32      number of layer sizes L
//   sizes    L x i32
//   per affine layer k: weights (sizes[k+1] x sizes[k], row-major f64),
//                       biases (sizes[k+1] f64)
//
// Values are stored bit-for-bit, so save/load round-trips exactly.

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_network(std::ostream& out, const DenseNetwork& net);
DenseNetwork read_network(std::istream& in);

void save_network(const std::filesystem::path& path, const DenseNetwork& net);
DenseNetwork load_network(const std::filesystem::path& path);

}  // namespace cdqn::nn
