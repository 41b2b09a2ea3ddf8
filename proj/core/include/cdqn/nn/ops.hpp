#pragma once

#include "cdqn/nn/network.hpp"

namespace cdqn::nn {

// Max-shifted softmax family. All throw NumericError on non-finite input.

Vector softmax(const Vector& logits);
Vector log_softmax(const Vector& logits);
double logsumexp(const Vector& values);

/// Column-wise variants for batches stored one sample per column.
Matrix softmax_columns(const Matrix& logits);
Vector logsumexp_columns(const Matrix& values);

/// Index of the largest entry; ties resolve to the lowest index.
Eigen::Index argmax(const Eigen::Ref<const Vector>& values);

}  // namespace cdqn::nn
