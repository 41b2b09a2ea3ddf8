#include "cdqn/nn/ops.hpp"

#include <cmath>

#include "cdqn/error.hpp"

namespace cdqn::nn {

namespace {

void require_finite(const Eigen::Ref<const Matrix>& values, const char* op) {
  if (!values.allFinite()) throw NumericError(std::string(op) + ": non-finite input");
}

}  // namespace

Vector softmax(const Vector& logits) {
  require_finite(logits, "softmax");
  Vector e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

Vector log_softmax(const Vector& logits) {
  require_finite(logits, "log_softmax");
  return logits.array() - logsumexp(logits);
}

double logsumexp(const Vector& values) {
  require_finite(values, "logsumexp");
  const double peak = values.maxCoeff();
  return peak + std::log((values.array() - peak).exp().sum());
}

Matrix softmax_columns(const Matrix& logits) {
  require_finite(logits, "softmax");
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double peak = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - peak).exp();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

Vector logsumexp_columns(const Matrix& values) {
  require_finite(values, "logsumexp");
  Vector out(values.cols());
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    const double peak = values.col(c).maxCoeff();
    out(c) = peak + std::log((values.col(c).array() - peak).exp().sum());
  }
  return out;
}

Eigen::Index argmax(const Eigen::Ref<const Vector>& values) {
  if (values.size() == 0) throw ShapeError("argmax of an empty vector");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(best)) best = i;
  }
  return best;
}

}  // namespace cdqn::nn
