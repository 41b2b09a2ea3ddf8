#include "cdqn/conformal/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "cdqn/error.hpp"
#include "cdqn/nn/ops.hpp"

namespace cdqn::conformal {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("significance alpha must lie in (0, 1)");
}

void require_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("threshold tau must lie in [0, 1]");
}

}  // namespace

double nonconformity(const agents::PolicyNet& pnet, const Vector& state, int action) {
  const Vector probs = pnet.probabilities(state);
  if (action < 0 || action >= probs.size()) throw DomainError("action outside the policy's action range");
  return 1.0 - probs(action);
}

std::size_t conformal_rank(std::size_t n, double alpha) {
  require_alpha(alpha);
  const double level = static_cast<double>(n + 1) * (1.0 - alpha);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(level - 1e-9)));
}

double conformal_threshold(std::span<const double> sorted_scores, double alpha) {
  if (sorted_scores.empty()) throw DataError("calibration set is empty");
  const std::size_t k = conformal_rank(sorted_scores.size(), alpha);
  if (k > sorted_scores.size()) return 1.0;
  return sorted_scores[k - 1];
}

CalibrationResult calibrate_scores(std::vector<double> scores, double alpha) {
  require_alpha(alpha);
  if (scores.empty()) throw DataError("calibration set is empty");
  std::sort(scores.begin(), scores.end());
  CalibrationResult result;
  result.alpha = alpha;
  result.n = scores.size();
  result.tau = conformal_threshold(scores, alpha);
  result.scores = std::move(scores);
  return result;
}

CalibrationResult calibrate(const agents::PolicyNet& pnet, const agents::TransitionSet& calibration, double alpha) {
  require_alpha(alpha);
  if (calibration.size() == 0) throw DataError("calibration set is empty");
  const Matrix probs = pnet.probabilities(calibration.states);
  std::vector<double> scores(calibration.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int a = calibration.actions[i];
    if (a < 0 || a >= probs.rows()) throw DomainError("calibration action outside the policy's action range");
    scores[i] = 1.0 - probs(a, static_cast<Eigen::Index>(i));
  }
  return calibrate_scores(std::move(scores), alpha);
}

CalibrationResult retune_threshold(const CalibrationResult& result, double alpha) {
  require_alpha(alpha);
  CalibrationResult out = result;
  out.alpha = alpha;
  out.tau = conformal_threshold(out.scores, alpha);
  return out;
}

std::vector<int> confident_set(const Vector& probs, double tau) {
  require_tau(tau);
  const double floor = 1.0 - tau;
  std::vector<int> members;
  for (Eigen::Index a = 0; a < probs.size(); ++a) {
    if (probs(a) >= floor) members.push_back(static_cast<int>(a));
  }
  return members;
}

std::vector<int> prediction_set(const agents::PolicyNet& pnet, const Vector& state, double tau) {
  return confident_set(pnet.probabilities(state), tau);
}

int select_action(const Vector& q_values, const Vector& probs, double tau) {
  require_tau(tau);
  if (q_values.size() != probs.size() || q_values.size() == 0) {
    throw ShapeError("Q-values and probabilities must be non-empty and equally long");
  }
  const double floor = 1.0 - tau;
  int best = -1;
  for (Eigen::Index a = 0; a < probs.size(); ++a) {
    if (probs(a) >= floor && (best < 0 || q_values(a) > q_values(best))) best = static_cast<int>(a);
  }
  return best >= 0 ? best : static_cast<int>(nn::argmax(q_values));
}

int select_action(const nn::DenseNetwork& qnet, const agents::PolicyNet& pnet, const Vector& state, double tau) {
  return select_action(qnet.forward(state), pnet.probabilities(state), tau);
}

std::vector<int> select_actions(const nn::DenseNetwork& qnet, const agents::PolicyNet& pnet, const Matrix& states,
                                double tau) {
  const Matrix q = qnet.forward(states);
  const Matrix probs = pnet.probabilities(states);
  std::vector<int> actions(static_cast<std::size_t>(states.cols()));
  for (Eigen::Index i = 0; i < states.cols(); ++i) {
    actions[static_cast<std::size_t>(i)] = select_action(q.col(i), probs.col(i), tau);
  }
  return actions;
}

double empirical_coverage(const agents::PolicyNet& pnet, double tau, const agents::TransitionSet& test) {
  require_tau(tau);
  if (test.size() == 0) throw DataError("coverage needs a non-empty test set");
  const Matrix probs = pnet.probabilities(test.states);
  const double floor = 1.0 - tau;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (probs(test.actions[i], static_cast<Eigen::Index>(i)) >= floor) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(test.size());
}

void save_calibration(const std::filesystem::path& path, const CalibrationResult& result) {
  nlohmann::json doc;
  doc["format"] = "cdqn-calibration";
  doc["version"] = 1;
  doc["alpha"] = result.alpha;
  doc["n"] = result.n;
  doc["tau"] = result.tau;
  doc["scores"] = result.scores;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(1) << '\n';
  if (!out) throw IoError("failed to write " + path.string());
}

CalibrationResult load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    const nlohmann::json doc = nlohmann::json::parse(in);
    if (doc.at("format") != "cdqn-calibration") throw IoError(path.string() + " is not a calibration artifact");
    if (doc.at("version") != 1) throw IoError("unsupported calibration artifact version");
    CalibrationResult result;
    result.alpha = doc.at("alpha").get<double>();
    result.n = doc.at("n").get<std::size_t>();
    result.tau = doc.at("tau").get<double>();
    result.scores = doc.at("scores").get<std::vector<double>>();
    if (result.scores.size() != result.n || !std::is_sorted(result.scores.begin(), result.scores.end())) {
      throw IoError("calibration artifact scores are inconsistent");
    }
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed calibration artifact " + path.string() + ": " + e.what());
  }
}

}  // namespace cdqn::conformal
