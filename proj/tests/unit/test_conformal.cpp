#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "cdqn/agents/losses.hpp"
#include "cdqn/conformal/conformal.hpp"
#include "cdqn/error.hpp"
#include "support/oracles.hpp"

using namespace cdqn;
using namespace cdqn::conformal;
using agents::PolicyNet;
using agents::TransitionSet;

namespace {

// Policy net whose probabilities do not depend on the state.
PolicyNet constant_policy(const std::vector<double>& probs, int dim = 1) {
  Vector logits(static_cast<Eigen::Index>(probs.size()));
  for (std::size_t i = 0; i < probs.size(); ++i) logits(static_cast<Eigen::Index>(i)) = std::log(probs[i]);
  const int n = static_cast<int>(probs.size());
  return PolicyNet{nn::DenseNetwork({dim, n}, {Matrix::Zero(n, dim)}, {logits})};
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TransitionSet states_with_actions(const Matrix& states, std::vector<int> actions) {
  TransitionSet t;
  t.states = states;
  t.next_states = states;
  t.rewards = Vector::Zero(states.cols());
  t.actions = std::move(actions);
  t.done.assign(t.actions.size(), 1);
  t.next_actions.assign(t.actions.size(), -1);
  return t;
}

std::vector<double> random_scores(Rng& rng, std::size_t n) {
  std::vector<double> s(n);
  for (auto& x : s) x = rng.uniform() < 0.1 ? std::round(rng.uniform() * 10.0) / 10.0 : rng.uniform();
  return s;
}

}  // namespace

TEST_CASE("nonconformity") {
  CHECK(nonconformity(constant_policy({0.85, 0.15}), Vector::Zero(1), 0) == doctest::Approx(0.15).epsilon(1e-12));
  const PolicyNet uniform{nn::DenseNetwork({2, 343}, {Matrix::Zero(343, 2)}, {Vector::Zero(343)})};
  CHECK(nonconformity(uniform, Vector::Zero(2), 17) == doctest::Approx(1.0 - 1.0 / 343).epsilon(1e-14));
  CHECK(nonconformity(uniform, Vector::Zero(2), 17) == doctest::Approx(0.99708).epsilon(1e-5));
  Vector certain = Vector::Constant(3, -900.0);
  certain(1) = 900.0;
  const PolicyNet sure{nn::DenseNetwork({1, 3}, {Matrix::Zero(3, 1)}, {certain})};
  CHECK(nonconformity(sure, Vector::Zero(1), 1) == 0.0);
  CHECK_THROWS_AS(nonconformity(sure, Vector::Zero(1), 3), DomainError);
}

TEST_CASE("conformal rank and threshold") {
  CHECK(conformal_rank(19, 0.1) == 18u);
  CHECK(conformal_rank(4, 0.05) == 5u);
  CHECK(conformal_rank(99, 0.15) == 85u);
  std::vector<double> scores(19);
  for (int i = 0; i < 19; ++i) scores[i] = (i + 1) / 100.0;
  CHECK(conformal_threshold(scores, 0.1) == 0.18);
  CHECK(conformal_threshold(std::vector<double>{0.1, 0.2, 0.3, 0.4}, 0.05) == 1.0);
  CHECK_THROWS_AS(conformal_threshold(std::vector<double>{}, 0.1), DataError);
  CHECK_THROWS_AS(conformal_rank(10, 0.0), DomainError);
  CHECK_THROWS_AS(conformal_rank(10, 1.0), DomainError);
}

TEST_CASE("calibrate") {
  SUBCASE("equal scores") {
    for (double a : {0.01, 0.15, 0.5, 0.9}) {
      const auto r = calibrate_scores(std::vector<double>(500, 0.3), a);
      CHECK(r.tau == 0.3);
    }
  }
  SUBCASE("scores come from the policy and are sorted") {
    const PolicyNet p = constant_policy({0.5, 0.3, 0.2});
    const auto data = states_with_actions(Matrix::Zero(1, 5), {0, 1, 2, 1, 0});
    const auto r = calibrate(p, data, 0.1);
    CHECK(r.n == 5u);
    CHECK(std::is_sorted(r.scores.begin(), r.scores.end()));
    CHECK(r.scores.front() == doctest::Approx(0.5));
    CHECK(r.scores.back() == doctest::Approx(0.8));
    CHECK(r.tau == 1.0);  // ceil(6 * 0.9) = 6 > 5
    CHECK(r.alpha == 0.1);
  }
  SUBCASE("empty calibration set") {
    const auto data = states_with_actions(Matrix::Zero(1, 0), {});
    CHECK_THROWS_AS(calibrate(constant_policy({0.5, 0.5}), data, 0.1), DataError);
    CHECK_THROWS_AS(calibrate_scores({}, 0.1), DataError);
  }
}

TEST_CASE("property: threshold equals a sort-and-index oracle") {
  Rng rng(1);
  const std::vector<std::pair<long, long>> alphas{{1, 100}, {5, 100}, {10, 100}, {15, 100}, {25, 100}, {50, 100}};
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(500);
    const auto scores = random_scores(rng, n);
    for (auto [num, den] : alphas) {
      const double alpha = static_cast<double>(num) / static_cast<double>(den);
      CHECK(calibrate_scores(scores, alpha).tau == oracle::brute_force_threshold(scores, num, den));
    }
  }
}

TEST_CASE("prediction sets") {
  const Vector p = vec({0.7, 0.2, 0.1});
  CHECK(confident_set(p, 0.5) == std::vector<int>{0});
  CHECK(confident_set(p, 0.8) == std::vector<int>{0, 1});  // 0.2 >= 0.2 is included
  CHECK(confident_set(p, 1.0) == std::vector<int>{0, 1, 2});
  CHECK(confident_set(p, 0.05).empty());
  CHECK_THROWS_AS(confident_set(p, 1.5), DomainError);
  const PolicyNet uniform{nn::DenseNetwork({2, 343}, {Matrix::Zero(343, 2)}, {Vector::Zero(343)})};
  CHECK(prediction_set(uniform, Vector::Zero(2), 1.0).size() == 343u);
}

TEST_CASE("select_action") {
  const Vector p = vec({0.7, 0.2, 0.1});
  const Vector q = vec({0.0, 5.0, 10.0});
  CHECK(select_action(q, p, 0.85) == 1);
  CHECK(select_action(q, p, 0.05) == 2);
  CHECK(select_action(q, p, 1.0) == 2);
  CHECK(select_action(vec({3.0, 3.0, 1.0}), p, 1.0) == 0);  // tie to the lowest index
  CHECK_THROWS_AS(select_action(vec({1.0, 2.0}), p, 0.5), ShapeError);
}

TEST_CASE("property: selection is Q-maximal within the confident set, else globally") {
  Rng rng(2);
  for (int trial = 0; trial < 2000; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.uniform_index(30));
    Vector probs(n);
    for (Eigen::Index i = 0; i < n; ++i) probs(i) = rng.uniform() + 1e-3;
    probs /= probs.sum();
    Vector q(n);
    for (Eigen::Index i = 0; i < n; ++i) q(i) = std::round(rng.normal() * 4.0) / 4.0;  // ties are common
    const double tau = rng.uniform_index(10) == 0 ? 1.0 : rng.uniform();
    const int a = select_action(q, probs, tau);
    const auto set = confident_set(probs, tau);
    if (set.empty()) {
      CHECK(q(a) == q.maxCoeff());
      for (Eigen::Index i = 0; i < a; ++i) CHECK(q(i) < q(a));
    } else {
      CHECK(std::find(set.begin(), set.end(), a) != set.end());
      for (int b : set) {
        CHECK(q(b) <= q(a));
        if (b < a) CHECK(q(b) < q(a));
      }
    }
  }
}

TEST_CASE("network-level selection with tau = 1 is greedy") {
  Rng rng(3);
  const auto qnet = nn::init_network({4, 10, 343}, 1);
  const PolicyNet pnet{nn::init_network({4, 10, 343}, 2)};
  Matrix states(4, 200);
  for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = rng.normal();
  const auto chosen = select_actions(qnet, pnet, states, 1.0);
  const auto greedy = agents::greedy_actions(qnet, states);
  CHECK(chosen == greedy);
  for (Eigen::Index i = 0; i < 10; ++i) CHECK(select_action(qnet, pnet, Vector(states.col(i)), 1.0) == greedy[i]);
}

TEST_CASE("empirical coverage") {
  const PolicyNet p = constant_policy({0.6, 0.3, 0.1});
  const auto data = states_with_actions(Matrix::Zero(1, 4), {0, 1, 2, 0});
  CHECK(empirical_coverage(p, 1.0, data) == 1.0);
  CHECK(empirical_coverage(p, 0.0, data) == 0.0);
  CHECK(empirical_coverage(p, 0.75, data) == 0.75);
  CHECK_THROWS_AS(empirical_coverage(p, 0.5, states_with_actions(Matrix::Zero(1, 0), {})), DataError);
}

TEST_CASE("retune_threshold") {
  Rng rng(4);
  const auto base = calibrate_scores(random_scores(rng, 300), 0.15);
  CHECK(retune_threshold(base, 0.15).tau == base.tau);
  const auto looser = retune_threshold(base, 0.3);
  CHECK(looser.tau <= base.tau);
  CHECK(looser.alpha == 0.3);
  CHECK(looser.scores == base.scores);
  CHECK(looser.tau == calibrate_scores(base.scores, 0.3).tau);
}

TEST_CASE("property: prediction sets are nested in alpha") {
  Rng rng(5);
  const PolicyNet pnet{nn::init_network({3, 8, 20}, 3)};
  Matrix cal(3, 400);
  for (Eigen::Index i = 0; i < cal.size(); ++i) cal.data()[i] = rng.normal();
  std::vector<int> actions(400);
  for (auto& a : actions) a = static_cast<int>(rng.uniform_index(20));
  const auto r05 = calibrate(pnet, states_with_actions(cal, actions), 0.05);
  const auto r15 = retune_threshold(r05, 0.15);
  const auto r30 = retune_threshold(r05, 0.30);
  CHECK(r05.tau >= r15.tau);
  CHECK(r15.tau >= r30.tau);
  for (int i = 0; i < 300; ++i) {
    Vector s(3);
    for (int d = 0; d < 3; ++d) s(d) = rng.normal();
    const auto a = prediction_set(pnet, s, r05.tau);
    const auto b = prediction_set(pnet, s, r15.tau);
    const auto c = prediction_set(pnet, s, r30.tau);
    CHECK(std::includes(a.begin(), a.end(), b.begin(), b.end()));
    CHECK(std::includes(b.begin(), b.end(), c.begin(), c.end()));
  }
}

TEST_CASE("calibration artifacts round-trip") {
  Rng rng(6);
  auto r = calibrate_scores(random_scores(rng, 77), 0.15);
  r.scores[3] = 0.1 + 0.2;
  std::sort(r.scores.begin(), r.scores.end());
  const auto path = std::filesystem::temp_directory_path() / "cdqn_test_calibration.json";
  save_calibration(path, r);
  const auto back = load_calibration(path);
  CHECK(back.scores == r.scores);
  CHECK(back.tau == r.tau);
  CHECK(back.alpha == r.alpha);
  CHECK(back.n == r.n);
  {
    std::ofstream out(path);
    out << R"({"format": "something-else", "version": 1})";
  }
  CHECK_THROWS_AS(load_calibration(path), IoError);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_calibration(path), IoError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_calibration(path), IoError);
}
