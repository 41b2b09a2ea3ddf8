// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. `--only N` (repeatable) restricts the run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "cdqn/agents/losses.hpp"
#include "cdqn/agents/trainer.hpp"
#include "cdqn/conformal/conformal.hpp"
#include "cdqn/eval/fqe.hpp"
#include "cdqn/eval/metrics.hpp"
#include "cdqn/mdp/action.hpp"
#include "cdqn/mdp/impute.hpp"
#include "cdqn/mdp/ood.hpp"
#include "cdqn/mdp/split.hpp"
#include "cdqn/rng.hpp"
#include "cdqn/sim/simulator.hpp"
#include "cli/commands.hpp"
#include "support/oracles.hpp"

using namespace cdqn;
using agents::Algorithm;
using agents::TransitionSet;
using nn::Matrix;
using nn::Vector;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ------------------------------------------------------------- fixtures

struct SyntheticData {
  mdp::SplitDataset split;         // in-distribution patients only
  std::vector<mdp::Episode> ood;   // excluded from every split
};

// Same pipeline as `cdqn gen-data`: simulate, impute, select OOD patients over
// the whole cohort, split, then move OOD patients out of every split.
SyntheticData synthetic(std::size_t patients, std::uint64_t seed, double expert_noise = 0.15) {
  sim::SimConfig sc;
  sc.n_patients = patients;
  sc.seed = derive_seed(seed, "sim");
  sc.expert_noise = expert_noise;
  auto episodes = mdp::impute(sim::generate_dataset(sc)).episodes;
  const auto sel = mdp::select_ood(episodes, 0.01);
  std::set<std::uint64_t> ood_ids;
  for (std::size_t i : sel.ood) ood_ids.insert(episodes[i].patient_id);
  SyntheticData d;
  d.split = mdp::split_patients(std::move(episodes), {}, derive_seed(seed, "split"));
  for (auto* part : {&d.split.train, &d.split.validation, &d.split.calibration, &d.split.test}) {
    std::vector<mdp::Episode> kept;
    for (auto& e : *part) (ood_ids.count(e.patient_id) ? d.ood : kept).push_back(std::move(e));
    *part = std::move(kept);
  }
  std::sort(d.ood.begin(), d.ood.end(), [](const auto& a, const auto& b) { return a.patient_id < b.patient_id; });
  return d;
}

agents::AgentConfig small_agent(Algorithm algorithm, std::uint64_t seed, int width, int steps) {
  agents::AgentConfig c;
  c.algorithm = algorithm;
  if (algorithm == Algorithm::kCql) c.learning_rate = 1e-4;
  c.hidden_layers = {width, width};
  c.max_steps = steps;
  c.sync_interval = steps / 6;
  c.seed = seed;
  return c;
}

nn::DenseNetwork perturbed_net(const std::vector<int>& sizes, std::uint64_t seed) {
  auto net = nn::init_network(sizes, seed);
  Rng rng(seed + 1);
  auto theta = net.flat_parameters();
  for (double& t : theta) t += 0.1 * rng.normal();
  net.assign_flat_parameters(theta);
  return net;
}

TransitionSet random_batch(Rng& rng, int dim, int n_actions, int n) {
  TransitionSet t;
  t.states.resize(dim, n);
  t.next_states.resize(dim, n);
  t.rewards.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) {
      t.states(d, i) = rng.normal();
      t.next_states(d, i) = rng.normal();
    }
    t.rewards(i) = rng.uniform(-0.5, 0.5);
    t.actions.push_back(static_cast<int>(rng.uniform_index(n_actions)));
    const bool done = rng.bernoulli(0.3);
    t.done.push_back(done ? 1 : 0);
    t.next_actions.push_back(done ? -1 : static_cast<int>(rng.uniform_index(n_actions)));
  }
  return t;
}

// -------------------------------------------------------------- criteria

Outcome quantile_exactness() {
  const long percents[] = {1, 5, 10, 15, 25, 50};
  Rng rng(1);
  long cases = 0;
  long mismatches = 0;
  for (int n = 1; n <= 500; ++n) {
    for (long pct : percents) {
      std::vector<double> scores(static_cast<std::size_t>(n));
      // Every other case draws from a coarse grid so that ties are common.
      const bool coarse = (n + pct) % 2 == 0;
      for (double& s : scores) s = coarse ? std::floor(rng.uniform() * 20.0) / 20.0 : rng.uniform();
      const double alpha = static_cast<double>(pct) / 100.0;
      const double expected = oracle::brute_force_threshold(scores, pct, 100);
      const auto result = conformal::calibrate_scores(scores, alpha);
      ++cases;
      if (result.tau != expected || result.n != scores.size()) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%ld cases, %ld mismatches", cases, mismatches)};
}

Outcome coverage() {
  const int seeds = 20;
  const double bound = 0.85 - 0.025;
  int passing = 0;
  std::size_t min_test = SIZE_MAX;
  double worst = 1.0;
  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(s);
    const auto d = synthetic(10000, seed);
    const auto train = TransitionSet::from_episodes(d.split.train);
    const auto agent = agents::train(train, small_agent(Algorithm::kConformalDqn, seed, 32, 1000));
    const auto cal = conformal::calibrate(*agent.policy, TransitionSet::from_episodes(d.split.calibration), 0.15);
    const auto test = TransitionSet::from_episodes(d.split.test);
    const double cov = conformal::empirical_coverage(*agent.policy, cal.tau, test);
    min_test = std::min(min_test, test.size());
    worst = std::min(worst, cov);
    if (cov >= bound && test.size() >= 2000) ++passing;
  }
  return {passing >= 18, fmt("%d/%d seeds with coverage >= %.3f (worst %.4f, min n_test %zu)", passing, seeds, bound,
                             worst, min_test)};
}

Outcome gradient_checks() {
  Rng rng(3);
  double worst = 0.0;
  const int trials = 60;
  for (int trial = 0; trial < trials; ++trial) {
    const int dim = 1 + static_cast<int>(rng.uniform_index(5));
    const int n_actions = 2 + static_cast<int>(rng.uniform_index(7));
    const int width = 1 + static_cast<int>(rng.uniform_index(8));
    const auto batch = random_batch(rng, dim, n_actions, 1 + static_cast<int>(rng.uniform_index(12)));
    agents::QNetworkPair pair{perturbed_net({dim, width, width, n_actions}, rng()),
                              perturbed_net({dim, width, width, n_actions}, rng()), 10};
    agents::PolicyNet pnet{perturbed_net({dim, width, n_actions}, rng())};
    const double gamma = 0.75;
    const double l2 = 1e-3 * (1.0 + 50.0 * rng.uniform());

    auto check = [&](const nn::Gradients& analytic, nn::DenseNetwork& net, const std::function<double()>& loss) {
      worst = std::max(worst, oracle::relative_error(oracle::flatten(analytic), oracle::numeric_gradient(net, loss)));
    };
    check(agents::td_loss(batch, pair, gamma).grads, pair.prediction,
          [&] { return agents::td_loss(batch, pair, gamma).loss; });
    check(agents::nll_loss(batch, pnet).grads, pnet.net, [&] { return agents::nll_loss(batch, pnet).loss; });
    check(agents::cql_penalty_with_gradient(batch, pair.prediction, 0.1).grads, pair.prediction,
          [&] { return agents::cql_penalty(batch, pair.prediction, 0.1); });
    const auto comp = agents::composite_loss(batch, pair, pnet, gamma, l2);
    auto total = [&] { return agents::composite_loss(batch, pair, pnet, gamma, l2).total; };
    check(comp.q_grads, pair.prediction, total);
    check(comp.p_grads, pnet.net, total);
  }
  return {worst < 1e-4, fmt("%d random nets (width <= 8), max relative error %.2e", trials, worst)};
}

Outcome tabular_oracles() {
  const double gamma = 0.75;
  int policy_ok = 0;
  int fqe_ok = 0;
  double worst_fqe = 0.0;
  std::uint64_t seed = 500;
  const int n_mdps = 25;
  for (int k = 0; k < n_mdps; ++k) {
    const int n_states = 2 + k % 5;
    const int n_actions = 2 + k % 2;
    // Near-ties make "the" optimal policy ill-defined; require a clear gap.
    oracle::TabularMdp m;
    Eigen::MatrixXd q_star;
    do {
      m = oracle::random_mdp(seed++, n_states, n_actions, 4, 0.2);
      q_star = oracle::value_iteration(m, gamma);
    } while (oracle::min_action_gap(q_star) < 0.02);
    const auto data = oracle::exhaustive_data(m);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n_states, n_states);

    agents::AgentConfig cfg;
    cfg.algorithm = Algorithm::kDdqn;
    cfg.state_dim = n_states;
    cfg.n_actions = n_actions;
    cfg.hidden_layers = {32, 32};
    cfg.batch_size = 100000;
    cfg.learning_rate = 3e-3;
    cfg.max_steps = 3000;
    cfg.sync_interval = 100;
    cfg.seed = seed;
    const auto agent = agents::train(data, cfg);
    const auto greedy = agents::greedy_actions(agent.q->prediction, eye);
    bool same = true;
    for (int s = 0; s < n_states; ++s) {
      Eigen::Index best = 0;
      q_star.row(s).maxCoeff(&best);
      same = same && greedy[static_cast<std::size_t>(s)] == best;
    }
    policy_ok += same;

    Rng rng(seed);
    std::vector<int> pol(static_cast<std::size_t>(n_states));
    for (int& a : pol) a = static_cast<int>(rng.uniform_index(n_actions));
    const Eigen::VectorXd v = oracle::policy_evaluation(m, pol, gamma);
    eval::FqeConfig f;
    f.gamma = gamma;
    f.iterations = 30;
    f.steps_per_iteration = 100;
    f.learning_rate = 3e-3;
    f.batch_size = 100000;
    f.hidden_layers = {32, 32};
    f.n_actions = n_actions;
    f.encoding = eval::ActionEncoding::kOneHot;
    f.sparse_rewards = false;
    f.seed = seed;
    const eval::BatchPolicy policy = [&](const Matrix& st) {
      std::vector<int> out;
      for (Eigen::Index i = 0; i < st.cols(); ++i) out.push_back(pol[oracle::one_hot_index(st.col(i))]);
      return out;
    };
    const auto model = eval::fqe_train(data, policy, f);
    double err = 0.0;
    for (int s = 0; s < n_states; ++s) {
      err = std::max(err, std::abs(model.value(eye.col(s), pol[static_cast<std::size_t>(s)]) - v(s)));
    }
    worst_fqe = std::max(worst_fqe, err);
    fqe_ok += err < 1e-2;
  }
  return {policy_ok == n_mdps && fqe_ok == n_mdps,
          fmt("greedy = optimal on %d/%d MDPs, FQE within 1e-2 on %d/%d (max error %.2e)", policy_ok, n_mdps, fqe_ok,
              n_mdps, worst_fqe)};
}

Outcome cql_closed_form() {
  const int n_actions = mdp::kNumActions;
  const double omega = 0.1;
  Rng rng(5);
  int negatives = 0;
  double min_penalty = INFINITY;
  double worst_closed = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 1 + static_cast<int>(rng.uniform_index(4));
    const auto batch = random_batch(rng, dim, n_actions, 1 + static_cast<int>(rng.uniform_index(16)));
    const double scale = std::pow(10.0, rng.uniform(-3.0, 3.0));
    Matrix w(n_actions, dim);
    Vector b(n_actions);
    for (int a = 0; a < n_actions; ++a) {
      b(a) = scale * rng.normal();
      for (int d = 0; d < dim; ++d) w(a, d) = scale * rng.normal();
    }
    const double penalty = agents::cql_penalty(batch, nn::DenseNetwork({dim, n_actions}, {w}, {b}), omega);
    negatives += !(penalty >= 0.0);
    min_penalty = std::min(min_penalty, penalty);

    // Rows constant across actions (but varying across states).
    Matrix wc(n_actions, dim);
    const Eigen::RowVectorXd row = Eigen::RowVectorXd::NullaryExpr(dim, [&] { return scale * rng.normal(); });
    for (int a = 0; a < n_actions; ++a) wc.row(a) = row;
    const Vector bc = Vector::Constant(n_actions, scale * rng.normal());
    const double constant = agents::cql_penalty(batch, nn::DenseNetwork({dim, n_actions}, {wc}, {bc}), omega);
    worst_closed = std::max(worst_closed, std::abs(constant - omega * std::log(static_cast<double>(n_actions))));
  }
  return {negatives == 0 && worst_closed <= 1e-9,
          fmt("1000 tables: %d negative (min %.3e); constant rows max |penalty - w ln 343| = %.2e", negatives,
              min_penalty, worst_closed)};
}

Outcome selection_semantics() {
  Rng rng(6);
  int mismatches = 0;
  int empty_sets = 0;
  const int trials = 10000;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = trial % 2 == 0 ? mdp::kNumActions : 2 + static_cast<int>(rng.uniform_index(30));
    Vector logits(n);
    const double sharpness = rng.uniform(0.0, 8.0);
    for (int a = 0; a < n; ++a) logits(a) = sharpness * rng.normal();
    const Vector probs = (logits.array() - logits.maxCoeff()).exp().matrix() / (logits.array() - logits.maxCoeff()).exp().sum();
    Vector q(n);
    // Coarse Q grid makes ties frequent.
    for (int a = 0; a < n; ++a) q(a) = std::floor(rng.uniform() * 8.0) / 8.0;
    double tau = rng.uniform();
    switch (trial % 5) {
      case 0: tau = 0.0; break;
      case 1: tau = 1.0; break;
      case 2: tau = 1.0 - probs(static_cast<Eigen::Index>(rng.uniform_index(n))); break;  // boundary
      default: break;
    }
    std::vector<int> set;
    for (int a = 0; a < n; ++a) {
      if (probs(a) >= 1.0 - tau) set.push_back(a);
    }
    if (set.empty()) {
      ++empty_sets;
      for (int a = 0; a < n; ++a) set.push_back(a);
    }
    int expected = set.front();
    for (int a : set) {
      if (q(a) > q(expected)) expected = a;
    }
    mismatches += conformal::select_action(q, probs, tau) != expected;
  }
  int codec_errors = 0;
  std::set<int> seen;
  for (int i = 0; i < mdp::kNumActions; ++i) {
    const auto t = mdp::decode_action(i);
    codec_errors += !t.in_range() || mdp::encode_action(t).value() != i;
    seen.insert(t.vt * 100 + t.peep * 10 + t.fio2);
  }
  codec_errors += static_cast<int>(mdp::kNumActions - seen.size());
  return {mismatches == 0 && codec_errors == 0,
          fmt("%d triples (%d with empty confident set), %d mismatches; codec errors %d over 343 indices", trials,
              empty_sets, mismatches, codec_errors)};
}

Outcome ood_conservatism() {
  const int seeds = 5;
  const double limit = eval::kOverestimationThreshold + 0.05;
  bool ok = true;
  std::string detail;
  double sum_ddqn = 0.0;
  double sum_cdqn = 0.0;
  double sum_cql = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t seed = 2000 + static_cast<std::uint64_t>(s);
    const auto d = synthetic(10000, seed, 0.05);
    const auto train = TransitionSet::from_episodes(d.split.train);
    const auto ddqn = agents::train(train, small_agent(Algorithm::kDdqn, seed, 64, 3000));
    const auto cdqn = agents::train(train, small_agent(Algorithm::kConformalDqn, seed, 64, 3000));
    const auto cql = agents::train(train, small_agent(Algorithm::kCql, seed, 64, 3000));
    const auto cal = conformal::calibrate(*cdqn.policy, TransitionSet::from_episodes(d.split.calibration), 0.15);
    const eval::BatchPolicy filtered = [&](const Matrix& st) {
      return conformal::select_actions(cdqn.q->prediction, *cdqn.policy, st, cal.tau);
    };
    const auto rows = eval::ood_q_comparison(
        {{"ddqn", &ddqn.q->prediction, {}}, {"conformal_dqn", &cdqn.q->prediction, filtered},
         {"cql", &cql.q->prediction, {}}},
        agents::initial_states(d.split.test), agents::initial_states(d.ood));
    const double q_ddqn = rows[0].ood_max_q;
    const double q_cdqn = rows[1].ood_policy_q;
    const double q_cql = rows[2].ood_max_q;
    ok = ok && q_ddqn > q_cdqn && q_cdqn <= limit && q_cql <= limit;
    sum_ddqn += q_ddqn;
    sum_cdqn += q_cdqn;
    sum_cql += q_cql;
    detail += fmt("%s%.3f/%.3f/%.3f", s ? " " : "", q_ddqn, q_cdqn, q_cql);
  }
  return {ok, fmt("OOD mean Q ddqn/conformal_dqn/cql per seed: %s; means %.3f/%.3f/%.3f (limit %.2f)", detail.c_str(),
                  sum_ddqn / seeds, sum_cdqn / seeds, sum_cql / seeds, limit)};
}

Outcome mortality_sign() {
  const int seeds = 5;
  int negative = 0;
  std::string detail;
  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t seed = 3000 + static_cast<std::uint64_t>(s);
    const auto d = synthetic(3000, seed);
    const auto agent =
        agents::train(TransitionSet::from_episodes(d.split.train), small_agent(Algorithm::kConformalDqn, seed, 64, 3000));
    const auto cal = conformal::calibrate(*agent.policy, TransitionSet::from_episodes(d.split.calibration), 0.15);
    const eval::BatchPolicy policy = [&](const Matrix& st) {
      return conformal::select_actions(agent.q->prediction, *agent.policy, st, cal.tau);
    };
    eval::FqeConfig f;
    f.seed = derive_seed(seed, "fqe");
    const auto model = eval::fqe_train(TransitionSet::from_episodes(d.split.test), policy, f);
    const double r = eval::mortality_correlation(model, d.split.test);
    negative += r < -0.1;
    detail += fmt("%s%.3f", s ? " " : "", r);
  }
  return {negative >= 4, fmt("r < -0.1 in %d/%d seeds (r = %s)", negative, seeds, detail.c_str())};
}

Outcome nestedness() {
  const auto d = synthetic(1000, 9);
  const auto agent = agents::train(TransitionSet::from_episodes(d.split.train), small_agent(Algorithm::kBc, 9, 32, 600));
  const auto calibration = TransitionSet::from_episodes(d.split.calibration);
  const double alphas[] = {0.05, 0.15, 0.3};
  std::vector<conformal::CalibrationResult> fresh;
  for (double a : alphas) fresh.push_back(conformal::calibrate(*agent.policy, calibration, a));

  int retune_errors = 0;
  for (const auto& from : fresh) {
    for (std::size_t k = 0; k < fresh.size(); ++k) {
      const auto r = conformal::retune_threshold(from, alphas[k]);
      retune_errors += r.tau != fresh[k].tau || r.scores != fresh[k].scores || r.n != fresh[k].n;
    }
  }

  // Sample 1000 states from the test split, uniformly over transitions.
  const auto test = TransitionSet::from_episodes(d.split.test);
  Rng rng(10);
  int violations = 0;
  double mean_sizes[3] = {0, 0, 0};
  for (int i = 0; i < 1000; ++i) {
    const Vector state = test.states.col(static_cast<Eigen::Index>(rng.uniform_index(test.size())));
    std::vector<std::vector<int>> sets;
    for (std::size_t k = 0; k < fresh.size(); ++k) {
      sets.push_back(conformal::prediction_set(*agent.policy, state, fresh[k].tau));
      mean_sizes[k] += static_cast<double>(sets.back().size()) / 1000.0;
    }
    for (std::size_t k = 0; k + 1 < sets.size(); ++k) {
      violations += !std::includes(sets[k].begin(), sets[k].end(), sets[k + 1].begin(), sets[k + 1].end());
    }
  }
  return {violations == 0 && retune_errors == 0,
          fmt("tau %.4f >= %.4f >= %.4f, mean set sizes %.1f/%.1f/%.1f, %d nesting violations, %d retune mismatches",
              fresh[0].tau, fresh[1].tau, fresh[2].tau, mean_sizes[0], mean_sizes[1], mean_sizes[2], violations,
              retune_errors)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome end_to_end_determinism() {
  const fs::path root = fs::temp_directory_path() / ("cdqn-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const nlohmann::json config = {
      {"format", "cdqn-run"},
      {"version", 1},
      {"seed", 11},
      {"n_runs", 2},
      {"workers", 1},
      {"sim", {{"n_patients", 1000}}},
      {"agents", {{"defaults", {{"hidden_layers", {32, 32}}, {"max_steps", 400}, {"batch_size", 128},
                                {"sync_interval", 100}}}}},
      {"fqe", {{"iterations", 5}, {"steps_per_iteration", 100}, {"hidden_layers", {32, 32}}}}};
  std::ofstream(root / "config.json") << config.dump(2);

  std::string detail;
  auto pipeline = [&](const fs::path& out) {
    for (const char* command : {"gen-data", "train", "calibrate", "evaluate", "report"}) {
      const std::string cfg = (root / "config.json").string();
      const std::string dir = out.string();
      const char* argv[] = {"cdqn", command, "--config", cfg.c_str(), "--out", dir.c_str()};
      std::ostringstream sink;
      const int code = cli::run(6, const_cast<char**>(argv), sink, sink);
      if (code != 0) {
        detail = fmt("'%s' exited with %d: %s", command, code, sink.str().c_str());
        return false;
      }
    }
    return true;
  };
  const bool ran = pipeline(root / "a") && pipeline(root / "b");
  int files = 0;
  std::vector<std::string> differing;
  if (ran) {
    for (const auto& entry : fs::recursive_directory_iterator(root / "a" / "report")) {
      if (!entry.is_regular_file()) continue;
      const auto rel = fs::relative(entry.path(), root / "a");
      ++files;
      if (slurp(entry.path()) != slurp(root / "b" / rel)) differing.push_back(rel.string());
    }
    detail = fmt("%d report files compared, %zu differ", files, differing.size());
    for (const auto& f : differing) detail += " " + f;
  }
  fs::remove_all(root);
  return {ran && files > 0 && differing.empty(), detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "quantile exactness", 5, quantile_exactness},
    {2, "coverage", 600, coverage},
    {3, "gradient checks", 30, gradient_checks},
    {4, "tabular oracles", 120, tabular_oracles},
    {5, "CQL non-negativity and closed form", 5, cql_closed_form},
    {6, "selection semantics", 5, selection_semantics},
    {7, "OOD conservatism", 1800, ood_conservatism},
    {8, "mortality-correlation sign", 600, mortality_sign},
    {9, "nestedness and retuning", 10, nestedness},
    {10, "end-to-end determinism", 1200, end_to_end_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--only N]...\n", argv[0]);
      return 2;
    }
  }
  int failures = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::printf("%s  %2d %-36s %s [%.1f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), seconds, c.budget_seconds, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
