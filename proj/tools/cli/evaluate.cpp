#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "cdqn/agents/checkpoint.hpp"
#include "cdqn/agents/losses.hpp"
#include "cdqn/config_json.hpp"
#include "cdqn/conformal/conformal.hpp"
#include "cdqn/eval/fqe.hpp"
#include "cdqn/eval/metrics.hpp"
#include "cdqn/mdp/action.hpp"
#include "cdqn/rng.hpp"
#include "cli/commands.hpp"
#include "cli/episodes.hpp"

namespace cdqn::cli {

using config::Json;
using nn::Matrix;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kPhysician = "physician";
const char* const kDimensions[3] = {"vt", "peep", "fio2"};

struct PolicyRun {
  double value_mean = kNaN;
  double value_std = kNaN;
  double mortality_r = kNaN;
  double survival_pct = kNaN;
  eval::ActionHistogram actions;
  std::optional<eval::OodRow> ood;
};

struct Coverage {
  std::size_t n = 0;
  double alpha = 0.0;
  double tau = 0.0;
  double coverage = 0.0;
  bool pass = false;
};

struct RunResult {
  std::map<std::string, PolicyRun> policies;
  std::optional<Coverage> coverage;
};

struct EvalData {
  std::vector<mdp::Episode> test;
  agents::TransitionSet transitions;
  Matrix initial;
  std::vector<int> initial_actions;
  std::vector<bool> survived;
  Matrix ood_initial;
};

// Metrics that can be undefined on small or degenerate test sets map to NaN.
template <class F>
double or_nan(F&& f) {
  try {
    return f();
  } catch (const DataError&) {
    return kNaN;
  }
}

std::vector<double> to_std(const nn::Vector& v) { return {v.data(), v.data() + v.size()}; }

RunResult evaluate_run(const Context& ctx, const EvalData& d, int run) {
  const RunConfig& cfg = ctx.cfg;
  const std::uint64_t seed = cfg.run_seed(run);
  RunResult result;

  auto fqe_cfg = [&](const std::string& name) {
    eval::FqeConfig f = cfg.fqe;
    f.seed = derive_seed(seed, "fqe-" + name);
    return f;
  };

  // Physician: logged actions evaluated directly. Its initial values drive
  // the survival mapping even when it is not reported as a policy.
  const eval::FqeModel physician = eval::fqe_train_logged(d.transitions, fqe_cfg(kPhysician));
  const std::vector<double> physician_values = to_std(physician.values(d.initial, d.initial_actions));
  auto survival_of = [&](double value) {
    return or_nan([&] { return eval::survival_mapping(physician_values, d.survived, value); });
  };
  if (cfg.physician_baseline) {
    PolicyRun p;
    const auto ms = eval::mean_std(physician_values);
    p.value_mean = ms.mean;
    p.value_std = ms.std;
    p.mortality_r = or_nan([&] { return eval::mortality_correlation(physician, d.test); });
    p.survival_pct = survival_of(ms.mean);
    p.actions = eval::action_distribution(d.transitions.actions);
    result.policies[kPhysician] = p;
  }

  std::vector<agents::TrainedAgent> loaded;
  loaded.reserve(cfg.algorithms.size());
  std::vector<eval::OodAgent> ood_agents;
  for (auto algorithm : cfg.algorithms) {
    const std::string name(agents::to_string(algorithm));
    const fs::path dir = ctx.layout.agent_dir(run, algorithm);
    require_artifact(dir / "agent.json", name + " checkpoint (run train first)");
    loaded.push_back(agents::load_agent(dir));
    const agents::TrainedAgent& agent = loaded.back();

    eval::BatchPolicy policy;
    if (algorithm == agents::Algorithm::kBc) {
      const agents::PolicyNet* pnet = &*agent.policy;
      policy = [pnet](const Matrix& s) { return agents::greedy_actions(pnet->net, s); };
    } else if (algorithm == agents::Algorithm::kConformalDqn) {
      require_artifact(ctx.layout.calibration(run), "calibration (run calibrate first)");
      const auto cal = conformal::load_calibration(ctx.layout.calibration(run));
      const nn::DenseNetwork* q = &agent.q->prediction;
      const agents::PolicyNet* pnet = &*agent.policy;
      const double tau = cal.tau;
      policy = [q, pnet, tau](const Matrix& s) { return conformal::select_actions(*q, *pnet, s, tau); };
      const double coverage = conformal::empirical_coverage(*pnet, tau, d.transitions);
      result.coverage = Coverage{cal.n, cal.alpha, tau, coverage, coverage >= 1.0 - cal.alpha};
    } else {
      const nn::DenseNetwork* q = &agent.q->prediction;
      policy = [q](const Matrix& s) { return agents::greedy_actions(*q, s); };
    }
    if (agent.q) ood_agents.push_back({name, &agent.q->prediction, policy});

    const eval::FqeModel model = eval::fqe_train(d.transitions, policy, fqe_cfg(name));
    PolicyRun p;
    const auto ms = eval::initial_value(model, policy, d.initial);
    p.value_mean = ms.mean;
    p.value_std = ms.std;
    p.mortality_r = or_nan([&] { return eval::mortality_correlation(model, d.test); });
    p.survival_pct = survival_of(ms.mean);
    p.actions = eval::action_distribution(policy, d.transitions.states);
    result.policies[name] = p;
  }

  if (d.ood_initial.cols() > 0 && !ood_agents.empty()) {
    for (const auto& row : eval::ood_q_comparison(ood_agents, d.initial, d.ood_initial)) {
      result.policies[row.name].ood = row;
    }
  }
  return result;
}

Json stat_json(const std::vector<double>& values) {
  const auto ms = eval::mean_std(values);
  return Json{{"mean", ms.mean}, {"std", ms.std}};
}

eval::MeanStd stat(const std::vector<double>& values) { return eval::mean_std(values); }

std::string csv_real(double x) { return format_real(x); }

}  // namespace

void cmd_evaluate(const Context& ctx, std::ostream& out) {
  const RunConfig& cfg = ctx.cfg;
  EvalData d;
  d.test = read_split(ctx.layout, "test", cfg.data_format);
  if (d.test.empty()) throw DataError("test split has no in-distribution patients");
  d.transitions = agents::TransitionSet::from_episodes(d.test);
  d.initial = agents::initial_states(d.test);
  for (const auto& e : d.test) {
    d.initial_actions.push_back(mdp::encode_action(e.windows.front().action).value());
    d.survived.push_back(e.survived_90d);
  }
  const auto ood = read_split(ctx.layout, "ood", cfg.data_format);
  d.ood_initial = ood.empty() ? Matrix(mdp::kStateDim, 0) : agents::initial_states(ood);

  std::vector<RunResult> runs(static_cast<std::size_t>(cfg.n_runs));
  parallel_for(runs.size(), cfg.worker_count(),
               [&](std::size_t r) { runs[r] = evaluate_run(ctx, d, static_cast<int>(r)); });

  std::vector<std::string> names;
  for (const auto& [name, p] : runs.front().policies) names.push_back(name);

  struct SummaryRow {
    std::string name;
    eval::MeanStd value, mortality, survival;
  };
  std::vector<SummaryRow> summary;
  Json policies = Json::array();
  std::ostringstream t1, t2, f3, f4, cov;
  t1 << "policy,mortality_r_mean,mortality_r_std,n_runs\n";
  t2 << "policy,initial_value_mean,initial_value_std,survival_pct_mean,survival_pct_std,n_runs\n";
  f3 << "policy,dimension,level,count,fraction\n";
  f4 << "policy,id_max_q_mean,id_max_q_std,ood_max_q_mean,ood_max_q_std,id_policy_q_mean,id_policy_q_std,"
        "ood_policy_q_mean,ood_policy_q_std,id_flag,ood_flag\n";
  cov << "run,n_calibration,alpha,tau,coverage,target,pass\n";

  for (const auto& name : names) {
    std::vector<double> value, within, mort, surv;
    eval::ActionHistogram hist;
    std::vector<double> id_max, ood_max, id_pol, ood_pol;
    Json per_run = Json::array();
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const PolicyRun& p = runs[r].policies.at(name);
      value.push_back(p.value_mean);
      within.push_back(p.value_std);
      mort.push_back(p.mortality_r);
      surv.push_back(p.survival_pct);
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < mdp::kLevels; ++l) hist.counts[k][l] += p.actions.counts[k][l];
      }
      hist.total += p.actions.total;
      Json jr{{"run", r},
              {"seed", cfg.run_seed(static_cast<int>(r))},
              {"initial_value_mean", p.value_mean},
              {"initial_value_std", p.value_std},
              {"mortality_r", p.mortality_r},
              {"survival_pct", p.survival_pct}};
      if (p.ood) {
        id_max.push_back(p.ood->id_max_q);
        ood_max.push_back(p.ood->ood_max_q);
        id_pol.push_back(p.ood->id_policy_q);
        ood_pol.push_back(p.ood->ood_policy_q);
        jr["ood"] = Json{{"id_max_q", p.ood->id_max_q},
                         {"ood_max_q", p.ood->ood_max_q},
                         {"id_policy_q", p.ood->id_policy_q},
                         {"ood_policy_q", p.ood->ood_policy_q}};
      }
      per_run.push_back(jr);
    }

    const auto v = stat(value), m = stat(mort), s = stat(surv);
    summary.push_back({name, v, m, s});
    const std::string n_runs = std::to_string(runs.size());
    t1 << name << "," << csv_real(m.mean) << "," << csv_real(m.std) << "," << n_runs << "\n";
    t2 << name << "," << csv_real(v.mean) << "," << csv_real(v.std) << "," << csv_real(s.mean) << ","
       << csv_real(s.std) << "," << n_runs << "\n";
    Json actions = Json::object();
    for (int k = 0; k < 3; ++k) {
      Json counts = Json::array();
      for (int l = 0; l < mdp::kLevels; ++l) {
        const auto c = hist.counts[k][l];
        counts.push_back(c);
        const double frac = hist.total ? static_cast<double>(c) / static_cast<double>(hist.total) : 0.0;
        f3 << name << "," << kDimensions[k] << "," << l << "," << c << "," << csv_real(frac) << "\n";
      }
      actions[kDimensions[k]] = counts;
    }
    actions["total"] = hist.total;

    Json entry{{"name", name},
               {"initial_value", stat_json(value)},
               {"initial_value_std_within_run", stat_json(within)},
               {"mortality_correlation", stat_json(mort)},
               {"survival_pct", stat_json(surv)},
               {"actions", actions},
               {"runs", per_run}};
    if (!id_max.empty()) {
      const auto a = stat(id_max), b = stat(ood_max), c = stat(id_pol), e = stat(ood_pol);
      const bool id_flag = a.mean > eval::kOverestimationThreshold;
      const bool ood_flag = b.mean > eval::kOverestimationThreshold;
      f4 << name << "," << csv_real(a.mean) << "," << csv_real(a.std) << "," << csv_real(b.mean) << ","
         << csv_real(b.std) << "," << csv_real(c.mean) << "," << csv_real(c.std) << "," << csv_real(e.mean) << ","
         << csv_real(e.std) << "," << id_flag << "," << ood_flag << "\n";
      entry["ood"] = Json{{"id_max_q", stat_json(id_max)},
                          {"ood_max_q", stat_json(ood_max)},
                          {"id_policy_q", stat_json(id_pol)},
                          {"ood_policy_q", stat_json(ood_pol)},
                          {"threshold", eval::kOverestimationThreshold},
                          {"id_flag", id_flag},
                          {"ood_flag", ood_flag}};
    }
    policies.push_back(entry);
  }

  Json coverage = Json::array();
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (!runs[r].coverage) continue;
    const Coverage& c = *runs[r].coverage;
    const double target = 1.0 - c.alpha;
    cov << r << "," << c.n << "," << csv_real(c.alpha) << "," << csv_real(c.tau) << "," << csv_real(c.coverage)
        << "," << csv_real(target) << "," << (c.pass ? "pass" : "fail") << "\n";
    coverage.push_back(Json{{"run", r},
                            {"n_calibration", c.n},
                            {"alpha", c.alpha},
                            {"tau", c.tau},
                            {"coverage", c.coverage},
                            {"target", target},
                            {"pass", c.pass}});
    out << "coverage run " << r << ": " << format_real(c.coverage) << " vs target " << format_real(target) << " "
        << (c.pass ? "PASS" : "FAIL") << "\n";
  }

  const Json report{{"format", "cdqn-evaluation"},
                    {"version", 1},
                    {"n_runs", cfg.n_runs},
                    {"seed", cfg.seed},
                    {"test_patients", d.test.size()},
                    {"ood_patients", ood.size()},
                    {"overestimation_threshold", eval::kOverestimationThreshold},
                    {"policies", policies},
                    {"coverage", coverage}};

  const fs::path dir = ctx.layout.report_dir();
  write_file_atomic(dir / "correlation.csv", t1.str());
  write_file_atomic(dir / "values.csv", t2.str());
  write_file_atomic(dir / "actions.csv", f3.str());
  write_file_atomic(dir / "ood_q.csv", f4.str());
  write_file_atomic(dir / "coverage.csv", cov.str());
  write_file_atomic(dir / "evaluation.json", report.dump(2) + "\n");

  out << "policy           initial value          mortality r           survival %\n";
  for (const auto& row : summary) {
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %8.4f +- %-8.4f %8.4f +- %-8.4f %7.2f\n", row.name.c_str(), row.value.mean,
                  row.value.std, row.mortality.mean, row.mortality.std, row.survival.mean);
    out << line;
  }
  out << "wrote " << dir.string() << "\n";
}

}  // namespace cdqn::cli
