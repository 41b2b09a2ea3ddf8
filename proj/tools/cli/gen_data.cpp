#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "cdqn/config_json.hpp"
#include "cdqn/mdp/episode_io.hpp"
#include "cdqn/mdp/impute.hpp"
#include "cdqn/mdp/ood.hpp"
#include "cdqn/mdp/split.hpp"
#include "cdqn/sim/simulator.hpp"
#include "cli/commands.hpp"
#include "cli/episodes.hpp"

namespace cdqn::cli {

using config::Json;

namespace {

struct SplitPart {
  std::string name;
  std::size_t patients = 0;
  std::vector<mdp::Episode> in_distribution;
  std::vector<mdp::Episode> ood;
};

Json id_list(const std::vector<mdp::Episode>& eps) {
  Json ids = Json::array();
  for (const auto& e : eps) ids.push_back(e.patient_id);
  return ids;
}

}  // namespace

void cmd_gen_data(const Context& ctx, std::ostream& out) {
  const RunConfig& cfg = ctx.cfg;
  sim::SimConfig sc = cfg.sim;
  sc.seed = cfg.sim_seed();
  mdp::ImputationResult imputed = mdp::impute(sim::generate_dataset(sc), cfg.impute);

  const mdp::OodSelection ood = mdp::select_ood(imputed.episodes, cfg.ood_percentile);
  std::set<std::uint64_t> ood_ids;
  for (std::size_t i : ood.ood) ood_ids.insert(imputed.episodes[i].patient_id);

  std::size_t survivors = 0;
  for (const auto& e : imputed.episodes) survivors += e.survived_90d;
  const std::size_t n_patients = imputed.episodes.size();

  mdp::SplitDataset split = mdp::split_patients(std::move(imputed.episodes), cfg.split, cfg.split_seed());
  std::vector<SplitPart> parts;
  auto add = [&](const char* name, std::vector<mdp::Episode>& eps) {
    SplitPart p{name, eps.size(), {}, {}};
    for (auto& e : eps) (ood_ids.count(e.patient_id) ? p.ood : p.in_distribution).push_back(std::move(e));
    parts.push_back(std::move(p));
  };
  add("train", split.train);
  add("validation", split.validation);
  add("calibration", split.calibration);
  add("test", split.test);

  std::vector<mdp::Episode> all_ood;
  for (auto& p : parts) all_ood.insert(all_ood.end(), p.ood.begin(), p.ood.end());
  std::sort(all_ood.begin(), all_ood.end(), [](const auto& a, const auto& b) { return a.patient_id < b.patient_id; });

  for (const auto& p : parts) write_episode_file(ctx.layout.episodes(p.name, cfg.data_format), p.in_distribution);
  write_episode_file(ctx.layout.episodes("ood", cfg.data_format), all_ood);

  Json splits = Json::object();
  for (const auto& p : parts) {
    splits[p.name] = Json{{"patients", p.patients},
                          {"in_distribution", p.in_distribution.size()},
                          {"ood", p.ood.size()},
                          {"in_distribution_ids", id_list(p.in_distribution)},
                          {"ood_ids", id_list(p.ood)}};
  }
  Json imputation = Json::array();
  for (const auto& f : imputed.report.features) {
    imputation.push_back(Json{{"feature", f.feature},
                              {"missing_fraction", f.missing_fraction},
                              {"strategy", mdp::to_string(f.strategy)},
                              {"filled", f.filled}});
  }
  const double ood_fraction = n_patients ? static_cast<double>(all_ood.size()) / static_cast<double>(n_patients) : 0.0;
  const double survival = n_patients ? static_cast<double>(survivors) / static_cast<double>(n_patients) : 0.0;
  const Json manifest{{"format", "cdqn-manifest"},
                      {"version", 1},
                      {"seed", cfg.seed},
                      {"sim_seed", sc.seed},
                      {"split_seed", cfg.split_seed()},
                      {"data_format", cfg.data_format},
                      {"n_patients", n_patients},
                      {"survival_rate", survival},
                      {"ood_percentile", cfg.ood_percentile},
                      {"ood_fraction", ood_fraction},
                      {"ood_ids", id_list(all_ood)},
                      {"splits", splits},
                      {"imputation", imputation}};
  write_file_atomic(ctx.layout.manifest(), manifest.dump(2) + "\n");

  out << "patients " << n_patients << "  survival " << format_real(survival) << "  ood " << all_ood.size() << " ("
      << format_real(ood_fraction) << ")\n";
  for (const auto& p : parts) {
    out << "  " << p.name << ": " << p.patients << " patients, " << p.in_distribution.size() << " in-distribution, "
        << p.ood.size() << " ood\n";
  }
  out << "wrote " << ctx.layout.data_dir().string() << "\n";
}

}  // namespace cdqn::cli
