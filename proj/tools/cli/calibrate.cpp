#include <ostream>

#include "cdqn/agents/checkpoint.hpp"
#include "cdqn/conformal/conformal.hpp"
#include "cli/commands.hpp"
#include "cli/episodes.hpp"

namespace cdqn::cli {

namespace {

void save(const fs::path& path, const conformal::CalibrationResult& result) {
  publish_atomic(path, [&](const fs::path& tmp) { conformal::save_calibration(tmp, result); });
}

void print(std::ostream& out, int run, const conformal::CalibrationResult& c) {
  out << "run " << run << ": n " << c.n << "  alpha " << format_real(c.alpha) << "  tau " << format_real(c.tau)
      << "\n";
}

}  // namespace

void cmd_calibrate(const Context& ctx, const Options& options, std::ostream& out) {
  const RunConfig& cfg = ctx.cfg;
  const double alpha = options.alpha.value_or(cfg.agent(agents::Algorithm::kConformalDqn).alpha);
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");

  const auto episodes = read_split(ctx.layout, "calibration", cfg.data_format);
  const auto data = agents::TransitionSet::from_episodes(episodes);
  if (data.size() == 0) throw CommandError(kEmptyCalibration, "calibration split is empty");

  for (int r = 0; r < cfg.n_runs; ++r) {
    const fs::path dir = ctx.layout.agent_dir(r, agents::Algorithm::kConformalDqn);
    require_artifact(dir / "agent.json", "conformal_dqn checkpoint (run train first)");
    const agents::TrainedAgent agent = agents::load_agent(dir);
    const auto result = conformal::calibrate(*agent.policy, data, alpha);
    save(ctx.layout.calibration(r), result);
    print(out, r, result);
  }
}

void cmd_retune(const Context& ctx, double alpha, std::ostream& out) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  for (int r = 0; r < ctx.cfg.n_runs; ++r) {
    const fs::path path = ctx.layout.calibration(r);
    require_artifact(path, "calibration (run calibrate first)");
    const auto result = conformal::retune_threshold(conformal::load_calibration(path), alpha);
    save(path, result);
    print(out, r, result);
  }
}

}  // namespace cdqn::cli
