#include <ostream>

#include "cdqn/agents/checkpoint.hpp"
#include "cli/commands.hpp"
#include "cli/episodes.hpp"

namespace cdqn::cli {

void cmd_train(const Context& ctx, const Options& options, std::ostream& out) {
  const RunConfig& cfg = ctx.cfg;
  std::vector<agents::Algorithm> algorithms = cfg.algorithms;
  if (options.algorithm) algorithms = {agents::parse_algorithm(*options.algorithm)};

  const auto train = read_split(ctx.layout, "train", cfg.data_format);
  const auto data = agents::TransitionSet::from_episodes(train);
  out << "training on " << train.size() << " patients, " << data.size() << " transitions\n";

  for (auto algorithm : algorithms) {
    std::vector<agents::TrainedAgent> trained(static_cast<std::size_t>(cfg.n_runs));
    // Every run of the algorithm is trained before anything is written, so a
    // diverging run leaves no checkpoints behind.
    parallel_for(trained.size(), cfg.worker_count(), [&](std::size_t r) {
      agents::AgentConfig c = cfg.agent(algorithm);
      c.seed = cfg.run_seed(static_cast<int>(r));
      trained[r] = agents::train(data, c);
    });
    for (std::size_t r = 0; r < trained.size(); ++r) {
      const fs::path dir = ctx.layout.agent_dir(static_cast<int>(r), algorithm);
      publish_atomic(dir, [&](const fs::path& tmp) { agents::save_agent(tmp, trained[r]); });
      const auto& h = trained[r].history;
      out << agents::to_string(algorithm) << " run " << r << ": " << h.size() << " steps, final loss "
          << (h.empty() ? std::string("n/a") : format_real(h.back().loss)) << " -> " << dir.string() << "\n";
    }
  }
}

}  // namespace cdqn::cli
