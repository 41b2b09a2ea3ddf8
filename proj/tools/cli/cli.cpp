#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "cdqn/agents/trainer.hpp"
#include "cli/commands.hpp"

namespace cdqn::cli {

Context make_context(const Options& options) {
  Context ctx;
  if (options.config) {
    ctx.cfg = load_run_config(*options.config);
  } else {
    ctx.cfg = run_config_from_json(nlohmann::json::object());
  }
  if (options.seed) ctx.cfg.seed = *options.seed;
  if (options.out) {
    ctx.cfg.output_dir = *options.out;
  } else if (const char* env = std::getenv(kOutputEnv); env && *env) {
    ctx.cfg.output_dir = env;
  }
  ctx.layout = Layout{ctx.cfg.output_dir};
  return ctx;
}

namespace {

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Run configuration (JSON)");
  cmd->add_option("--seed", o.seed, "Global seed, overrides the config");
  cmd->add_option("--out", o.out, std::string("Output directory, overrides the config and ") + kOutputEnv);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Offline ventilation policies with conformal action filtering"};
  app.name("cdqn");
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen-data", "Simulate, impute, split and write episode files");
  auto* train = app.add_subcommand("train", "Train agents for every run");
  auto* calibrate = app.add_subcommand("calibrate", "Calibrate the conformal threshold");
  auto* retune = app.add_subcommand("retune", "Recompute the threshold at a new alpha from stored scores");
  auto* evaluate = app.add_subcommand("evaluate", "FQE evaluation and report tables");
  auto* report = app.add_subcommand("report", "Merge evaluation outputs into summary.md");
  for (auto* cmd : {gen, train, calibrate, retune, evaluate, report}) add_common(cmd, o);
  train->add_option("--algorithm", o.algorithm, "ddqn, conformal_dqn, cql or bc (default: all configured)");
  calibrate->add_option("--alpha", o.alpha, "Miscoverage level, overrides the config");
  retune->add_option("--alpha", o.alpha, "New miscoverage level")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigFailure;
  }

  try {
    const Context ctx = make_context(o);
    if (gen->parsed()) cmd_gen_data(ctx, out);
    if (train->parsed()) cmd_train(ctx, o, out);
    if (calibrate->parsed()) cmd_calibrate(ctx, o, out);
    if (retune->parsed()) cmd_retune(ctx, *o.alpha, out);
    if (evaluate->parsed()) cmd_evaluate(ctx, out);
    if (report->parsed()) cmd_report(ctx.layout, out);
    return kOk;
  } catch (const CommandError& e) {
    err << "error: " << e.what() << "\n";
    return e.code();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const agents::DivergenceError& e) {
    err << "diverged: " << e.what() << "\n";
    return kDivergence;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace cdqn::cli
