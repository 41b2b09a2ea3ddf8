#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "cli/artifacts.hpp"
#include "cli/run_config.hpp"

namespace cdqn::cli {

/// Command-line overrides shared by every verb.
struct Options {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out;
  std::optional<std::string> algorithm;
  std::optional<double> alpha;
};

/// Environment variable that overrides the configured output directory
/// (--out takes precedence over it).
inline constexpr const char* kOutputEnv = "CDQN_OUT";

struct Context {
  RunConfig cfg;
  Layout layout;
};

/// Loads the config (built-in defaults without --config) and applies overrides.
Context make_context(const Options& options);

void cmd_gen_data(const Context& ctx, std::ostream& out);
void cmd_train(const Context& ctx, const Options& options, std::ostream& out);
void cmd_calibrate(const Context& ctx, const Options& options, std::ostream& out);
void cmd_retune(const Context& ctx, double alpha, std::ostream& out);
void cmd_evaluate(const Context& ctx, std::ostream& out);
void cmd_report(const Layout& layout, std::ostream& out);

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cdqn::cli
