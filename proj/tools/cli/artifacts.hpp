#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include "cdqn/agents/trainer.hpp"
#include "cdqn/error.hpp"

namespace cdqn::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigFailure = 2,
  kIoFailure = 3,
  kDivergence = 4,
  kEmptyCalibration = 5,
  kMissingArtifact = 6,
};

/// Error carrying the process exit code it maps to.
class CommandError : public Error {
 public:
  CommandError(ExitCode code, const std::string& what) : Error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Output directory layout:
//   data/{train,validation,calibration,test,ood}.<bin|csv>
//   data/manifest.json
//   runs/run-<r>/<algorithm>/          agent checkpoint
//   runs/run-<r>/conformal_dqn/calibration.json
//   report/evaluation.json, report/*.csv, report/summary.md
struct Layout {
  fs::path root;

  fs::path data_dir() const { return root / "data"; }
  fs::path episodes(std::string_view split, std::string_view format) const;
  fs::path manifest() const { return data_dir() / "manifest.json"; }
  fs::path run_dir(int run) const;
  fs::path agent_dir(int run, agents::Algorithm algorithm) const;
  fs::path calibration(int run) const;
  fs::path report_dir() const { return root / "report"; }
};

/// Throws CommandError(kMissingArtifact) unless `path` exists.
void require_artifact(const fs::path& path, std::string_view what);

/// Unique sibling name for staging a write to `target`.
fs::path staging_path(const fs::path& target);

/// Writes `content` next to `path` under a unique name, then renames it over `path`.
void write_file_atomic(const fs::path& path, std::string_view content);

/// Calls `write(tmp)` on a staging path and renames the result over `target`
/// (file or directory). The staging path is removed if `write` throws.
void publish_atomic(const fs::path& target, const std::function<void(const fs::path&)>& write);

/// Runs task(i) for i in [0, n) on up to `workers` threads. The first
/// exception (lowest index) is rethrown after every task has finished.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& task);

/// Shortest round-trip decimal form; "nan" for NaN.
std::string format_real(double x);

}  // namespace cdqn::cli
