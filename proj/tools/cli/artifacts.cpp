#include "cli/artifacts.hpp"

#include <unistd.h>

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <thread>
#include <vector>

namespace cdqn::cli {

fs::path Layout::episodes(std::string_view split, std::string_view format) const {
  return data_dir() / (std::string(split) + "." + std::string(format));
}

fs::path Layout::run_dir(int run) const { return root / "runs" / ("run-" + std::to_string(run)); }

fs::path Layout::agent_dir(int run, agents::Algorithm algorithm) const {
  return run_dir(run) / std::string(agents::to_string(algorithm));
}

fs::path Layout::calibration(int run) const {
  return agent_dir(run, agents::Algorithm::kConformalDqn) / "calibration.json";
}

void require_artifact(const fs::path& path, std::string_view what) {
  if (!fs::exists(path)) {
    throw CommandError(kMissingArtifact, "missing " + std::string(what) + ": " + path.string());
  }
}

fs::path staging_path(const fs::path& target) {
  static std::atomic<unsigned long> counter{0};
  const std::string name = "." + target.filename().string() + ".tmp-" + std::to_string(::getpid()) + "-" +
                           std::to_string(counter.fetch_add(1));
  return target.parent_path() / name;
}

void publish_atomic(const fs::path& target, const std::function<void(const fs::path&)>& write) {
  if (!target.parent_path().empty()) fs::create_directories(target.parent_path());
  const fs::path tmp = staging_path(target);
  try {
    write(tmp);
    if (fs::is_directory(tmp) && fs::exists(target)) fs::remove_all(target);
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  publish_atomic(path, [&](const fs::path& tmp) {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw IoError("write failed: " + tmp.string());
  });
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace cdqn::cli
