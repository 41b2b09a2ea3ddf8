#include "cli/episodes.hpp"

#include <fstream>

#include "cdqn/mdp/episode_io.hpp"

namespace cdqn::cli {

void write_episode_file(const fs::path& path, const std::vector<mdp::Episode>& episodes) {
  const bool binary = path.extension() == ".bin";
  publish_atomic(path, [&](const fs::path& tmp) {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    if (binary) {
      mdp::write_episodes_binary(out, episodes);
    } else {
      mdp::write_episodes_csv(out, episodes);
    }
    out.close();
    if (!out) throw IoError("write failed: " + tmp.string());
  });
}

std::vector<mdp::Episode> read_split(const Layout& layout, std::string_view split, std::string_view format) {
  const fs::path path = layout.episodes(split, format);
  require_artifact(path, std::string(split) + " split (run gen-data first)");
  return mdp::load_episodes(path);
}

}  // namespace cdqn::cli
