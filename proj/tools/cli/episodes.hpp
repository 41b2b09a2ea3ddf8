#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "cdqn/agents/transition_set.hpp"
#include "cdqn/mdp/episode.hpp"
#include "cli/artifacts.hpp"

namespace cdqn::cli {

/// Atomic episode file write; the format follows the target's extension.
void write_episode_file(const fs::path& path, const std::vector<mdp::Episode>& episodes);

/// Loads a split written by gen-data; CommandError(kMissingArtifact) when absent.
std::vector<mdp::Episode> read_split(const Layout& layout, std::string_view split, std::string_view format);

}  // namespace cdqn::cli
