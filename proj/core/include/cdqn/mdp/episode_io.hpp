#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "cdqn/mdp/episode.hpp"

namespace cdqn::mdp {

// Episode dataset files, one record per window, episodes contiguous and
// windows in order.
//
// CSV (first line "# cdqn-episodes v1", then a header):
//   patient_id,window,f00..f43,missing,vt,peep,fio2,reward,done,survived_90d
// Reals use the shortest round-trip representation; a missing value is "nan";
// `missing` is a 44-character string of 0/1; booleans are 0/1.
//
// Binary, little-endian: magic "CDQNEPI\0", u32 version 1, u64 episode count,
// then per episode: u64 patient_id, u8 survived, u32 window count, and per
// window 44 x f64 values, 44 x u8 missing flags, 3 x u8 levels, f64 reward,
// u8 done.

void write_episodes_csv(std::ostream& out, const std::vector<Episode>& episodes);
std::vector<Episode> read_episodes_csv(std::istream& in);

void write_episodes_binary(std::ostream& out, const std::vector<Episode>& episodes);
std::vector<Episode> read_episodes_binary(std::istream& in);

/// Format chosen by extension: ".bin" binary, anything else CSV.
void save_episodes(const std::filesystem::path& path, const std::vector<Episode>& episodes);
std::vector<Episode> load_episodes(const std::filesystem::path& path);

}  // namespace cdqn::mdp
