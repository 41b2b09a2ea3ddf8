#include "cdqn/mdp/episode_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "cdqn/error.hpp"

namespace cdqn::mdp {

static_assert(std::endian::native == std::endian::little, "episode binary I/O assumes a little-endian host");

namespace {

constexpr std::string_view kCsvBanner = "# cdqn-episodes v1";
constexpr std::array<char, 8> kMagic = {'C', 'D', 'Q', 'N', 'E', 'P', 'I', '\0'};
constexpr std::uint32_t kBinaryVersion = 1;
constexpr std::size_t kDim = static_cast<std::size_t>(kStateDim);
// patient_id, window, 44 features, missing, vt, peep, fio2, reward, done, survived
constexpr std::size_t kCsvColumns = 2 + kDim + 7;

void append_double(std::string& line, double value) {
  if (std::isnan(value)) {
    line += "nan";
    return;
  }
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw IoError("failed to format a real value");
  line.append(buf.data(), end);
}

double parse_double(std::string_view field, std::size_t line_no) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw IoError("line " + std::to_string(line_no) + ": bad real '" + std::string(field) + "'");
  }
  return value;
}

template <typename Int>
Int parse_int(std::string_view field, std::size_t line_no) {
  Int value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw IoError("line " + std::to_string(line_no) + ": bad integer '" + std::string(field) + "'");
  }
  return value;
}

bool parse_flag(std::string_view field, std::size_t line_no) {
  if (field == "0") return false;
  if (field == "1") return true;
  throw IoError("line " + std::to_string(line_no) + ": expected 0 or 1, got '" + std::string(field) + "'");
}

std::string csv_header() {
  std::string header = "patient_id,window";
  for (std::size_t j = 0; j < kDim; ++j) {
    header += j < 10 ? ",f0" : ",f";
    header += std::to_string(j);
  }
  header += ",missing,vt,peep,fio2,reward,done,survived_90d";
  return header;
}

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("truncated episode file");
  return value;
}

}  // namespace

void write_episodes_csv(std::ostream& out, const std::vector<Episode>& episodes) {
  out << kCsvBanner << '\n' << csv_header() << '\n';
  std::string line;
  for (const auto& ep : episodes) {
    for (std::size_t t = 0; t < ep.windows.size(); ++t) {
      const Window& w = ep.windows[t];
      line.clear();
      line += std::to_string(ep.patient_id);
      line += ',';
      line += std::to_string(t);
      for (double v : w.state.values) {
        line += ',';
        append_double(line, v);
      }
      line += ',';
      for (bool m : w.state.missing) line += m ? '1' : '0';
      line += ',' + std::to_string(w.action.vt) + ',' + std::to_string(w.action.peep) + ',' +
              std::to_string(w.action.fio2) + ',';
      append_double(line, w.reward);
      line += w.done ? ",1" : ",0";
      line += ep.survived_90d ? ",1" : ",0";
      out << line << '\n';
    }
  }
  if (!out) throw IoError("failed to write episode CSV");
}

std::vector<Episode> read_episodes_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvBanner) throw IoError("not an episode CSV (missing version banner)");
  if (!std::getline(in, line) || line != csv_header()) throw IoError("episode CSV header does not match version 1");

  std::vector<Episode> episodes;
  std::vector<std::string_view> fields;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    fields.clear();
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != kCsvColumns) {
      throw IoError("line " + std::to_string(line_no) + ": expected " + std::to_string(kCsvColumns) + " columns");
    }
    const auto patient = parse_int<std::uint64_t>(fields[0], line_no);
    const auto window = parse_int<std::size_t>(fields[1], line_no);
    const bool survived = parse_flag(fields[kCsvColumns - 1], line_no);
    if (window == 0) {
      episodes.push_back(Episode{patient, {}, survived});
    } else if (episodes.empty() || episodes.back().patient_id != patient ||
               episodes.back().windows.size() != window) {
      throw IoError("line " + std::to_string(line_no) + ": windows must be contiguous and in order");
    }
    Window w;
    for (std::size_t j = 0; j < kDim; ++j) w.state.values[j] = parse_double(fields[2 + j], line_no);
    const std::string_view mask = fields[2 + kDim];
    if (mask.size() != kDim) throw IoError("line " + std::to_string(line_no) + ": missing mask must have 44 flags");
    for (std::size_t j = 0; j < kDim; ++j) {
      if (mask[j] != '0' && mask[j] != '1') throw IoError("line " + std::to_string(line_no) + ": bad missing mask");
      w.state.missing[j] = mask[j] == '1';
    }
    w.action.vt = parse_int<int>(fields[3 + kDim], line_no);
    w.action.peep = parse_int<int>(fields[4 + kDim], line_no);
    w.action.fio2 = parse_int<int>(fields[5 + kDim], line_no);
    w.reward = parse_double(fields[6 + kDim], line_no);
    w.done = parse_flag(fields[7 + kDim], line_no);
    episodes.back().windows.push_back(w);
  }
  return episodes;
}

void write_episodes_binary(std::ostream& out, const std::vector<Episode>& episodes) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kBinaryVersion);
  put<std::uint64_t>(out, episodes.size());
  for (const auto& ep : episodes) {
    put<std::uint64_t>(out, ep.patient_id);
    put<std::uint8_t>(out, ep.survived_90d ? 1 : 0);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(ep.windows.size()));
    for (const auto& w : ep.windows) {
      for (double v : w.state.values) put<double>(out, v);
      for (bool m : w.state.missing) put<std::uint8_t>(out, m ? 1 : 0);
      put<std::uint8_t>(out, static_cast<std::uint8_t>(w.action.vt));
      put<std::uint8_t>(out, static_cast<std::uint8_t>(w.action.peep));
      put<std::uint8_t>(out, static_cast<std::uint8_t>(w.action.fio2));
      put<double>(out, w.reward);
      put<std::uint8_t>(out, w.done ? 1 : 0);
    }
  }
  if (!out) throw IoError("failed to write episode binary");
}

std::vector<Episode> read_episodes_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError("not an episode binary file (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kBinaryVersion) throw IoError("unsupported episode binary version " + std::to_string(version));
  const auto count = get<std::uint64_t>(in);
  std::vector<Episode> episodes;
  for (std::uint64_t e = 0; e < count; ++e) {
    Episode ep;
    ep.patient_id = get<std::uint64_t>(in);
    ep.survived_90d = get<std::uint8_t>(in) != 0;
    const auto windows = get<std::uint32_t>(in);
    if (windows > static_cast<std::uint32_t>(kHorizon)) throw IoError("corrupt episode binary (window count)");
    for (std::uint32_t t = 0; t < windows; ++t) {
      Window w;
      for (auto& v : w.state.values) v = get<double>(in);
      for (auto& m : w.state.missing) m = get<std::uint8_t>(in) != 0;
      w.action.vt = get<std::uint8_t>(in);
      w.action.peep = get<std::uint8_t>(in);
      w.action.fio2 = get<std::uint8_t>(in);
      w.reward = get<double>(in);
      w.done = get<std::uint8_t>(in) != 0;
      ep.windows.push_back(w);
    }
    episodes.push_back(std::move(ep));
  }
  return episodes;
}

void save_episodes(const std::filesystem::path& path, const std::vector<Episode>& episodes) {
  const bool binary = path.extension() == ".bin";
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  if (binary) {
    write_episodes_binary(out, episodes);
  } else {
    write_episodes_csv(out, episodes);
  }
}

std::vector<Episode> load_episodes(const std::filesystem::path& path) {
  const bool binary = path.extension() == ".bin";
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open " + path.string());
  return binary ? read_episodes_binary(in) : read_episodes_csv(in);
}

}  // namespace cdqn::mdp
