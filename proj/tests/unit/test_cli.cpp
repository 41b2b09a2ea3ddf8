#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "cdqn/conformal/conformal.hpp"
#include "cdqn/error.hpp"
#include "cdqn/mdp/episode_io.hpp"
#include "cli/commands.hpp"
#include "cli/episodes.hpp"

using namespace cdqn;
using namespace cdqn::cli;
using nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result cdqn_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cdqn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("cdqn-cli-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

json tiny_config() {
  return json{{"seed", 3},
              {"n_runs", 2},
              {"workers", 1},
              {"sim", {{"n_patients", 100}}},
              {"agents", {{"defaults", {{"hidden_layers", {8}}, {"max_steps", 30}, {"batch_size", 32}}}}},
              {"fqe", {{"iterations", 2}, {"steps_per_iteration", 10}, {"hidden_layers", {8}}}}};
}

fs::path write_config(const TempDir& dir, json j, const std::string& name = "run.json") {
  j["output_dir"] = (dir.path() / "out").string();
  const fs::path p = dir.path() / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("run config defaults and layering") {
  const RunConfig d = run_config_from_json(json::object());
  CHECK(d.n_runs == 5);
  CHECK(d.agent(agents::Algorithm::kCql).learning_rate == 1e-4);
  CHECK(d.agent(agents::Algorithm::kDdqn).learning_rate == 1e-3);
  CHECK(d.agent(agents::Algorithm::kConformalDqn).alpha == 0.15);
  CHECK(d.algorithms.size() == 4);

  const RunConfig c = run_config_from_json(
      json{{"agents", {{"defaults", {{"max_steps", 50}}}, {"cql", {{"max_steps", 70}}}}}, {"algorithms", {"ddqn", "bc"}}});
  CHECK(c.agent(agents::Algorithm::kDdqn).max_steps == 50);
  CHECK(c.agent(agents::Algorithm::kCql).max_steps == 70);
  CHECK(c.agent(agents::Algorithm::kCql).learning_rate == 1e-4);
  REQUIRE(c.algorithms.size() == 2);
  CHECK(c.algorithms[0] == agents::Algorithm::kBc);

  const RunConfig again = run_config_from_json(to_json(c));
  CHECK(to_json(again) == to_json(c));
}

TEST_CASE("run config seeds") {
  RunConfig c = run_config_from_json(json{{"seed", 5}});
  CHECK(c.run_seed(0) != c.run_seed(1));
  CHECK(c.run_seed(1) == derive_seed(5, std::uint64_t{1}));
  CHECK(c.sim_seed() != c.split_seed());
  const RunConfig e = run_config_from_json(json{{"seed", 5}, {"sim", {{"seed", 99}}}});
  CHECK(e.sim_seed() == 99);
}

TEST_CASE("shipped configs load") {
  int loaded = 0;
  for (const auto& entry : fs::directory_iterator(CDQN_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_run_config(entry.path()));
    ++loaded;
  }
  CHECK(loaded >= 3);
  const RunConfig full = load_run_config(fs::path(CDQN_CONFIG_DIR) / "full.json");
  CHECK(full.agent(agents::Algorithm::kDdqn).max_steps == 30000);
  CHECK(full.agent(agents::Algorithm::kCql).learning_rate == 1e-4);
  CHECK(full.sim.n_patients == 10000);
}

TEST_CASE("run config errors") {
  CHECK_THROWS_AS(run_config_from_json(json{{"n_run", 2}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"format", "other"}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"version", 2}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"n_runs", 0}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"algorithms", {"ddqn", "ddqn"}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"agents", {{"sarsa", json::object()}}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"agents", {{"defaults", {{"algorithm", "cql"}}}}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"agents", {{"cql", {{"algorithm", "bc"}}}}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"agents", {{"ddqn", {{"state_dim", 3}}}}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"data_format", "xml"}}), ConfigError);
}

TEST_CASE("command line errors map to exit codes") {
  TempDir dir("errors");
  CHECK(cdqn_cli({}).code == kConfigFailure);
  CHECK(cdqn_cli({"frobnicate"}).code == kConfigFailure);
  CHECK(cdqn_cli({"retune"}).code == kConfigFailure);
  CHECK(cdqn_cli({"--help"}).code == kOk);
  CHECK(cdqn_cli({"gen-data", "--config", (dir.path() / "missing.json").string()}).code == kIoFailure);

  const fs::path bad = dir.path() / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK(cdqn_cli({"gen-data", "--config", bad.string()}).code == kConfigFailure);
  const fs::path unknown = write_config(dir, json{{"colour", "blue"}}, "unknown.json");
  CHECK(cdqn_cli({"gen-data", "--config", unknown.string()}).code == kConfigFailure);

  const fs::path cfg = write_config(dir, tiny_config());
  const Result train = cdqn_cli({"train", "--config", cfg.string()});
  CHECK(train.code == kMissingArtifact);
  CHECK(train.err.find("train split") != std::string::npos);
  CHECK(cdqn_cli({"evaluate", "--config", cfg.string()}).code == kMissingArtifact);
  CHECK(cdqn_cli({"report", "--config", cfg.string()}).code == kMissingArtifact);
  CHECK(cdqn_cli({"retune", "--config", cfg.string(), "--alpha", "0.2"}).code == kMissingArtifact);
}

TEST_CASE("gen-data writes splits and manifest deterministically") {
  TempDir dir("gen");
  const fs::path cfg = write_config(dir, tiny_config());
  const Result r = cdqn_cli({"gen-data", "--config", cfg.string()});
  REQUIRE(r.code == kOk);
  CHECK(r.out.find("patients 100") != std::string::npos);

  const Layout layout{dir.path() / "out"};
  const json m = json::parse(slurp(layout.manifest()));
  CHECK(m["n_patients"] == 100);
  CHECK(m["splits"]["train"]["patients"] == 60);
  CHECK(m["splits"]["validation"]["patients"] == 10);
  CHECK(m["splits"]["calibration"]["patients"] == 10);
  CHECK(m["splits"]["test"]["patients"] == 20);
  std::size_t ood = 0;
  for (const char* s : {"train", "validation", "calibration", "test"}) {
    const auto& sp = m["splits"][s];
    CHECK(sp["in_distribution"].get<std::size_t>() + sp["ood"].get<std::size_t>() == sp["patients"].get<std::size_t>());
    CHECK(mdp::load_episodes(layout.episodes(s, "bin")).size() == sp["in_distribution"].get<std::size_t>());
    ood += sp["ood"].get<std::size_t>();
  }
  CHECK(mdp::load_episodes(layout.episodes("ood", "bin")).size() == ood);
  CHECK(m["ood_ids"].size() == ood);

  const std::string first = slurp(layout.episodes("train", "bin")) + slurp(layout.manifest());
  REQUIRE(cdqn_cli({"gen-data", "--config", cfg.string()}).code == kOk);
  CHECK(slurp(layout.episodes("train", "bin")) + slurp(layout.manifest()) == first);

  for (const auto& entry : fs::directory_iterator(layout.data_dir())) {
    CHECK(entry.path().filename().string().find(".tmp-") == std::string::npos);
  }
}

TEST_CASE("gen-data OOD fraction under the default simulator") {
  TempDir dir("oodfrac");
  json j = tiny_config();
  j["sim"]["n_patients"] = 2000;
  const fs::path cfg = write_config(dir, j);
  REQUIRE(cdqn_cli({"gen-data", "--config", cfg.string()}).code == kOk);
  const json m = json::parse(slurp(Layout{dir.path() / "out"}.manifest()));
  CHECK(m["ood_fraction"].get<double>() == doctest::Approx(0.20).epsilon(0.2));
}

TEST_CASE("csv data format and output overrides") {
  TempDir dir("csv");
  json j = tiny_config();
  j["data_format"] = "csv";
  const fs::path cfg = write_config(dir, j);
  const fs::path elsewhere = dir.path() / "flag-out";
  REQUIRE(cdqn_cli({"gen-data", "--config", cfg.string(), "--out", elsewhere.string()}).code == kOk);
  CHECK(fs::exists(elsewhere / "data" / "train.csv"));
  CHECK_FALSE(fs::exists(dir.path() / "out"));

  const fs::path env_out = dir.path() / "env-out";
  ::setenv(kOutputEnv, env_out.c_str(), 1);
  const Result r = cdqn_cli({"gen-data", "--config", cfg.string()});
  const Result flag = cdqn_cli({"gen-data", "--config", cfg.string(), "--out", (dir.path() / "flag2").string()});
  ::unsetenv(kOutputEnv);
  CHECK(r.code == kOk);
  CHECK(fs::exists(env_out / "data" / "manifest.json"));
  CHECK(flag.code == kOk);
  CHECK(fs::exists(dir.path() / "flag2" / "data" / "manifest.json"));

  const std::string seeded = slurp(elsewhere / "data" / "manifest.json");
  REQUIRE(cdqn_cli({"gen-data", "--config", cfg.string(), "--out", elsewhere.string(), "--seed", "4"}).code == kOk);
  CHECK(slurp(elsewhere / "data" / "manifest.json") != seeded);
}

TEST_CASE("train emits the checkpoints of each algorithm") {
  TempDir dir("train");
  const fs::path cfg = write_config(dir, tiny_config());
  REQUIRE(cdqn_cli({"gen-data", "--config", cfg.string()}).code == kOk);
  const Layout layout{dir.path() / "out"};

  REQUIRE(cdqn_cli({"train", "--config", cfg.string(), "--algorithm", "bc"}).code == kOk);
  const fs::path bc = layout.agent_dir(0, agents::Algorithm::kBc);
  CHECK(fs::exists(bc / "policy.net"));
  CHECK_FALSE(fs::exists(bc / "q.net"));
  CHECK_FALSE(fs::exists(layout.agent_dir(0, agents::Algorithm::kDdqn)));

  REQUIRE(cdqn_cli({"train", "--config", cfg.string(), "--algorithm", "conformal_dqn"}).code == kOk);
  const fs::path c0 = layout.agent_dir(0, agents::Algorithm::kConformalDqn);
  const fs::path c1 = layout.agent_dir(1, agents::Algorithm::kConformalDqn);
  for (const char* f : {"q.net", "q_target.net", "policy.net", "agent.json", "history.csv"}) {
    CHECK(fs::exists(c0 / f));
  }
  CHECK(slurp(c0 / "q.net") != slurp(c1 / "q.net"));
  CHECK(lines(slurp(c0 / "history.csv")).size() == 31);
}

TEST_CASE("divergence exits with code 4 and leaves no checkpoint") {
  TempDir dir("diverge");
  json j = tiny_config();
  j["agents"]["ddqn"] = {{"divergence_threshold", 1e-12}};
  const fs::path cfg = write_config(dir, j);
  REQUIRE(cdqn_cli({"gen-data", "--config", cfg.string()}).code == kOk);
  const Result r = cdqn_cli({"train", "--config", cfg.string(), "--algorithm", "ddqn"});
  CHECK(r.code == kDivergence);
  const Layout layout{dir.path() / "out"};
  CHECK_FALSE(fs::exists(layout.agent_dir(0, agents::Algorithm::kDdqn)));
  CHECK_FALSE(fs::exists(layout.agent_dir(1, agents::Algorithm::kDdqn)));
}

TEST_CASE("calibrate and retune") {
  TempDir dir("calibrate");
  const fs::path cfg = write_config(dir, tiny_config());
  REQUIRE(cdqn_cli({"gen-data", "--config", cfg.string()}).code == kOk);
  CHECK(cdqn_cli({"calibrate", "--config", cfg.string()}).code == kMissingArtifact);
  REQUIRE(cdqn_cli({"train", "--config", cfg.string(), "--algorithm", "conformal_dqn"}).code == kOk);
  const Result r = cdqn_cli({"calibrate", "--config", cfg.string()});
  REQUIRE(r.code == kOk);
  CHECK(r.out.find("alpha 0.15") != std::string::npos);

  const Layout layout{dir.path() / "out"};
  const auto cal = conformal::load_calibration(layout.calibration(0));
  CHECK(cal.alpha == 0.15);
  CHECK(cal.tau >= 0.0);
  CHECK(cal.tau <= 1.0);

  const std::string q_before = slurp(layout.agent_dir(0, agents::Algorithm::kConformalDqn) / "q.net");
  const std::string p_before = slurp(layout.agent_dir(0, agents::Algorithm::kConformalDqn) / "policy.net");
  REQUIRE(cdqn_cli({"retune", "--config", cfg.string(), "--alpha", "0.3"}).code == kOk);
  const auto retuned = conformal::load_calibration(layout.calibration(0));
  CHECK(retuned.alpha == 0.3);
  CHECK(slurp(layout.agent_dir(0, agents::Algorithm::kConformalDqn) / "q.net") == q_before);
  CHECK(slurp(layout.agent_dir(0, agents::Algorithm::kConformalDqn) / "policy.net") == p_before);

  REQUIRE(cdqn_cli({"calibrate", "--config", cfg.string(), "--alpha", "0.3"}).code == kOk);
  const auto fresh = conformal::load_calibration(layout.calibration(0));
  CHECK(fresh.tau == retuned.tau);
  CHECK(fresh.scores == retuned.scores);

  CHECK(cdqn_cli({"calibrate", "--config", cfg.string(), "--alpha", "1.5"}).code == kConfigFailure);

  write_episode_file(layout.episodes("calibration", "bin"), {});
  CHECK(cdqn_cli({"calibrate", "--config", cfg.string()}).code == kEmptyCalibration);
}

TEST_CASE("evaluate and report") {
  TempDir dir("evaluate");
  const fs::path cfg = write_config(dir, tiny_config());
  for (const char* verb : {"gen-data", "train", "calibrate"}) REQUIRE(cdqn_cli({verb, "--config", cfg.string()}).code == kOk);
  const Result ev = cdqn_cli({"evaluate", "--config", cfg.string()});
  REQUIRE(ev.code == kOk);
  CHECK(ev.out.find("coverage run 0:") != std::string::npos);
  CHECK((ev.out.find("PASS") != std::string::npos || ev.out.find("FAIL") != std::string::npos));

  const Layout layout{dir.path() / "out"};
  const json report = json::parse(slurp(layout.report_dir() / "evaluation.json"));
  std::vector<std::string> names;
  for (const auto& p : report["policies"]) {
    names.push_back(p["name"]);
    CHECK(p["initial_value"].contains("std"));
    CHECK(p["mortality_correlation"].contains("std"));
    CHECK(p["survival_pct"].contains("std"));
    CHECK(p["runs"].size() == 2);
    for (const char* d : {"vt", "peep", "fio2"}) {
      std::size_t sum = 0;
      for (const auto& c : p["actions"][d]) sum += c.get<std::size_t>();
      CHECK(sum == p["actions"]["total"].get<std::size_t>());
    }
  }
  CHECK(names == std::vector<std::string>{"bc", "conformal_dqn", "cql", "ddqn", "physician"});
  CHECK(report["coverage"].size() == 2);

  const auto t2 = lines(slurp(layout.report_dir() / "values.csv"));
  REQUIRE(t2.size() == 6);
  CHECK(t2[1].rfind("bc,", 0) == 0);
  CHECK(t2[5].rfind("physician,", 0) == 0);
  const auto f4 = lines(slurp(layout.report_dir() / "ood_q.csv"));
  CHECK(f4.size() == 4);

  REQUIRE(cdqn_cli({"report", "--config", cfg.string()}).code == kOk);
  const std::string summary = slurp(layout.report_dir() / "summary.md");
  REQUIRE(cdqn_cli({"report", "--out", (dir.path() / "out").string()}).code == kOk);
  CHECK(slurp(layout.report_dir() / "summary.md") == summary);
  CHECK(summary.find("| physician |") != std::string::npos);

  fs::remove_all(layout.agent_dir(1, agents::Algorithm::kCql));
  CHECK(cdqn_cli({"evaluate", "--config", cfg.string()}).code == kMissingArtifact);
}

TEST_CASE("single-policy run gives single-row tables") {
  TempDir dir("single");
  json j = tiny_config();
  j["algorithms"] = {"ddqn"};
  j["physician_baseline"] = false;
  j["n_runs"] = 1;
  const fs::path cfg = write_config(dir, j);
  for (const char* verb : {"gen-data", "train", "evaluate", "report"}) {
    REQUIRE(cdqn_cli({verb, "--config", cfg.string()}).code == kOk);
  }
  const Layout layout{dir.path() / "out"};
  CHECK(lines(slurp(layout.report_dir() / "correlation.csv")).size() == 2);
  CHECK(lines(slurp(layout.report_dir() / "values.csv")).size() == 2);
  CHECK(lines(slurp(layout.report_dir() / "coverage.csv")).size() == 1);
}
