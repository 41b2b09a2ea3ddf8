#include <fstream>
#include <ostream>
#include <sstream>

#include "cdqn/config_json.hpp"
#include "cli/commands.hpp"

namespace cdqn::cli {

using config::Json;

namespace {

const char* const kInputs[] = {"evaluation.json", "correlation.csv", "values.csv",
                               "actions.csv",     "ood_q.csv",       "coverage.csv"};

std::string num(const Json& v, int digits = 4) {
  if (!v.is_number()) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v.get<double>());
  return buf;
}

std::string pm(const Json& stat, int digits = 4) { return num(stat["mean"], digits) + " ± " + num(stat["std"], digits); }

}  // namespace

void cmd_report(const Layout& layout, std::ostream& out) {
  const fs::path dir = layout.report_dir();
  for (const char* name : kInputs) require_artifact(dir / name, "evaluation output (run evaluate first)");

  std::ifstream in(dir / "evaluation.json");
  Json ev;
  try {
    ev = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed evaluation.json: " + std::string(e.what()));
  }
  if (ev.value("format", "") != "cdqn-evaluation") throw IoError("evaluation.json has the wrong format tag");

  // evaluate emits policies sorted by name; keep that order here.
  const Json& policies = ev.at("policies");
  std::ostringstream md;
  md << "# ConformalDQN evaluation summary\n\n";
  md << "Runs: " << ev.at("n_runs") << ", seed " << ev.at("seed") << ", test patients " << ev.at("test_patients")
     << ", OOD patients " << ev.at("ood_patients") << ". Values are mean ± population std over runs.\n\n";

  md << "## Mortality correlation\n\n| policy | Pearson r (Q, mortality) |\n|---|---|\n";
  for (const auto& p : policies) md << "| " << p.at("name").get<std::string>() << " | " << pm(p.at("mortality_correlation")) << " |\n";

  md << "\n## Initial-state value and mapped survival\n\n| policy | FQE initial value | survival % |\n|---|---|---|\n";
  for (const auto& p : policies) {
    md << "| " << p.at("name").get<std::string>() << " | " << pm(p.at("initial_value")) << " | "
       << pm(p.at("survival_pct"), 2) << " |\n";
  }

  md << "\n## Action distribution (fraction per level)\n\n";
  for (const char* dim : {"vt", "peep", "fio2"}) {
    md << "### " << dim << "\n\n| policy | 0 | 1 | 2 | 3 | 4 | 5 | 6 |\n|---|---|---|---|---|---|---|---|\n";
    for (const auto& p : policies) {
      const Json& a = p.at("actions");
      const double total = a.at("total").get<double>();
      md << "| " << p.at("name").get<std::string>();
      for (const auto& c : a.at(dim)) md << " | " << num(Json(total > 0 ? c.get<double>() / total : 0.0), 3);
      md << " |\n";
    }
    md << "\n";
  }

  md << "## In-distribution vs OOD initial Q-values\n\nThreshold " << num(ev.at("overestimation_threshold"), 1)
     << ".\n\n| policy | ID max Q | OOD max Q | ID policy Q | OOD policy Q | flagged |\n|---|---|---|---|---|---|\n";
  for (const auto& p : policies) {
    if (!p.contains("ood")) continue;
    const Json& o = p.at("ood");
    std::string flag = o.at("id_flag").get<bool>() ? "ID" : "";
    if (o.at("ood_flag").get<bool>()) flag += flag.empty() ? "OOD" : ", OOD";
    md << "| " << p.at("name").get<std::string>() << " | " << pm(o.at("id_max_q")) << " | " << pm(o.at("ood_max_q"))
       << " | " << pm(o.at("id_policy_q")) << " | " << pm(o.at("ood_policy_q")) << " | "
       << (flag.empty() ? "no" : flag) << " |\n";
  }

  md << "\n## Conformal coverage on the test split\n\n| run | n calibration | alpha | tau | coverage | target | result "
        "|\n|---|---|---|---|---|---|---|\n";
  for (const auto& c : ev.at("coverage")) {
    md << "| " << c.at("run") << " | " << c.at("n_calibration") << " | " << num(c.at("alpha"), 3) << " | "
       << num(c.at("tau"), 4) << " | " << num(c.at("coverage"), 4) << " | " << num(c.at("target"), 3) << " | "
       << (c.at("pass").get<bool>() ? "pass" : "fail") << " |\n";
  }

  write_file_atomic(dir / "summary.md", md.str());
  out << "wrote " << (dir / "summary.md").string() << " (" << policies.size() << " policies)\n";
}

}  // namespace cdqn::cli
