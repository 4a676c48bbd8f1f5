// finsmet-cli: classify | decide | verify | integrate a scenario config.
// Exit codes: 0 success or metrizable, 2 checked negative, 1 error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "finsmet/finsmet.h"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::int64_t seed = -1;
  std::vector<std::string> tolerances;
};

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return true;
}

int error(const std::string& msg) {
  std::cerr << "finsmet-cli: " << msg << "\n";
  return 1;
}

int run_command(const std::string& command, const Options& opt) {
  std::string text;
  if (!read_file(opt.config, text)) return error("cannot read config " + opt.config);

  fm_scenario* scenario = nullptr;
  if (fm_scenario_parse(text.c_str(), &scenario) != FM_OK) return error(fm_last_error());
  std::unique_ptr<fm_scenario, void (*)(fm_scenario*)> scenario_guard(scenario, fm_scenario_free);

  if (opt.seed >= 0 && fm_scenario_set_seed(scenario, static_cast<std::uint64_t>(opt.seed)) != FM_OK)
    return error(fm_last_error());
  for (const std::string& kv : opt.tolerances) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) return error("--tolerance expects key=value, got " + kv);
    double value = 0.0;
    try {
      value = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      return error("--tolerance value is not a number: " + kv);
    }
    if (fm_scenario_set_tolerance(scenario, kv.substr(0, eq).c_str(), value) != FM_OK) return error(fm_last_error());
  }

  fm_report* report = nullptr;
  fm_status st = FM_ERR_INTERNAL;
  if (command == "classify") st = fm_run_classify(scenario, &report);
  if (command == "decide") st = fm_run_decide(scenario, &report);
  if (command == "verify") st = fm_run_verify(scenario, &report);
  if (command == "integrate") st = fm_run_integrate(scenario, &report);
  if (st != FM_OK) return error(fm_last_error());
  std::unique_ptr<fm_report, void (*)(fm_report*)> report_guard(report, fm_report_free);

  const std::string json = fm_report_json(report);
  std::filesystem::path csv_dir = std::filesystem::current_path();
  if (opt.out.empty()) {
    std::cout << json;
  } else {
    const std::filesystem::path out(opt.out);
    if (out.has_parent_path()) {
      std::filesystem::create_directories(out.parent_path());
      csv_dir = out.parent_path();
    }
    std::ofstream f(out, std::ios::binary);
    if (!(f << json)) return error("cannot write " + opt.out);
  }
  for (std::size_t i = 0; i < fm_report_csv_count(report); ++i) {
    const std::filesystem::path p = csv_dir / fm_report_csv_name(report, i);
    std::ofstream f(p, std::ios::binary);
    if (!(f << fm_report_csv_data(report, i))) return error("cannot write " + p.string());
  }
  return fm_report_outcome(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finsler metrizability of connections with vectorial nonmetricity"};
  app.set_version_flag("--version", std::string(fm_version()));
  app.require_subcommand(1);

  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"classify", "subfamily tags of (c1, c2, c3)"},
      {"decide", "fit the one-form constraints and construct a Lagrangian"},
      {"verify", "residual and trajectory checks of a Lagrangian against the connection"},
      {"integrate", "autoparallel (and geodesic) trajectories as CSV"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "scenario config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "report path; CSV files go next to it (default: stdout, cwd)");
    sub->add_option("--seed", opt.seed, "override sampling.seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--tolerance", opt.tolerances, "override a tolerance, key=value (repeatable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  for (const auto& [name, help] : commands)
    if (app.got_subcommand(name)) return run_command(name, opt);
  return 1;
}
