// Command-line driver: mpsim <experiment> [--config PATH] [--out DIR] [--seed N] [--<key> VALUE ...]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "mpsim/config.hpp"
#include "mpsim/error.hpp"
#include "mpsim/experiments.hpp"

namespace {

struct SubcommandArgs {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void report_error(mpsim::ErrorClass cls, const std::string& message, const std::filesystem::path& out_dir) {
  const auto j = mpsim::error_json(cls, message);
  std::cerr << j.dump() << "\n";
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!ec) {
      std::ofstream os(out_dir / "error.json");
      if (os) os << j.dump(2) << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral Maxwell-Pauli simulator and verification driver"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "time-dependent run with energy, norm, gauge and continuity series"},
      {"zeromode", "Loss-Yau zero-mode certificate and critical-charge quadrature"},
      {"hydrogen", "hydrogen ground-state Rayleigh quotient on the torus"},
      {"scaling", "energy scaling curve of a Gaussian pair"},
      {"epsilon-sweep", "energy decay rate against epsilon"},
  };
  std::vector<SubcommandArgs> subs(commands.size());
  for (std::size_t i = 0; i < commands.size(); ++i) {
    SubcommandArgs& s = subs[i];
    s.app = app.add_subcommand(commands[i].first, commands[i].second);
    s.app->add_option("--config", s.config_path, "key = value configuration file");
    for (const auto& key : mpsim::config_keys()) {
      std::string flag = "--" + key.name;
      if (key.name == "output_dir") flag = "--out,--output_dir";
      s.options[key.name] = s.app->add_option(flag, s.values[key.name], key.help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    report_error(mpsim::ErrorClass::config, e.what(), {});
    return mpsim::exit_code(mpsim::ErrorClass::config);
  }

  std::filesystem::path out_dir;
  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      SubcommandArgs& s = subs[i];
      if (!s.app->parsed()) continue;
      std::map<std::string, std::string> flag_values;
      for (const auto& [name, opt] : s.options)
        if (opt->count() > 0) flag_values[name] = s.values[name];
      // Known before the config file is read so its errors land in error.json.
      if (auto it = flag_values.find("output_dir"); it != flag_values.end()) out_dir = it->second;
      std::map<std::string, std::string> file_values;
      if (!s.config_path.empty()) file_values = mpsim::read_config_file(s.config_path);
      if (auto jt = file_values.find("output_dir"); out_dir.empty() && jt != file_values.end()) out_dir = jt->second;
      const mpsim::RunConfig cfg =
          mpsim::parse_config(mpsim::parse_experiment(commands[i].first), file_values, flag_values);
      out_dir = cfg.output_dir;
      mpsim::run_experiment(cfg, &std::cout);
      std::cout << "artifacts written to " << cfg.output_dir.string() << "\n";
    }
  } catch (const mpsim::Error& e) {
    report_error(e.error_class(), e.what(), out_dir);
    return mpsim::exit_code(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error_class", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
