// End-to-end checks of the mpsim driver.  The binary path comes from the
// MPSIM_CLI environment variable set by ctest.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "mpsim/config.hpp"
#include "mpsim/diagnostics.hpp"
#include "mpsim/state.hpp"
#include "mpsim/zeromode.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli() {
  const char* p = std::getenv("MPSIM_CLI");
  REQUIRE_MESSAGE(p != nullptr, "MPSIM_CLI is not set");
  return p;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mpsim_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int invoke(const std::string& args, const fs::path& log) {
  const std::string cmd = "\"" + cli() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open " << p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

// Small free-packet run shared by several cases: 16^3 grid, alpha = 1 so
// the default step is large and only a handful of steps are needed.
const std::string kSmallRun = "--n 16 --box_length 10 --alpha 1 --width 1.5 --momentum 0.3,0,0 ";

}  // namespace

TEST_CASE("flags override the config file and the manifest records both") {
  const fs::path dir = scratch("precedence");
  write_text(dir / "run.cfg", "# comment line\ndt = 0.01\nepsilon = 0.02  # trailing comment\n");
  const fs::path out = dir / "out";
  const int code = invoke("simulate --config \"" + (dir / "run.cfg").string() + "\" " + kSmallRun +
                              "--dt 0.005 --t_end 0.02 --out \"" + out.string() + "\"",
                          dir / "log.txt");
  REQUIRE_MESSAGE(code == 0, slurp(dir / "log.txt"));
  const json m = load(out / "manifest.json");
  CHECK(m["sources"]["dt"] == "flag");
  CHECK(m["file_values"]["dt"] == "0.01");
  CHECK(m["flag_values"]["dt"] == "0.005");
  CHECK(m["sources"]["epsilon"] == "file");
  CHECK(m["sources"]["Z"] == "default");
  CHECK(m["resolved_params"]["dt"].get<double>() == 0.005);
  CHECK(m["resolved_params"]["epsilon"].get<double>() == 0.02);
  CHECK(m["experiment"] == "simulate");

  const json s = load(out / "summary.json");
  CHECK(s["steps_taken"] == 4);
  CHECK(s["schema_version"] == 1);

  // One header and a row per step (sample_every = 1, including t = 0).
  std::istringstream csv(slurp(out / "series.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == mpsim::csv_header());
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("invalid values are rejected with the field named") {
  const fs::path dir = scratch("invalid");
  const fs::path out = dir / "out";
  CHECK(invoke("simulate --epsilon -1 --out \"" + out.string() + "\"", dir / "log.txt") == 2);
  const json e = load(out / "error.json");
  CHECK(e["error_class"] == "config");
  CHECK(e["message"].get<std::string>().find("epsilon") != std::string::npos);

  CHECK(invoke("simulate --n 24 --out \"" + out.string() + "\"", dir / "log.txt") == 2);
  CHECK(load(out / "error.json")["message"].get<std::string>().find("n") == 0);
}

TEST_CASE("unknown keys suggest the nearest valid key") {
  const fs::path dir = scratch("unknown");
  write_text(dir / "typo.cfg", "epsilom = 0.1\n");
  const fs::path out = dir / "out";
  CHECK(invoke("simulate --config \"" + (dir / "typo.cfg").string() + "\" --out \"" + out.string() + "\"",
               dir / "log.txt") == 2);
  const std::string msg = load(out / "error.json")["message"];
  CHECK(msg.find("epsilom") != std::string::npos);
  CHECK(msg.find("'epsilon'") != std::string::npos);

  CHECK(mpsim::nearest_key("box_lenght") == "box_length");
  CHECK(mpsim::nearest_key("sampel_every") == "sample_every");

  write_text(dir / "garbled.cfg", "alpha 0.5\n");
  CHECK(invoke("simulate --config \"" + (dir / "garbled.cfg").string() + "\" --out \"" + out.string() + "\"",
               dir / "log.txt") == 2);
  CHECK(load(out / "error.json")["message"].get<std::string>().find("line 1") != std::string::npos);

  // Unknown command-line flags fail in argument parsing, before any output.
  CHECK(invoke("simulate --epsilom 0.1", dir / "log.txt") == 2);
  CHECK(invoke("", dir / "log.txt") == 2);
  CHECK(invoke("--help", dir / "log.txt") == 0);
}

TEST_CASE("missing files are io errors") {
  const fs::path dir = scratch("io");
  const fs::path out = dir / "out";
  CHECK(invoke("simulate --config \"" + (dir / "absent.cfg").string() + "\" --out \"" + out.string() + "\"",
               dir / "log.txt") == 7);
  CHECK(load(out / "error.json")["error_class"] == "io");
  CHECK(invoke("simulate " + kSmallRun + "--t_end 0.1 --restart \"" + (dir / "absent.bin").string() +
                   "\" --out \"" + out.string() + "\"",
               dir / "log.txt") == 7);
}

TEST_CASE("empty config runs hydrogen on preset defaults") {
  const fs::path dir = scratch("hydrogen");
  write_text(dir / "empty.cfg", "");
  const fs::path out = dir / "out";
  const int code =
      invoke("hydrogen --config \"" + (dir / "empty.cfg").string() + "\" --out \"" + out.string() + "\"",
             dir / "log.txt");
  REQUIRE_MESSAGE(code == 0, slurp(dir / "log.txt"));
  const json m = load(out / "manifest.json");
  // Everything except the output directory comes from the preset.
  CHECK(m["defaults_used"].size() == mpsim::config_keys().size() - 1);
  CHECK(m["sources"]["output_dir"] == "flag");
  CHECK(m["resolved_params"]["n"] == 64);
  CHECK(m["resolved_params"]["Z"].get<double>() == 1.0);

  const json s = load(out / "summary.json");
  CHECK(s["reference"].get<double>() == -0.25);
  CHECK(std::abs(s["rayleigh_quotient"].get<double>() + 0.25) < 0.02 * 0.25);
  CHECK(s["relative_error"].get<double>() < 0.02);
  CHECK(s["relative_error"].get<double>() == doctest::Approx(
                                                 std::abs(s["rayleigh_quotient"].get<double>() + 0.25) / 0.25));
  CHECK(s["kinetic"].get<double>() + s["coulomb"].get<double>() + s["coulomb_shift"].get<double>() ==
        doctest::Approx(s["rayleigh_quotient"].get<double>()).epsilon(1e-12));
  // At L = 40 a few 1e-7 of the mass sits outside the inscribed ball.
  CHECK(s["warnings"].size() == 1);

  CHECK(invoke("hydrogen --Z 0 --out \"" + out.string() + "\"", dir / "log.txt") == 2);
}

TEST_CASE("repeated runs produce byte-identical series") {
  const fs::path dir = scratch("repeat");
  const std::string args = "simulate " + kSmallRun + "--t_end 0.3 --a_init random --a_amplitude 0.2 --seed 11 ";
  REQUIRE(invoke(args + "--out \"" + (dir / "a").string() + "\"", dir / "log.txt") == 0);
  REQUIRE(invoke(args + "--out \"" + (dir / "b").string() + "\"", dir / "log.txt") == 0);
  const std::string a = slurp(dir / "a" / "series.csv");
  CHECK(a.size() > 100);
  CHECK(a == slurp(dir / "b" / "series.csv"));

  // A different seed changes the initial field and so the series.
  REQUIRE(invoke("simulate " + kSmallRun + "--t_end 0.3 --a_init random --a_amplitude 0.2 --seed 12 --out \"" +
                     (dir / "c").string() + "\"",
                 dir / "log.txt") == 0);
  CHECK(a != slurp(dir / "c" / "series.csv"));
}

TEST_CASE("restart from a checkpoint is bit-exact") {
  const fs::path dir = scratch("restart");
  const std::string args = "simulate " + kSmallRun + "--dt 0.02 --t_end 0.16 --a_init random --a_amplitude 0.2 ";
  REQUIRE(invoke(args + "--checkpoint_every 4 --out \"" + (dir / "full").string() + "\"", dir / "log.txt") == 0);
  REQUIRE(fs::exists(dir / "full" / "checkpoint_4.bin"));
  REQUIRE(fs::exists(dir / "full" / "checkpoint_8.bin"));

  const mpsim::Checkpoint mid = mpsim::read_checkpoint(dir / "full" / "checkpoint_4.bin");
  CHECK(mid.state.time == doctest::Approx(0.08).epsilon(1e-14));
  CHECK(mid.n == 16);

  REQUIRE(invoke(args + "--checkpoint_every 100 --restart \"" + (dir / "full" / "checkpoint_4.bin").string() +
                     "\" --out \"" + (dir / "resumed").string() + "\"",
                 dir / "log.txt") == 0);
  CHECK(slurp(dir / "full" / "checkpoint_final.bin") == slurp(dir / "resumed" / "checkpoint_final.bin"));
  CHECK(load(dir / "resumed" / "summary.json")["steps_taken"] == 4);

  // Restarting under different physics is refused.
  CHECK(invoke(args + "--epsilon 0.5 --restart \"" + (dir / "full" / "checkpoint_4.bin").string() + "\" --out \"" +
                   (dir / "bad").string() + "\"",
               dir / "log.txt") == 2);
  CHECK(load(dir / "bad" / "error.json")["message"].get<std::string>().find("restart") != std::string::npos);
}

TEST_CASE("runtime failures map to their exit codes") {
  const fs::path dir = scratch("codes");
  CHECK(invoke("simulate " + kSmallRun + "--t_end 0.1 --picard_max 1 --out \"" + (dir / "picard").string() + "\"",
               dir / "log.txt") == 6);
  CHECK(load(dir / "picard" / "error.json")["error_class"] == "nonconvergence");

  // No scale factor leaves a resolvable packet.
  CHECK(invoke("scaling --n 32 --box_length 16 --lambdas 8 --out \"" + (dir / "domain").string() + "\"", dir / "log.txt") == 3);
  CHECK(load(dir / "domain" / "error.json")["error_class"] == "domain");
}

TEST_CASE("zeromode certificate") {
  const fs::path dir = scratch("zeromode");
  const fs::path out = dir / "out";
  REQUIRE(invoke("zeromode --alpha 1 --lambdas 1,2 --out \"" + out.string() + "\"", dir / "log.txt") == 0);
  const json c = load(out / "certificate.json");
  CHECK(c["max_dirac_residual"].get<double>() < 1e-10);
  CHECK(c["samples"] == 1000);
  CHECK(c["norm"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  // Ratio at alpha = 1: field energy 9 pi / 4 over <1/r> = 2 / pi.
  CHECK(c["zc_ratio"].get<double>() == doctest::Approx(9.0 * M_PI * M_PI / 8.0).epsilon(1e-8));
  CHECK(c["zc_upper_bound_formula"].get<double>() == doctest::Approx(9.0 * M_PI * M_PI / 8.0));
  CHECK(c["zc_lower_bound"].get<double>() == doctest::Approx(3.0 / M_PI));
  REQUIRE(c["scaling_slopes"].size() == 2);
  // E(lambda) = lambda (F - Z <1/r>) for an exact zero mode.
  const double slope1 = c["scaling_slopes"][0]["slope"], slope2 = c["scaling_slopes"][1]["slope"];
  CHECK(slope1 == doctest::Approx(9.0 * M_PI / 4.0 - 2.0 / M_PI).epsilon(1e-8));
  CHECK(slope2 == doctest::Approx(slope1).epsilon(1e-8));
  CHECK(load(out / "summary.json")["zc_ratio"] == c["zc_ratio"]);
}

TEST_CASE("epsilon sweep writes a series per run and a fit") {
  const fs::path dir = scratch("sweep");
  const fs::path out = dir / "out";
  REQUIRE(invoke("epsilon-sweep " + kSmallRun + "--t_end 0.2 --epsilons 0.05,0.1,0.2 --out \"" + out.string() + "\"",
                 dir / "log.txt") == 0);
  for (int k = 0; k < 3; ++k) CHECK(fs::exists(out / ("series_eps_" + std::to_string(k) + ".csv")));
  CHECK(slurp(out / "series.csv") == slurp(out / "series_eps_0.csv"));
  const json s = load(out / "summary.json");
  REQUIRE(s["runs"].size() == 3);
  CHECK(s["runs"][2]["epsilon"].get<double>() == 0.2);
  CHECK(s.contains("fit"));
  CHECK(load(out / "manifest.json")["resolved_params"].size() == 3);
}

TEST_CASE("scaling experiment reports the fitted law") {
  const fs::path dir = scratch("scaling");
  const fs::path out = dir / "out";
  REQUIRE(invoke("scaling --out \"" + out.string() + "\"", dir / "log.txt") == 0);
  const json s = load(out / "summary.json");
  CHECK(s["points"].size() == 5);
  CHECK(s["fit"]["points_used"].get<int>() >= 3);
  CHECK(s["fit"]["kinetic_residual"].get<double>() < 1e-6);
  CHECK(s["fit"]["linear_residual"].get<double>() < 1e-4);
}

TEST_CASE("artifacts carry every key of the output schema") {
  const char* path = std::getenv("MPSIM_SCHEMA");
  REQUIRE_MESSAGE(path != nullptr, "MPSIM_SCHEMA is not set");
  const json schema = load(path);
  const json& defs = schema["$defs"];
  auto missing = [](const json& object, const json& def) {
    std::string out;
    for (const auto& key : def["required"])
      if (!object.contains(key.get<std::string>())) out += key.get<std::string>() + " ";
    return out;
  };

  const fs::path dir = scratch("schema");
  const struct {
    std::string args, summary_def;
  } runs[] = {
      {"simulate " + kSmallRun + "--t_end 0.1", "summary_simulate"},
      {"epsilon-sweep " + kSmallRun + "--t_end 0.1 --epsilons 0.05,0.1", "summary_epsilon_sweep"},
      {"hydrogen --n 32 --box_length 20", "summary_hydrogen"},
      {"scaling --n 32 --box_length 16 --width 1.6 --lambdas 0.75,1,1.25", "summary_scaling"},
      {"zeromode --lambdas 1 --samples 50", "certificate"},
  };
  for (const auto& r : runs) {
    CAPTURE(r.args);
    const fs::path out = dir / r.summary_def;
    REQUIRE(invoke(r.args + " --out \"" + out.string() + "\"", dir / "log.txt") == 0);
    const json m = load(out / "manifest.json");
    CHECK(missing(m, defs["manifest"]) == "");
    CHECK(m["schema_version"] == schema["schema_version"]);
    const json s = load(out / "summary.json");
    CHECK(missing(s, defs[r.summary_def]) == "");

    std::istringstream csv(slurp(out / "series.csv"));
    std::string header;
    std::getline(csv, header);
    std::string expected;
    for (const auto& c : schema["series_csv"]["columns"]) expected += (expected.empty() ? "" : ",") + c.get<std::string>();
    CHECK(header == expected);
  }
  const json sim = load(dir / "summary_simulate" / "summary.json");
  CHECK(missing(sim["series"], defs["series_summary"]) == "");
  CHECK(missing(sim["bounds"], defs["bounds"]) == "");
  CHECK(missing(sim["final"], defs["energy_sample"]) == "");
  CHECK(missing(load(dir / "certificate" / "certificate.json"), defs["certificate"]) == "");

  CHECK(invoke("simulate --epsilon -1 --out \"" + (dir / "err").string() + "\"", dir / "log.txt") == 2);
  CHECK(missing(load(dir / "err" / "error.json"), defs["error"]) == "");
}
