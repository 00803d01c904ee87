#include "mpsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mpsim/error.hpp"

namespace mpsim {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw Error(ErrorClass::config, field + ": " + why);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (trim(text.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  fail(key, "expected a number, got '" + text + "'");
}

long long to_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (trim(text.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  fail(key, "expected an integer, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

Vec3 to_vec3(const std::string& key, const std::string& text) {
  const auto v = to_list(key, text);
  if (v.size() != 3) fail(key, "expected three comma-separated numbers, got '" + text + "'");
  return {v[0], v[1], v[2]};
}

std::array<cplx, 2> to_spin(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  const double r = 1.0 / std::sqrt(2.0);
  if (t == "up") return {cplx{1, 0}, cplx{0, 0}};
  if (t == "down") return {cplx{0, 0}, cplx{1, 0}};
  if (t == "x") return {cplx{r, 0}, cplx{r, 0}};
  if (t == "y") return {cplx{r, 0}, cplx{0, r}};
  const auto v = to_list(key, t);
  if (v.size() != 4) fail(key, "expected up, down, x, y or 're_up,im_up,re_down,im_down'");
  if (v[0] == 0 && v[1] == 0 && v[2] == 0 && v[3] == 0) fail(key, "spinor must be nonzero");
  return {cplx{v[0], v[1]}, cplx{v[2], v[3]}};
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::map<std::string, std::string> base_defaults() {
  return {
      {"alpha", "0.0072973525693"}, {"epsilon", "0.01"},     {"Z", "0"},
      {"nucleus", "0,0,0"},         {"n", "32"},             {"box_length", "16"},
      {"dt", "0"},                  {"t_end", "1"},          {"picard_tol", "1e-10"},
      {"picard_max", "50"},         {"output_dir", "out"},   {"sample_every", "1"},
      {"seed", "0"},                {"checkpoint_every", "0"}, {"restart", ""},
      {"initial", "gaussian"},      {"width", "1"},          {"center", "0,0,0"},
      {"momentum", "0,0,0"},        {"spin", "up"},          {"a_init", "zero"},
      {"a_amplitude", "0"},         {"a_max_mode", "2"},     {"lambdas", "0.5,0.75,1,1.5,2"},
      {"epsilons", "0.1,0.01,0.001"}, {"field_energy", "0.1"}, {"samples", "1000"},
      {"sample_radius", "10"},
  };
}

std::map<std::string, std::string> preset(Experiment e) {
  auto d = base_defaults();
  switch (e) {
    case Experiment::simulate:
      break;
    case Experiment::epsilon_sweep:
      d["epsilons"] = "0.01,0.02,0.05,0.1";
      d["t_end"] = "0.05";
      break;
    case Experiment::hydrogen:
      d["Z"] = "1";
      d["n"] = "64";
      d["box_length"] = "40";
      d["initial"] = "hydrogen";
      d["t_end"] = "0";
      break;
    case Experiment::scaling:
      d["Z"] = "1";
      d["n"] = "64";
      d["box_length"] = "24";
      d["width"] = "1.2";
      break;
    case Experiment::zeromode:
      d["Z"] = "1";
      d["lambdas"] = "0.5,1,2";
      break;
  }
  return d;
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::simulate: return "simulate";
    case Experiment::zeromode: return "zeromode";
    case Experiment::hydrogen: return "hydrogen";
    case Experiment::scaling: return "scaling";
    case Experiment::epsilon_sweep: return "epsilon-sweep";
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  if (name == "simulate") return Experiment::simulate;
  if (name == "zeromode") return Experiment::zeromode;
  if (name == "hydrogen") return Experiment::hydrogen;
  if (name == "scaling") return Experiment::scaling;
  if (name == "epsilon-sweep" || name == "epsilon_sweep") return Experiment::epsilon_sweep;
  fail("experiment", "unknown experiment '" + name + "'");
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"alpha", "fine-structure constant (> 0)"},
      {"epsilon", "regularization parameter (>= 0; stepping needs > 0)"},
      {"Z", "nuclear charge (>= 0)"},
      {"nucleus", "nucleus position x,y,z inside the box"},
      {"n", "grid points per axis (power of two)"},
      {"box_length", "box side length L"},
      {"dt", "time step; 0 selects the default stability bound"},
      {"t_end", "final time"},
      {"picard_tol", "Picard fixed-point tolerance"},
      {"picard_max", "maximum Picard iterations per step"},
      {"output_dir", "directory for run artifacts"},
      {"sample_every", "steps between diagnostic samples (>= 1)"},
      {"seed", "seed for random initial fields"},
      {"checkpoint_every", "steps between checkpoints (0 = never)"},
      {"restart", "checkpoint file to resume from"},
      {"initial", "initial wavefunction: gaussian or hydrogen"},
      {"width", "Gaussian packet width"},
      {"center", "Gaussian packet center x,y,z"},
      {"momentum", "Gaussian packet momentum px,py,pz"},
      {"spin", "initial spinor: up, down, x, y or re,im,re,im"},
      {"a_init", "initial vector potential: zero or random"},
      {"a_amplitude", "L2 norm of the random initial vector potential"},
      {"a_max_mode", "largest mode index of the random initial vector potential"},
      {"lambdas", "comma-separated scale factors"},
      {"epsilons", "comma-separated epsilon values for the sweep"},
      {"field_energy", "field energy of the magnetic part of the scaling pair"},
      {"samples", "number of zero-mode residual sample points"},
      {"sample_radius", "radius of the zero-mode sample ball"},
  };
  return keys;
}

std::string nearest_key(const std::string& key) {
  std::string best;
  std::size_t best_d = static_cast<std::size_t>(-1);
  for (const auto& k : config_keys()) {
    const std::size_t d = edit_distance(key, k.name);
    if (d < best_d) {
      best_d = d;
      best = k.name;
    }
  }
  return best;
}

namespace {

void check_known(const std::string& key) {
  for (const auto& k : config_keys())
    if (k.name == key) return;
  fail(key, "unknown key; did you mean '" + nearest_key(key) + "'?");
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorClass::io, "config: cannot read " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorClass::config,
                  "config: line " + std::to_string(lineno) + " of " + path.string() + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    check_known(key);
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig parse_config(Experiment experiment, const std::map<std::string, std::string>& file_values,
                       const std::map<std::string, std::string>& flag_values) {
  RunConfig cfg;
  cfg.experiment = experiment;
  cfg.file_values = file_values;
  cfg.flag_values = flag_values;
  cfg.values = preset(experiment);
  for (const auto& [k, v] : cfg.values) cfg.sources[k] = "default";
  for (const auto& [k, v] : file_values) {
    check_known(k);
    cfg.values[k] = v;
    cfg.sources[k] = "file";
  }
  for (const auto& [k, v] : flag_values) {
    check_known(k);
    cfg.values[k] = v;
    cfg.sources[k] = "flag";
  }
  const auto& v = cfg.values;
  auto get = [&](const char* k) -> const std::string& { return v.at(k); };

  SimParams& p = cfg.params;
  p.alpha = to_double("alpha", get("alpha"));
  p.epsilon = to_double("epsilon", get("epsilon"));
  p.Z = to_double("Z", get("Z"));
  p.nucleus = to_vec3("nucleus", get("nucleus"));
  const long long n = to_integer("n", get("n"));
  if (n < 4 || n > 1024) fail("n", "must lie in [4, 1024]");
  p.n = static_cast<int>(n);
  p.box_length = to_double("box_length", get("box_length"));
  p.dt = to_double("dt", get("dt"));
  if (p.dt < 0.0) fail("dt", "must be >= 0 (0 selects the default)");
  p.t_end = to_double("t_end", get("t_end"));
  p.picard_tol = to_double("picard_tol", get("picard_tol"));
  const long long pm = to_integer("picard_max", get("picard_max"));
  if (pm < 1 || pm > 100000) fail("picard_max", "must lie in [1, 100000]");
  p.picard_max = static_cast<int>(pm);
  validate(p);

  cfg.output_dir = get("output_dir");
  if (cfg.output_dir.empty()) fail("output_dir", "must not be empty");
  const long long se = to_integer("sample_every", get("sample_every"));
  if (se < 1 || se > 1000000000) fail("sample_every", "must be >= 1");
  cfg.sample_every = static_cast<int>(se);
  const long long seed = to_integer("seed", get("seed"));
  if (seed < 0) fail("seed", "must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  const long long ce = to_integer("checkpoint_every", get("checkpoint_every"));
  if (ce < 0 || ce > 1000000000) fail("checkpoint_every", "must be >= 0");
  cfg.checkpoint_every = static_cast<int>(ce);
  cfg.restart = get("restart");

  cfg.initial = get("initial");
  if (cfg.initial != "gaussian" && cfg.initial != "hydrogen") fail("initial", "must be gaussian or hydrogen");
  cfg.width = to_double("width", get("width"));
  if (!(cfg.width > 0.0)) fail("width", "must be positive");
  cfg.center = to_vec3("center", get("center"));
  cfg.momentum = to_vec3("momentum", get("momentum"));
  cfg.spin = to_spin("spin", get("spin"));
  cfg.a_init = get("a_init");
  if (cfg.a_init != "zero" && cfg.a_init != "random") fail("a_init", "must be zero or random");
  cfg.a_amplitude = to_double("a_amplitude", get("a_amplitude"));
  if (!(cfg.a_amplitude >= 0.0)) fail("a_amplitude", "must be >= 0");
  const long long amm = to_integer("a_max_mode", get("a_max_mode"));
  if (amm < 1 || amm > (p.n - 1) / 3) fail("a_max_mode", "must lie in [1, (n-1)/3]");
  cfg.a_max_mode = static_cast<int>(amm);

  cfg.lambdas = to_list("lambdas", get("lambdas"));
  if (cfg.lambdas.empty()) fail("lambdas", "must list at least one value");
  for (double l : cfg.lambdas)
    if (!(l > 0.0)) fail("lambdas", "values must be positive");
  cfg.epsilons = to_list("epsilons", get("epsilons"));
  if (cfg.epsilons.empty()) fail("epsilons", "must list at least one value");
  for (double e : cfg.epsilons)
    if (!(e > 0.0)) fail("epsilons", "values must be positive");
  cfg.field_energy = to_double("field_energy", get("field_energy"));
  if (!(cfg.field_energy >= 0.0)) fail("field_energy", "must be >= 0");
  const long long ns = to_integer("samples", get("samples"));
  if (ns < 1 || ns > 100000000) fail("samples", "must be >= 1");
  cfg.samples = static_cast<int>(ns);
  cfg.sample_radius = to_double("sample_radius", get("sample_radius"));
  if (!(cfg.sample_radius > 0.0)) fail("sample_radius", "must be positive");

  if ((experiment == Experiment::simulate || experiment == Experiment::epsilon_sweep) &&
      cfg.initial == "hydrogen" && !(p.Z > 0.0))
    fail("Z", "hydrogen initial data needs Z > 0");
  return cfg;
}

}  // namespace mpsim
