#include "mpsim/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

#include "mpsim/diagnostics.hpp"
#include "mpsim/error.hpp"
#include "mpsim/fft.hpp"
#include "mpsim/zeromode.hpp"

#ifndef MPSIM_VERSION
#define MPSIM_VERSION "unknown"
#endif

namespace mpsim {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorClass::io, "cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw Error(ErrorClass::io, "write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_series(const std::filesystem::path& path, const std::vector<EnergyReport>& series) {
  std::string out = csv_header() + "\n";
  for (const auto& r : series) out += csv_row(r) + "\n";
  write_text(path, out);
}

// JSON cannot carry NaN; such values are emitted as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const EnergyReport& r) {
  return {{"time", num(r.time)},
          {"kinetic", num(r.kinetic)},
          {"coulomb", num(r.coulomb)},
          {"coulomb_shift", num(r.coulomb_shift)},
          {"field", num(r.field)},
          {"total", num(r.total)},
          {"total_direct", num(r.total_direct)},
          {"norm", num(r.norm)},
          {"dissipation_rate", num(r.dissipation_rate)},
          {"grad_norm", num(r.grad_norm)},
          {"a_norm", num(r.a_norm)},
          {"div_residual", num(r.div_residual)},
          {"continuity_residual", num(r.continuity_residual)}};
}

json to_json(const SeriesSummary& s) {
  return {{"samples", s.samples},
          {"t_start", s.t_start},
          {"t_end", s.t_end},
          {"energy_initial", num(s.energy_initial)},
          {"energy_final", num(s.energy_final)},
          {"decay_rate", num(s.decay_rate)},
          {"max_norm_deviation", num(s.max_norm_deviation)},
          {"max_div_residual", num(s.max_div_residual)},
          {"max_continuity_residual", num(s.max_continuity_residual)},
          {"max_total_mismatch", num(s.max_total_mismatch)},
          {"max_energy_increase", num(s.max_energy_increase)},
          {"energy_monotone", s.energy_monotone},
          {"max_dissipation_rate", num(s.max_dissipation_rate)}};
}

json to_json(const BoundReport& b) {
  return {{"window_fraction", b.window_fraction},
          {"factor", b.factor},
          {"window_samples", b.window_samples},
          {"grad_window_max", num(b.grad_window_max)},
          {"field_window_max", num(b.field_window_max)},
          {"grad_max", num(b.grad_max)},
          {"field_max", num(b.field_max)},
          {"a_ratio_max", num(b.a_ratio_max)},
          {"c3", num(b.c3)},
          {"a_slope", num(b.a_slope)},
          {"grad_ok", b.grad_ok},
          {"field_ok", b.field_ok},
          {"a_ok", b.a_ok}};
}

json params_json(const SimParams& p) {
  return {{"alpha", p.alpha},   {"epsilon", p.epsilon},       {"Z", p.Z},
          {"nucleus", p.nucleus}, {"n", p.n},                 {"box_length", p.box_length},
          {"dt", p.dt},         {"t_end", p.t_end},           {"picard_tol", p.picard_tol},
          {"picard_max", p.picard_max}};
}

struct TimeSeriesRun {
  std::vector<EnergyReport> series;
  RunResult result;
  SimParams resolved;
};

TimeSeriesRun time_series_run(const RunConfig& cfg, const SimParams& params, bool allow_restart,
                              std::ostream* log) {
  const Model model(params);
  SimState initial;
  if (allow_restart && !cfg.restart.empty()) {
    const Checkpoint cp = read_checkpoint(cfg.restart);
    const SimParams& p = model.params();
    if (cp.n != p.n || cp.box_length != p.box_length || cp.alpha != p.alpha || cp.epsilon != p.epsilon ||
        cp.Z != p.Z)
      throw Error(ErrorClass::config, "restart: checkpoint parameters do not match the configuration");
    initial = cp.state;
  } else {
    initial = build_initial_state(model, cfg);
  }
  SeriesRecorder recorder(model);
  std::vector<Observer> step_obs;
  if (cfg.checkpoint_every > 0) {
    step_obs.push_back([&](const Sample& s) {
      if (s.step % cfg.checkpoint_every == 0)
        write_checkpoint(cfg.output_dir / ("checkpoint_" + std::to_string(s.step) + ".bin"), model.params(),
                         *s.state);
    });
  }
  if (log) *log << "running " << to_string(cfg.experiment) << " with dt = " << model.dt() << "\n";
  TimeSeriesRun out;
  out.result = run(model, initial, {recorder.observer()}, cfg.sample_every, step_obs);
  out.series = recorder.series();
  out.resolved = model.params();
  if (cfg.checkpoint_every > 0)
    write_checkpoint(cfg.output_dir / "checkpoint_final.bin", model.params(), out.result.final_state);
  return out;
}

json run_simulate(const RunConfig& cfg, std::ostream* log, json& resolved) {
  const TimeSeriesRun r = time_series_run(cfg, cfg.params, true, log);
  resolved = params_json(r.resolved);
  write_series(cfg.output_dir / "series.csv", r.series);
  json s;
  s["steps_taken"] = r.result.steps_taken;
  s["max_picard_iters"] = r.result.max_picard_iters;
  s["max_step_div"] = r.result.max_div;
  s["series"] = to_json(summarize_series(r.series));
  s["bounds"] = to_json(uniform_bound_monitor(r.series));
  if (!r.series.empty()) {
    s["initial"] = to_json(r.series.front());
    s["final"] = to_json(r.series.back());
  }
  return s;
}

json run_sweep(const RunConfig& cfg, std::ostream* log, json& resolved) {
  json runs = json::array();
  std::vector<double> eps, rate;
  resolved = json::array();
  for (std::size_t k = 0; k < cfg.epsilons.size(); ++k) {
    SimParams p = cfg.params;
    p.epsilon = cfg.epsilons[k];
    const TimeSeriesRun r = time_series_run(cfg, p, false, log);
    resolved.push_back(params_json(r.resolved));
    write_series(cfg.output_dir / ("series_eps_" + std::to_string(k) + ".csv"), r.series);
    if (k == 0) write_series(cfg.output_dir / "series.csv", r.series);
    const SeriesSummary sum = summarize_series(r.series);
    runs.push_back({{"epsilon", p.epsilon}, {"dt", r.resolved.dt}, {"series", to_json(sum)}});
    eps.push_back(p.epsilon);
    rate.push_back(sum.decay_rate);
  }
  json s;
  s["runs"] = runs;
  if (eps.size() >= 2) {
    const LinearFit fit = linear_regression(eps, rate);
    s["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
  }
  return s;
}

json run_hydrogen(const RunConfig& cfg, std::ostream* log, json& resolved) {
  const SimParams& p = cfg.params;
  if (!(p.Z > 0.0)) throw Error(ErrorClass::config, "Z: hydrogen needs Z > 0");
  const Grid grid = p.grid();
  const Spectral spectral(grid);
  const CoulombPotential v = make_coulomb(grid, p.Z, p.nucleus);
  double raw_norm = 0.0;
  const SpinorField psi = make_hydrogen_ground_state(grid, p.Z, p.nucleus, &raw_norm);
  const RayleighReport r = rayleigh_quotient(spectral, v, psi);
  resolved = params_json(p);
  json warnings = json::array();
  const double tail = hydrogen_tail_mass(grid, p.Z);
  if (tail > 1e-8) warnings.push_back("hydrogen tail mass outside the inscribed ball is " + std::to_string(tail));
  if (log) *log << "rayleigh quotient " << r.quotient << " (reference " << r.reference << ")\n";

  EnergyReport e;
  e.kinetic = r.kinetic;
  e.coulomb = r.coulomb;
  e.coulomb_shift = r.coulomb_shift;
  e.total = r.kinetic + r.coulomb;
  e.total_direct = e.total;
  e.norm = l2_norm(grid, psi);
  e.continuity_residual = std::numeric_limits<double>::quiet_NaN();
  write_series(cfg.output_dir / "series.csv", {e});

  return {{"rayleigh_quotient", r.quotient},
          {"torus_quotient", r.torus_quotient},
          {"kinetic", r.kinetic},
          {"coulomb", r.coulomb},
          {"coulomb_shift", r.coulomb_shift},
          {"mean_shift", v.mean_shift},
          {"background", v.background},
          {"reference", r.reference},
          {"relative_error", r.relative_error},
          {"raw_norm", raw_norm},
          {"tail_mass", tail},
          {"warnings", warnings}};
}

json run_scaling(const RunConfig& cfg, std::ostream* log, json& resolved) {
  const SimParams& p = cfg.params;
  const Grid grid = p.grid();
  const Spectral spectral(grid);
  const CoulombPotential v = make_coulomb(grid, p.Z, p.nucleus);
  const SpinorField psi0 = make_gaussian_packet(grid, {0, 0, 0}, cfg.width, {0, 0, 0}, cfg.spin);
  const SimState st = prepare_state(spectral, psi0, make_scaling_field(spectral, cfg.width, p.alpha, cfg.field_energy));
  resolved = params_json(p);
  const auto points = scaling_curve(spectral, v, st.psi, st.a, p.alpha, cfg.lambdas);
  json pts = json::array(), warnings = json::array();
  for (const auto& q : points) {
    pts.push_back({{"lambda", q.lambda},
                   {"skipped", q.skipped},
                   {"kinetic", q.kinetic},
                   {"coulomb", q.coulomb},
                   {"field", q.field},
                   {"potential_plus_field", q.potential_plus_field},
                   {"norm", q.norm}});
    if (q.skipped) {
      warnings.push_back(q.warning);
      if (log) *log << "warning: " << q.warning << "\n";
    }
  }
  const ScalingFit fit = fit_scaling(points);
  write_series(cfg.output_dir / "series.csv", {});
  return {{"points", pts},
          {"warnings", warnings},
          {"fit",
           {{"kinetic_coeff", fit.kinetic_coeff},
            {"linear_coeff", fit.linear_coeff},
            {"kinetic_residual", fit.kinetic_residual},
            {"linear_residual", fit.linear_residual},
            {"points_used", fit.points_used}}}};
}

json run_zeromode(const RunConfig& cfg, std::ostream* log, json& resolved) {
  const SimParams& p = cfg.params;
  const ZeroModeSpec spec = ZeroModeSpec::from_spinor(cfg.spin);
  const auto samples = halton_ball_samples(cfg.samples, cfg.sample_radius);
  const double residual = dirac_residual(spec, samples);
  const ZcResult zc = zc_ratio(spec, p.alpha);
  json slopes = json::array();
  for (double l : cfg.lambdas) {
    const ZeroModeEnergy e = zero_mode_energy(spec, p.alpha, p.Z, l);
    slopes.push_back({{"lambda", l},
                      {"energy", e.energy},
                      {"slope", e.energy / l},
                      {"kinetic", e.kinetic},
                      {"inverse_r", e.inverse_r},
                      {"field", e.field}});
  }
  resolved = params_json(p);
  if (log) *log << "max dirac residual " << residual << ", zc ratio " << zc.ratio << "\n";
  const json cert = {{"max_dirac_residual", residual},
                     {"zc_ratio", zc.ratio},
                     {"norm", std::sqrt(zc.norm_squared)},
                     {"scaling_slopes", slopes},
                     {"zc_upper_bound_formula", zc_upper_bound(p.alpha)},
                     {"zc_lower_bound", zc_lower_bound(p.alpha)},
                     {"inverse_r", zc.inverse_r},
                     {"field_energy", zc.field_energy},
                     {"samples", static_cast<int>(samples.size())},
                     {"sample_radius", cfg.sample_radius},
                     {"w", spec.w}};
  write_json(cfg.output_dir / "certificate.json", cert);
  write_series(cfg.output_dir / "series.csv", {});
  return cert;
}

}  // namespace

SimState build_initial_state(const Model& model, const RunConfig& cfg) {
  const Grid& grid = model.grid();
  const SimParams& p = model.params();
  SpinorField psi = cfg.initial == "hydrogen"
                        ? make_hydrogen_ground_state(grid, p.Z, p.nucleus)
                        : make_gaussian_packet(grid, cfg.center, cfg.width, cfg.momentum, cfg.spin);
  VectorField a;
  if (cfg.a_init == "random" && cfg.a_amplitude > 0.0)
    a = make_random_gauge_field(model.spectral(), cfg.seed, cfg.a_amplitude, cfg.a_max_mode);
  return model.prepare(std::move(psi), std::move(a));
}

VectorField make_scaling_field(const Spectral& spectral, double width, double alpha, double field_energy) {
  const Grid& grid = spectral.grid();
  const int n = grid.n();
  VectorField a(grid.size());
  const double w2 = width * width;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const double x = grid.coord(i), y = grid.coord(j), z = grid.coord(l);
        const double g = std::exp(-0.5 * (x * x + y * y + z * z) / w2);
        const std::size_t idx = grid.index(i, j, l);
        a[0][idx] = -y / w2 * g;
        a[1][idx] = x / w2 * g;
      }
  const double f = l2_norm_squared(grid, spectral.curl(a)) / (8.0 * std::numbers::pi * alpha * alpha);
  const double scale = f > 0.0 ? std::sqrt(field_energy / f) : 0.0;
  for (int c = 0; c < 3; ++c)
    for (double& v : a[c]) v *= scale;
  return a;
}

json run_experiment(const RunConfig& cfg, std::ostream* log) {
  const auto t0 = Clock::now();
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw Error(ErrorClass::io, "cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());

  const int threads = configure_fft_threads();
  json resolved;
  json summary;
  switch (cfg.experiment) {
    case Experiment::simulate: summary = run_simulate(cfg, log, resolved); break;
    case Experiment::epsilon_sweep: summary = run_sweep(cfg, log, resolved); break;
    case Experiment::hydrogen: summary = run_hydrogen(cfg, log, resolved); break;
    case Experiment::scaling: summary = run_scaling(cfg, log, resolved); break;
    case Experiment::zeromode: summary = run_zeromode(cfg, log, resolved); break;
  }
  summary["experiment"] = to_string(cfg.experiment);
  summary["schema_version"] = 1;
  write_json(cfg.output_dir / "summary.json", summary);

  json defaults = json::array();
  for (const auto& [k, src] : cfg.sources)
    if (src == "default") defaults.push_back(k);
  const json manifest = {{"version", MPSIM_VERSION},
                         {"schema_version", 1},
                         {"experiment", to_string(cfg.experiment)},
                         {"config", cfg.values},
                         {"sources", cfg.sources},
                         {"file_values", cfg.file_values},
                         {"flag_values", cfg.flag_values},
                         {"defaults_used", defaults},
                         {"resolved_params", resolved},
                         {"threads", threads},
                         {"timings", {{"total_seconds", seconds_since(t0)}}}};
  write_json(cfg.output_dir / "manifest.json", manifest);
  return summary;
}

int exit_code(ErrorClass c) {
  switch (c) {
    case ErrorClass::config: return 2;
    case ErrorClass::domain: return 3;
    case ErrorClass::gauge: return 4;
    case ErrorClass::blowup: return 5;
    case ErrorClass::nonconvergence: return 6;
    case ErrorClass::io: return 7;
  }
  return 1;
}

json error_json(ErrorClass c, const std::string& message) {
  return {{"error_class", std::string(to_string(c))}, {"message", message}};
}

}  // namespace mpsim
