#include "mpsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mpsim/error.hpp"
#include "mpsim/pauli.hpp"

namespace mpsim {

namespace {

constexpr cplx kI{0.0, 1.0};

SimParams resolve(SimParams p) {
  validate(p);
  const double bound = default_dt(p);
  if (p.dt <= 0.0) {
    p.dt = bound;
  } else if (p.dt > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt: " << p.dt << " exceeds the stability bound " << bound << " for this grid";
    throw Error(ErrorClass::config, msg.str());
  }
  if (!(p.epsilon > 0.0)) throw Error(ErrorClass::config, "epsilon: time stepping requires epsilon > 0");
  return p;
}

bool all_finite(const SpinorField& psi) {
  for (int s = 0; s < 2; ++s)
    for (const cplx& v : psi[s])
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

}  // namespace

Model::Model(const SimParams& params)
    : params_(resolve(params)),
      spectral_(params_.grid()),
      coulomb_(make_coulomb(spectral_.grid(), params_.Z, params_.nucleus)) {
  const MultiplierBank& bank = spectral_.bank();
  lam_eps_inv_ = bank.lam_eps_inv(params_.epsilon);
  heat_dt_ = bank.heat(params_.dt, params_.epsilon);
  cos_dt_ = bank.wave_cos(params_.dt / params_.alpha);
  sinc_dt_ = bank.wave_sinc(params_.dt / params_.alpha);
}

VectorField Model::regularize(const VectorField& a) const {
  return spectral_.apply_multiplier(a, lam_eps_inv_);
}

SpinorField Model::hamiltonian(const SpinorField& psi, const VectorField& a_tilde,
                               SpinorField* interaction) const {
  const RealField* v = params_.Z != 0.0 ? &coulomb_.values : nullptr;
  return apply_hamiltonian(spectral_, psi, a_tilde, v, interaction);
}

VectorField Model::wave_source(const SpinorField& psi, const VectorField& a_tilde) const {
  const VectorField j = pauli_current_decomposed(spectral_, psi, a_tilde, params_.alpha);
  std::array<ComplexField, 3> jh;
  for (int c = 0; c < 3; ++c) jh[c] = spectral_.fft_forward(j[c]);
  spectral_.leray_project_spectral(jh);
  VectorField g;
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < jh[c].size(); ++i) jh[c][i] *= lam_eps_inv_[i];
    g[c] = spectral_.fft_inverse_real(jh[c]);
  }
  return g;
}

SpinorField Model::rhs_from(const SpinorField& psi, const VectorField& a_tilde, double* discarded) const {
  const RealField* v = params_.Z != 0.0 ? &coulomb_.values : nullptr;
  SpinorField inter;
  const SpinorField hpsi = apply_hamiltonian(spectral_, psi, a_tilde, v, &inter, discarded);
  const double expect_h = inner(grid(), psi, hpsi).real();
  if (!std::isfinite(expect_h)) throw Error(ErrorClass::blowup, "non-finite <psi, H psi> in the step inhomogeneity");
  const double eps = params_.epsilon;
  const cplx c = -(kI + eps);
  SpinorField f(psi.size());
  for (int s = 0; s < 2; ++s)
    for (std::size_t i = 0; i < psi.size(); ++i) f[s][i] = c * inter[s][i] + eps * expect_h * psi[s][i];
  return f;
}

SpinorField Model::rhs_inhomogeneity(const SpinorField& psi, const VectorField& a) const {
  return rhs_from(psi, regularize(a), nullptr);
}

double Model::h1_norm(const SpinorField& psi) const {
  const RealField& k2 = spectral_.bank().k2();
  double s = 0.0;
  for (int c = 0; c < 2; ++c) {
    const ComplexField h = spectral_.fft_forward(psi[c]);
    for (std::size_t i = 0; i < h.size(); ++i) s += (1.0 + k2[i]) * std::norm(h[i]);
  }
  return std::sqrt(s * grid().cell_volume() / static_cast<double>(grid().size()));
}

double Model::h1_norm(const VectorField& v) const {
  const RealField& k2 = spectral_.bank().k2();
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const ComplexField h = spectral_.fft_forward(v[c]);
    for (std::size_t i = 0; i < h.size(); ++i) s += (1.0 + k2[i]) * std::norm(h[i]);
  }
  return std::sqrt(s * grid().cell_volume() / static_cast<double>(grid().size()));
}

std::pair<SimState, StepReport> Model::step(const SimState& state) const {
  const double dt = params_.dt;
  const double alpha = params_.alpha;
  const std::size_t size = grid().size();
  const RealField& k2 = spectral_.bank().k2();

  const VectorField at0 = regularize(state.a);
  const SpinorField f0 = rhs_from(state.psi, at0, nullptr);
  const VectorField g0 = wave_source(state.psi, at0);

  // Field endpoint: the trapezoid weight of the source at tau = dt vanishes for A.
  VectorField a1, adot_base;
  for (int c = 0; c < 3; ++c) {
    const ComplexField ah = spectral_.fft_forward(state.a[c]);
    const ComplexField dh = spectral_.fft_forward(state.a_dot[c]);
    const ComplexField gh = spectral_.fft_forward(g0[c]);
    ComplexField na(size), nd(size);
    const double w = 2.0 * std::numbers::pi * dt;
    for (std::size_t i = 0; i < size; ++i) {
      na[i] = cos_dt_[i] * ah[i] + alpha * sinc_dt_[i] * dh[i] + w * sinc_dt_[i] * gh[i];
      nd[i] = -(k2[i] / alpha) * sinc_dt_[i] * ah[i] + cos_dt_[i] * dh[i] + (w / alpha) * cos_dt_[i] * gh[i];
    }
    a1[c] = spectral_.fft_inverse_real(na);
    adot_base[c] = spectral_.fft_inverse_real(nd);
  }
  const VectorField at1 = regularize(a1);

  // psi endpoint: base = heat(dt)(psi0 + dt/2 f0); predictor uses the full f0.
  SpinorField base(size), psi1(size);
  for (int s = 0; s < 2; ++s) {
    ComplexField b(size), p(size);
    for (std::size_t i = 0; i < size; ++i) {
      b[i] = state.psi[s][i] + 0.5 * dt * f0[s][i];
      p[i] = state.psi[s][i] + dt * f0[s][i];
    }
    base[s] = spectral_.apply_multiplier(b, heat_dt_);
    psi1[s] = spectral_.apply_multiplier(p, heat_dt_);
  }

  StepReport report;
  VectorField adot1;
  bool have_adot = false;
  const double wd = 2.0 * std::numbers::pi * dt / alpha;
  for (int it = 1; it <= params_.picard_max; ++it) {
    double discarded = 0.0;
    const SpinorField f1 = rhs_from(psi1, at1, &discarded);
    const VectorField g1 = wave_source(psi1, at1);
    SpinorField next(size);
    for (int s = 0; s < 2; ++s)
      for (std::size_t i = 0; i < size; ++i) next[s][i] = base[s][i] + 0.5 * dt * f1[s][i];
    VectorField adot_next(size);
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < size; ++i) adot_next[c][i] = adot_base[c][i] + wd * g1[c][i];

    SpinorField dpsi(size);
    for (int s = 0; s < 2; ++s)
      for (std::size_t i = 0; i < size; ++i) dpsi[s][i] = next[s][i] - psi1[s][i];
    double residual = h1_norm(dpsi);
    if (have_adot) {
      VectorField dd(size);
      for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < size; ++i) dd[c][i] = adot_next[c][i] - adot1[c][i];
      residual = std::max(residual, l2_norm(grid(), dd));
    } else {
      residual = std::max(residual, std::numeric_limits<double>::infinity());
    }
    psi1 = std::move(next);
    adot1 = std::move(adot_next);
    const bool first = !have_adot;
    have_adot = true;
    report.picard_iters = it;
    report.dealias_energy_discarded = discarded;
    if (!all_finite(psi1)) throw Error(ErrorClass::blowup, "non-finite wavefunction during Picard iteration");
    if (!first) {
      report.picard_residual = residual;
      if (std::isnan(residual)) throw Error(ErrorClass::blowup, "Picard residual is NaN");
      if (residual <= params_.picard_tol) break;
    }
    if (it == params_.picard_max) {
      std::ostringstream msg;
      msg << "Picard iteration did not reach tolerance " << params_.picard_tol << " within "
          << params_.picard_max << " iterations (residual " << report.picard_residual
          << "); dt = " << dt << " may be too large";
      throw Error(ErrorClass::nonconvergence, msg.str());
    }
  }

  SimState out;
  out.psi = std::move(psi1);
  out.a = std::move(a1);
  out.a_dot = std::move(adot1);
  out.time = state.time + dt;
  report.div_max = std::max(spectral_.divergence_max(out.a), spectral_.divergence_max(out.a_dot));
  return {std::move(out), report};
}

RunResult run(const Model& model, const SimState& initial, const std::vector<Observer>& observers,
              int sample_every, const std::vector<Observer>& step_observers) {
  if (sample_every < 1) throw Error(ErrorClass::config, "sample_every: must be >= 1");
  const double dt = model.dt();
  const long first = std::llround(initial.time / dt);
  const long last = std::llround(model.params().t_end / dt);
  RunResult result;
  result.final_state = initial;
  if (last <= first) return result;

  auto notify = [&](long step, const SimState& s, const SimState* prev, const StepReport* rep) {
    Sample sample{step, &s, prev, rep};
    for (const auto& obs : observers) obs(sample);
  };
  notify(first, result.final_state, nullptr, nullptr);
  for (long k = first + 1; k <= last; ++k) {
    auto [next, report] = model.step(result.final_state);
    next.time = static_cast<double>(k) * dt;
    result.max_picard_iters = std::max(result.max_picard_iters, report.picard_iters);
    result.max_div = std::max(result.max_div, report.div_max);
    ++result.steps_taken;
    if ((k - first) % sample_every == 0 || k == last) notify(k, next, &result.final_state, &report);
    for (const auto& obs : step_observers) obs(Sample{k, &next, &result.final_state, &report});
    result.final_state = std::move(next);
  }
  return result;
}

}  // namespace mpsim
