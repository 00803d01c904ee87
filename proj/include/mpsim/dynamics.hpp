#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "mpsim/spectral.hpp"
#include "mpsim/state.hpp"

namespace mpsim {

struct StepReport {
  int picard_iters = 0;
  double picard_residual = 0.0;
  /// Fraction of the product spectrum removed by the final dealiasing pass.
  double dealias_energy_discarded = 0.0;
  /// Largest spectral divergence of A and dA/dt after the step.
  double div_max = 0.0;
};

/// Discretized epsilon-modified Maxwell-Pauli system on one grid: owns the
/// spectral toolkit, the Coulomb potential and the step multipliers.
class Model {
 public:
  /// Validates params; dt <= 0 is replaced by default_dt.  Steps larger than
  /// the default bound are rejected.
  explicit Model(const SimParams& params);

  const SimParams& params() const noexcept { return params_; }
  const Grid& grid() const noexcept { return spectral_.grid(); }
  const Spectral& spectral() const noexcept { return spectral_; }
  const CoulombPotential& coulomb() const noexcept { return coulomb_; }
  double dt() const noexcept { return params_.dt; }

  /// Lambda_eps^{-1} a.
  VectorField regularize(const VectorField& a) const;
  /// H(a_tilde) psi = [sigma.(p+a_tilde)]^2 psi + V psi.  When interaction is
  /// non-null it receives H psi + Lap psi.
  SpinorField hamiltonian(const SpinorField& psi, const VectorField& a_tilde,
                          SpinorField* interaction = nullptr) const;
  /// Lambda_eps^{-1} P J_P[psi, a_tilde] in real space.
  VectorField wave_source(const SpinorField& psi, const VectorField& a_tilde) const;
  /// f[psi, a_tilde] = -(i+eps)(L(a_tilde) + V) psi + eps <psi, H psi> psi, with
  /// a_tilde = Lambda_eps^{-1} a computed here.
  SpinorField rhs_inhomogeneity(const SpinorField& psi, const VectorField& a) const;

  SimState prepare(SpinorField psi, VectorField a = {}, VectorField a_dot = {}, double time = 0.0) const {
    return prepare_state(spectral_, std::move(psi), std::move(a), std::move(a_dot), time);
  }

  /// One step of the exponential trapezoidal Duhamel scheme, with the
  /// implicit endpoint resolved by Picard iteration.  Throws nonconvergence
  /// or blowup errors.
  std::pair<SimState, StepReport> step(const SimState& state) const;

 private:
  SpinorField rhs_from(const SpinorField& psi, const VectorField& a_tilde, double* discarded) const;
  double h1_norm(const SpinorField& psi) const;
  double h1_norm(const VectorField& v) const;

  SimParams params_;
  Spectral spectral_;
  CoulombPotential coulomb_;
  RealField lam_eps_inv_;
  ComplexField heat_dt_;
  RealField cos_dt_;
  RealField sinc_dt_;
};

/// What observers see at a sample: the state, the one before it (absent at
/// the initial sample) and the report of the step that produced it.
struct Sample {
  long step = 0;
  const SimState* state = nullptr;
  const SimState* previous = nullptr;
  const StepReport* report = nullptr;
};

using Observer = std::function<void(const Sample&)>;

struct RunResult {
  SimState final_state;
  long steps_taken = 0;
  int max_picard_iters = 0;
  double max_div = 0.0;
};

/// Advances from initial.time to params.t_end in steps of dt.  Observers are
/// called synchronously at step 0, every sample_every steps and at the final
/// step.  Nothing is sampled when there is no step to take.  step_observers
/// see every accepted step (Sample::previous is always set for them).
RunResult run(const Model& model, const SimState& initial, const std::vector<Observer>& observers,
              int sample_every = 1, const std::vector<Observer>& step_observers = {});

}  // namespace mpsim
