#pragma once

#include <string>
#include <vector>

#include "mpsim/dynamics.hpp"
#include "mpsim/spectral.hpp"
#include "mpsim/state.hpp"

namespace mpsim {

struct EnergyReport {
  double time = 0.0;
  /// T_P[psi, a_tilde] = ||sigma.(p + a_tilde) psi||^2
  double kinetic = 0.0;
  /// Torus Coulomb energy <psi, V psi>.
  double coulomb = 0.0;
  /// Amount to add to `coulomb` for the R^3 estimate (see CoulombPotential).
  double coulomb_shift = 0.0;
  /// (||curl A||^2 + alpha^2 ||dA/dt||^2) / (8 pi alpha^2)
  double field = 0.0;
  /// kinetic + coulomb + field ||psi||^2
  double total = 0.0;
  /// <psi, H psi> + field ||psi||^2, assembled from H psi directly.
  double total_direct = 0.0;
  double norm = 0.0;
  /// -2 eps (||H psi||^2 - <psi, H psi>^2)
  double dissipation_rate = 0.0;
  double grad_norm = 0.0;
  double a_norm = 0.0;
  double div_residual = 0.0;
  /// Set when the sample has a predecessor step; NaN otherwise.
  double continuity_residual = 0.0;
};

EnergyReport energy_report(const Model& model, const SimState& state);

/// ||div J_mid + P (rho_1 - rho_0)/dt||_2 with rho = -alpha |psi|^2, J_mid the
/// endpoint average of J_P[psi, a_tilde] and P the dealiasing projection.
double continuity_residual(const Model& model, const SimState& before, const SimState& after, double dt);

struct RayleighReport {
  double kinetic = 0.0;
  double coulomb = 0.0;
  double coulomb_shift = 0.0;
  /// (kinetic + coulomb)/||psi||^2 on the torus.
  double torus_quotient = 0.0;
  /// torus_quotient with the Coulomb shift removed; compares to -Z^2/4.
  double quotient = 0.0;
  /// -Z^2/4
  double reference = 0.0;
  /// |quotient - reference| / |reference|
  double relative_error = 0.0;
};

/// Rayleigh quotient of psi under -Lap + V (A = 0), -Lap taken with the full
/// spectral symbol.
RayleighReport rayleigh_quotient(const Spectral& spectral, const CoulombPotential& coulomb,
                                 const SpinorField& psi);

// Scaling ------------------------------------------------------------------

/// Fourier-interpolated x -> lambda^{3/2} psi(lambda x) about the origin;
/// points that map outside the box are set to zero.
SpinorField rescale_spinor(const Grid& grid, const SpinorField& psi, double lambda);
/// x -> lambda A(lambda x).
VectorField rescale_vector(const Grid& grid, const VectorField& a, double lambda);

struct ScalingPoint {
  double lambda = 1.0;
  bool skipped = false;
  std::string warning;
  double kinetic = 0.0;
  double coulomb = 0.0;
  double field = 0.0;
  double potential_plus_field = 0.0;
  double norm = 0.0;
};

struct ScalingFit {
  /// Least-squares c2 in T(lambda) = c2 lambda^2 and c1 in (V+F)(lambda) = c1 lambda.
  double kinetic_coeff = 0.0;
  double linear_coeff = 0.0;
  /// Largest relative deviation from the fitted law over accepted points.
  double kinetic_residual = 0.0;
  double linear_residual = 0.0;
  int points_used = 0;
};

/// Energies of the rescaled pair, with V the continuum-corrected Coulomb
/// energy of a nucleus at the origin and F = ||curl A||^2/(8 pi alpha^2).
/// A lambda whose rescaled fields would lose more than resolve_tol of their
/// spectral or spatial weight is skipped with a warning.
std::vector<ScalingPoint> scaling_curve(const Spectral& spectral, const CoulombPotential& coulomb,
                                        const SpinorField& psi, const VectorField& a, double alpha,
                                        const std::vector<double>& lambdas, double resolve_tol = 1e-8);

ScalingFit fit_scaling(const std::vector<ScalingPoint>& points);

// Uniform bounds -------------------------------------------------------------

struct BoundReport {
  double window_fraction = 0.2;
  double factor = 1.05;
  int window_samples = 0;
  double grad_window_max = 0.0;
  double field_window_max = 0.0;
  double grad_max = 0.0;
  double field_max = 0.0;
  /// max_t ||A(t)||_2 / (1 + t)
  double a_ratio_max = 0.0;
  /// Linear envelope C3 (1 + t) with C3 = max(||A(0)||, sqrt(8 pi C2)) and
  /// C2 = factor * field_window_max; ||dA/dt||^2 <= 8 pi F bounds the growth.
  double c3 = 0.0;
  /// Least-squares slope of ||A(t)|| against t, informational.
  double a_slope = 0.0;
  bool grad_ok = false;
  bool field_ok = false;
  bool a_ok = false;
};

BoundReport uniform_bound_monitor(const std::vector<EnergyReport>& series, double window_fraction = 0.2,
                                  double factor = 1.05);

// Series summaries ----------------------------------------------------------

struct SeriesSummary {
  int samples = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double energy_initial = 0.0;
  double energy_final = 0.0;
  /// (E(t_start) - E(t_end)) / (t_end - t_start)
  double decay_rate = 0.0;
  double max_norm_deviation = 0.0;
  double max_div_residual = 0.0;
  double max_continuity_residual = 0.0;
  double max_total_mismatch = 0.0;
  /// Largest E(t_{i+1}) - E(t_i); <= 0 for a non-increasing series.
  double max_energy_increase = 0.0;
  /// True when no increase exceeds 1e-12 max(1, |E|) (roundoff allowance).
  bool energy_monotone = true;
  double max_dissipation_rate = 0.0;
};

SeriesSummary summarize_series(const std::vector<EnergyReport>& series);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
LinearFit linear_regression(const std::vector<double>& x, const std::vector<double>& y);

// Series output --------------------------------------------------------------

/// Collects an EnergyReport (with continuity residual) at every sample.
class SeriesRecorder {
 public:
  explicit SeriesRecorder(const Model& model) : model_(&model) {}
  Observer observer();
  const std::vector<EnergyReport>& series() const noexcept { return series_; }

 private:
  const Model* model_;
  std::vector<EnergyReport> series_;
};

std::string csv_header();
std::string csv_row(const EnergyReport& r);

}  // namespace mpsim
