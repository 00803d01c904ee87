#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mpsim/grid.hpp"
#include "mpsim/spectral.hpp"

namespace mpsim {

using Spinor = std::array<cplx, 2>;

struct ZeroModeSpec {
  Spinor phi0{cplx{1.0, 0.0}, cplx{0.0, 0.0}};
  Vec3 w{0.0, 0.0, 1.0};

  /// Normalizes phi0 and sets w = <phi0, sigma phi0>.
  static ZeroModeSpec from_spinor(const Spinor& phi0);
};

struct LossYauValue {
  Spinor psi{};
  Vec3 a{};
  /// grad_psi[j] = d_j psi
  std::array<Spinor, 3> grad_psi{};
};

/// Closed-form Loss-Yau pair at x, rescaled as psi_l(x) = l^{3/2} psi(l x),
/// A_l(x) = l A(l x); the gradient is the analytic derivative of psi_l.
///   psi(x) = (1 + i sigma.x) phi0 / (pi (1+|x|^2)^{3/2})
///   A(x)   = 3 [(|x|^2 - 1) w - 2 (w.x) x - 2 w x x] / (1+|x|^2)^2
LossYauValue loss_yau_eval(const ZeroModeSpec& spec, const Vec3& x, double lambda = 1.0);

/// Closed-form curl A at x (unscaled).
Vec3 loss_yau_curl(const ZeroModeSpec& spec, const Vec3& x);

/// |sigma.(-i grad + A) psi| at x.
double dirac_residual_at(const ZeroModeSpec& spec, const Vec3& x, double lambda = 1.0);
/// Maximum of dirac_residual_at over samples.
double dirac_residual(const ZeroModeSpec& spec, const std::vector<Vec3>& samples, double lambda = 1.0);

/// Halton points (bases 2, 3, 5) in the ball |x| <= radius, by rejection from
/// the enclosing cube.  Deterministic.
std::vector<Vec3> halton_ball_samples(int count, double radius);

struct GaugeFixValue {
  double zeta = 0.0;
  Vec3 grad_zeta{};
  /// A - grad zeta
  Vec3 a_coulomb{};
  /// div A - Lap zeta from the closed forms.
  double div_a_coulomb = 0.0;
};

/// zeta(x) = 3 (w.x) (|x| - arctan|x|)/|x|^3, series near the origin.
GaugeFixValue gauge_fix(const ZeroModeSpec& spec, const Vec3& x);

/// g(r) = (r - arctan r)/r^3 and g'(r)/r, both regular at r = 0.
double gauge_profile(double r);
double gauge_profile_dr_over_r(double r);

struct ZcResult {
  double ratio = 0.0;
  double field_energy = 0.0;
  double inverse_r = 0.0;
  double norm_squared = 0.0;
  double b_norm_squared = 0.0;
  int refinements = 0;
};

/// F[A, 0] / <psi, |x|^{-1} psi> for the Loss-Yau mode by radial quadrature,
/// with |B|^2 taken from B = -12 pi^2 <psi, sigma psi> averaged over a
/// 14-direction angular rule.  Refines until successive tolerances agree to
/// agree_tol relative; throws nonconvergence otherwise.
ZcResult zc_ratio(const ZeroModeSpec& spec, double alpha, double agree_tol = 1e-8);

struct ZeroModeEnergy {
  double lambda = 1.0;
  double kinetic = 0.0;
  double inverse_r = 0.0;
  double field = 0.0;
  /// kinetic - Z inverse_r + field
  double energy = 0.0;
};

/// Pauli energy of the rescaled pair for charge Z, each term by quadrature of
/// the rescaled closed forms.
ZeroModeEnergy zero_mode_energy(const ZeroModeSpec& spec, double alpha, double Z, double lambda);

/// 3 / (pi alpha^2).
double zc_lower_bound(double alpha);
/// (3 pi)^2 / (8 alpha^2).
double zc_upper_bound(double alpha);

struct ZeroModePotential {
  VectorField a;
  std::vector<std::uint8_t> masked;
  std::size_t masked_count = 0;
};

/// A = -[curl <psi, sigma psi> + 2 Im <psi, grad psi>] / (2 <psi, psi>) with
/// spectral derivatives.  Points where |psi|^2 < floor are masked and set to 0.
ZeroModePotential zero_mode_A_from_psi(const Spectral& spectral, const SpinorField& psi, double floor = 1e-12);

/// Samples the Loss-Yau pair on a grid (fields centred at the origin).
SpinorField sample_loss_yau_psi(const Grid& grid, const ZeroModeSpec& spec);
VectorField sample_loss_yau_a(const Grid& grid, const ZeroModeSpec& spec);

}  // namespace mpsim
