#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "mpsim/grid.hpp"
#include "mpsim/spectral.hpp"

namespace mpsim {

/// Physical and numerical parameters of a run.  dt <= 0 selects the default
/// step from default_dt().
struct SimParams {
  double alpha = 1.0 / 137.035999;
  double epsilon = 1e-2;
  double Z = 0.0;
  Vec3 nucleus{0.0, 0.0, 0.0};
  int n = 32;
  double box_length = 16.0;
  double dt = 0.0;
  double t_end = 1.0;
  double picard_tol = 1e-10;
  int picard_max = 50;

  Grid grid() const { return Grid(n, box_length); }
};

/// Throws a config error naming the first offending field.
void validate(const SimParams& params);

/// min(alpha h / pi, 0.5 h^2 / (1 + epsilon)).
double default_dt(const SimParams& params);

struct SimState {
  SpinorField psi;
  VectorField a;
  VectorField a_dot;
  double time = 0.0;
};

/// Periodic Coulomb potential of one nucleus: -Z times the mean-zero Green's
/// function of the torus, built from the multiplier 4 pi / (L^3 |k|^2).
///
/// Near the nucleus the torus potential behaves like
///   -Z/r + mean_shift - background * r^2 + O(r^4),
/// where mean_shift = -Z xi / L with xi the cubic-lattice Madelung-type
/// constant, and background = 2 pi Z / (3 L^3) comes from the neutralizing
/// uniform charge.  The r^4 term is a cubic harmonic with zero spherical mean.
struct CoulombPotential {
  RealField values;
  double Z = 0.0;
  Vec3 nucleus{0.0, 0.0, 0.0};
  double mean_shift = 0.0;
  double background = 0.0;

  /// Torus expectation <psi, V psi>.
  double expectation(const Grid& grid, const SpinorField& psi) const;
  /// Expectation with the torus corrections removed, i.e. the estimate of
  /// <psi, -Z/|x-R| psi> on R^3.
  double continuum_expectation(const Grid& grid, const SpinorField& psi) const;
  /// continuum_expectation - expectation.
  double shift_correction(const Grid& grid, const SpinorField& psi) const;
};

/// The constant xi in G(r) = 1/r + xi/L + ... for the unit-mean-zero periodic
/// Green's function of the cube, evaluated by Ewald summation (about -2.8373).
double cubic_green_constant();

CoulombPotential make_coulomb(const Grid& grid, double Z, const Vec3& nucleus);

/// Minimum-image displacement x - c on the torus, per axis.
Vec3 minimum_image(const Grid& grid, const Vec3& x, const Vec3& c);

/// Z^{3/2} exp(-Z r/2) / (2 sqrt(2 pi)) times spin up, renormalized on the grid.
/// The discrete norm before renormalization is returned through raw_norm.
SpinorField make_hydrogen_ground_state(const Grid& grid, double Z, const Vec3& nucleus = {0, 0, 0},
                                       double* raw_norm = nullptr);

/// Mass of the continuum hydrogen density outside the inscribed ball of the box.
double hydrogen_tail_mass(const Grid& grid, double Z);

/// (pi w^2)^{-3/4} exp(-|d|^2/(2 w^2) + i p.d) chi, renormalized on the grid,
/// with d the minimum-image displacement from center.  Requires w >= 2h.
SpinorField make_gaussian_packet(const Grid& grid, const Vec3& center, double width, const Vec3& momentum,
                                 const std::array<cplx, 2>& spin);

/// Divergence-free random field built from modes with 1 <= max|m_i| <= max_mode,
/// scaled to the requested L^2 norm.  Deterministic in seed.
VectorField make_random_gauge_field(const Spectral& spectral, std::uint64_t seed, double l2_norm,
                                    int max_mode = 2);

/// Projects psi onto the dealiasing band and renormalizes it; Leray- and
/// band-projects the field pair.  Empty fields become zero.  Every state the
/// stepper starts from passes through here.
SimState prepare_state(const Spectral& spectral, SpinorField psi, VectorField a = {},
                       VectorField a_dot = {}, double time = 0.0);

struct Checkpoint {
  int n = 0;
  double box_length = 0.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  double Z = 0.0;
  SimState state;
};

void write_checkpoint(const std::filesystem::path& path, const SimParams& params, const SimState& state);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace mpsim
