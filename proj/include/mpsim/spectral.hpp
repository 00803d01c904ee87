#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "mpsim/fft.hpp"
#include "mpsim/grid.hpp"

namespace mpsim {

/// Per-mode Fourier multipliers of the periodic box.  Immutable once built.
///
/// Two wavevectors are kept per mode: the full one (used for |k|^2 in
/// Laplacian-type multipliers) and a derivative one whose Nyquist component
/// is zeroed, so that odd spectral derivatives of real fields stay real.
class MultiplierBank {
 public:
  explicit MultiplierBank(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  const RealField& k2() const noexcept { return k2_; }
  const std::array<RealField, 3>& k() const noexcept { return kd_; }
  const std::vector<std::uint8_t>& dealias_mask() const noexcept { return mask_; }

  /// (1 + |k|^2)^{s/2}
  RealField lam_s(double s) const;
  /// (1 + eps |k|^2)^{-1/2}
  RealField lam_eps_inv(double eps) const;
  /// 1/|k|^2, zero at k = 0.
  RealField inv_lap() const;
  /// exp(-(i + eps) t |k|^2)
  ComplexField heat(double t, double eps) const;
  /// cos(|k| t)
  RealField wave_cos(double t) const;
  /// sin(|k| t)/|k|, equal to t at k = 0.
  RealField wave_sinc(double t) const;

 private:
  Grid grid_;
  RealField k2_;
  std::array<RealField, 3> kd_;
  std::vector<std::uint8_t> mask_;
};

/// Spectral toolkit for one grid: transforms, derivatives, projections and
/// the linear propagators.  Inputs and outputs are real-space fields unless a
/// name says otherwise.  Safe to share across threads once constructed.
class Spectral {
 public:
  explicit Spectral(const Grid& grid);

  const Grid& grid() const noexcept { return bank_.grid(); }
  const MultiplierBank& bank() const noexcept { return bank_; }
  const FftPlan& plan() const noexcept { return plan_; }

  ComplexField fft_forward(const ComplexField& f) const;
  ComplexField fft_forward(const RealField& f) const;
  ComplexField fft_inverse(const ComplexField& fhat) const;
  /// Inverse transform keeping the real part.
  RealField fft_inverse_real(const ComplexField& fhat) const;

  ComplexField apply_multiplier(const ComplexField& f, const RealField& m) const;
  ComplexField apply_multiplier(const ComplexField& f, const ComplexField& m) const;
  /// Real multipliers that are even in k map real fields to real fields.
  RealField apply_multiplier(const RealField& f, const RealField& m) const;
  VectorField apply_multiplier(const VectorField& v, const RealField& m) const;

  std::array<ComplexField, 3> gradient(const ComplexField& f) const;
  VectorField gradient(const RealField& f) const;
  RealField divergence(const VectorField& v) const;
  VectorField curl(const VectorField& v) const;
  /// max_k |k . v_k| on the Fourier-coefficient scale v_k = vhat_k / N.
  double divergence_max(const VectorField& v) const;

  /// Leray-Helmholtz projection 1 + grad (-Lap)^{-1} div; the k = 0 mode
  /// passes through unchanged.
  VectorField leray_project(const VectorField& v) const;
  /// In-place projection of three Fourier-space components.
  void leray_project_spectral(std::array<ComplexField, 3>& vhat) const;

  /// 2/3-rule truncation.
  void dealias_spectral(ComplexField& fhat) const;
  ComplexField dealias(const ComplexField& f) const;
  RealField dealias(const RealField& f) const;
  /// Fraction of sum |f_k|^2 carried by modes outside the dealiasing cube.
  double band_excess(const ComplexField& f) const;
  double band_excess(const RealField& f) const;

  /// exp((i + eps) t Lap) applied to each spinor component; t >= 0.
  SpinorField heat_propagate(const SpinorField& psi, double t, double eps) const;
  /// Homogeneous solution of alpha^2 A_tt - Lap A = 0 after time t, with
  /// its time derivative.
  std::pair<VectorField, VectorField> wave_propagate(const VectorField& a0, const VectorField& adot0,
                                                     double t, double alpha) const;

 private:
  void check_size(std::size_t size) const;

  MultiplierBank bank_;
  FftPlan plan_;
};

/// Per-mode energy |k|^2 |A_k|^2 + alpha^2 |Adot_k|^2 on the coefficient scale.
RealField wave_mode_energy(const Spectral& spectral, const VectorField& a, const VectorField& adot,
                           double alpha);

}  // namespace mpsim
