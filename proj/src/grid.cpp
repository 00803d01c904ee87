#include "mpsim/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mpsim/error.hpp"

namespace mpsim {

Grid::Grid(int n_per_axis, double box_length) : n_(n_per_axis), length_(box_length) {
  if (n_ < 4 || (n_ & (n_ - 1)) != 0)
    throw Error(ErrorClass::config,
                "grid: n_per_axis must be a power of two >= 4, got " + std::to_string(n_));
  if (!(length_ > 0.0) || !std::isfinite(length_))
    throw Error(ErrorClass::config, "grid: box_length must be positive and finite");
  size_ = static_cast<std::size_t>(n_) * n_ * n_;
}

double Grid::wavenumber(int i) const noexcept {
  return 2.0 * std::numbers::pi * mode(i) / length_;
}

double Grid::k_nyquist() const noexcept { return std::numbers::pi * n_ / length_; }

double integrate(const Grid& grid, const RealField& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * grid.cell_volume();
}

double l2_norm_squared(const Grid& grid, const ComplexField& f) {
  double s = 0.0;
  for (const cplx& v : f) s += std::norm(v);
  return s * grid.cell_volume();
}

double l2_norm_squared(const Grid& grid, const RealField& f) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return s * grid.cell_volume();
}

double l2_norm_squared(const Grid& grid, const VectorField& v) {
  return l2_norm_squared(grid, v[0]) + l2_norm_squared(grid, v[1]) + l2_norm_squared(grid, v[2]);
}

double l2_norm_squared(const Grid& grid, const SpinorField& psi) {
  return l2_norm_squared(grid, psi.up) + l2_norm_squared(grid, psi.down);
}

double l2_norm(const Grid& grid, const SpinorField& psi) {
  return std::sqrt(l2_norm_squared(grid, psi));
}

double l2_norm(const Grid& grid, const VectorField& v) { return std::sqrt(l2_norm_squared(grid, v)); }

cplx inner(const Grid& grid, const SpinorField& a, const SpinorField& b) {
  cplx s{};
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[c][i]) * b[c][i];
  return s * grid.cell_volume();
}

double inner(const Grid& grid, const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < a.size(); ++i) s += a[c][i] * b[c][i];
  return s * grid.cell_volume();
}

RealField density(const SpinorField& psi) {
  RealField rho(psi.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(psi.up[i]) + std::norm(psi.down[i]);
  return rho;
}

}  // namespace mpsim
