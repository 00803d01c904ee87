#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace mpsim {

using cplx = std::complex<double>;
using RealField = std::vector<double>;
using ComplexField = std::vector<cplx>;
using Vec3 = std::array<double, 3>;

/// Periodic cubic box [-L/2, L/2)^3 sampled with n points per axis.
///
/// Points are x_i = -L/2 + i h with h = L/n, so the origin is the grid point
/// i = n/2.  Storage is row-major with the z index fastest.  Mode index m of
/// axis position i follows the FFT ordering m = i for i < n/2, i - n
/// otherwise; the wavenumber is 2 pi m / L.
class Grid {
 public:
  Grid(int n_per_axis, double box_length);

  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / n_; }
  std::size_t size() const noexcept { return size_; }
  double volume() const noexcept { return length_ * length_ * length_; }
  double cell_volume() const noexcept {
    const double h = spacing();
    return h * h * h;
  }

  std::size_t index(int i, int j, int l) const noexcept {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + l;
  }
  double coord(int i) const noexcept { return -0.5 * length_ + i * spacing(); }
  int mode(int i) const noexcept { return i < n_ / 2 ? i : i - n_; }
  double wavenumber(int i) const noexcept;
  /// Largest |m| kept by the 2/3-rule truncation: 3 * cutoff < n.
  int dealias_cutoff() const noexcept { return (n_ - 1) / 3; }
  /// Largest resolved wavenumber magnitude per axis (Nyquist).
  double k_nyquist() const noexcept;

  bool operator==(const Grid& other) const noexcept {
    return n_ == other.n_ && length_ == other.length_;
  }

 private:
  int n_;
  double length_;
  std::size_t size_;
};

struct VectorField {
  std::array<RealField, 3> c;

  VectorField() = default;
  explicit VectorField(std::size_t size) : c{RealField(size, 0.0), RealField(size, 0.0), RealField(size, 0.0)} {}

  RealField& operator[](int k) { return c[k]; }
  const RealField& operator[](int k) const { return c[k]; }
  std::size_t size() const noexcept { return c[0].size(); }
};

/// Two-component spinor field psi: R^3 -> C^2 on a grid.
struct SpinorField {
  ComplexField up;
  ComplexField down;

  SpinorField() = default;
  explicit SpinorField(std::size_t size) : up(size, cplx{}), down(size, cplx{}) {}

  ComplexField& operator[](int s) { return s == 0 ? up : down; }
  const ComplexField& operator[](int s) const { return s == 0 ? up : down; }
  std::size_t size() const noexcept { return up.size(); }
};

// Grid quadratures: sum over points times the cell volume h^3.
double integrate(const Grid& grid, const RealField& f);
double l2_norm_squared(const Grid& grid, const ComplexField& f);
double l2_norm_squared(const Grid& grid, const RealField& f);
double l2_norm_squared(const Grid& grid, const VectorField& v);
double l2_norm_squared(const Grid& grid, const SpinorField& psi);
double l2_norm(const Grid& grid, const SpinorField& psi);
double l2_norm(const Grid& grid, const VectorField& v);
cplx inner(const Grid& grid, const SpinorField& a, const SpinorField& b);
double inner(const Grid& grid, const VectorField& a, const VectorField& b);
RealField density(const SpinorField& psi);

}  // namespace mpsim
