#pragma once
// Shared fixtures for the unit tests: seeded random fields, plane waves and
// norms of differences.
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "mpsim/grid.hpp"
#include "mpsim/spectral.hpp"

namespace mpsim::testing {

inline ComplexField random_complex(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexField f(size);
  for (auto& v : f) v = {g(rng), g(rng)};
  return f;
}

inline RealField random_real(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  RealField f(size);
  for (auto& v : f) v = g(rng);
  return f;
}

inline SpinorField random_spinor(std::size_t size, std::uint64_t seed) {
  SpinorField psi;
  psi.up = random_complex(size, seed);
  psi.down = random_complex(size, seed + 1);
  return psi;
}

inline VectorField random_vector(std::size_t size, std::uint64_t seed) {
  VectorField v;
  for (int c = 0; c < 3; ++c) v[c] = random_real(size, seed + c);
  return v;
}

/// Random field restricted to Fourier modes with |m_i| <= max_mode.
inline ComplexField smooth_complex(const Spectral& s, std::uint64_t seed, int max_mode) {
  const Grid& g = s.grid();
  ComplexField fh = s.fft_forward(random_complex(g.size(), seed));
  const int n = g.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        if (std::abs(g.mode(i)) > max_mode || std::abs(g.mode(j)) > max_mode || std::abs(g.mode(l)) > max_mode)
          fh[g.index(i, j, l)] = 0.0;
      }
  return s.fft_inverse(fh);
}

inline RealField smooth_real(const Spectral& s, std::uint64_t seed, int max_mode) {
  const ComplexField f = smooth_complex(s, seed, max_mode);
  RealField r(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i].real();
  return r;
}

inline SpinorField smooth_spinor(const Spectral& s, std::uint64_t seed, int max_mode) {
  SpinorField psi;
  psi.up = smooth_complex(s, seed, max_mode);
  psi.down = smooth_complex(s, seed + 1, max_mode);
  const double nrm = l2_norm(s.grid(), psi);
  for (int c = 0; c < 2; ++c)
    for (auto& v : psi[c]) v /= nrm;
  return psi;
}

/// Divergence-free smooth vector field of the given L2 norm.
inline VectorField smooth_solenoidal(const Spectral& s, std::uint64_t seed, int max_mode, double norm) {
  VectorField v;
  for (int c = 0; c < 3; ++c) v[c] = smooth_real(s, seed + 7 * c, max_mode);
  v = s.leray_project(v);
  const double nrm = l2_norm(s.grid(), v);
  for (int c = 0; c < 3; ++c)
    for (auto& x : v[c]) x *= norm / nrm;
  return v;
}

/// exp(i 2 pi m.x / L) sampled on the grid.
inline ComplexField plane_wave(const Grid& g, int m0, int m1, int m2) {
  ComplexField f(g.size());
  const double k = 2.0 * M_PI / g.length();
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j)
      for (int l = 0; l < g.n(); ++l)
        f[g.index(i, j, l)] = std::polar(1.0, k * (m0 * g.coord(i) + m1 * g.coord(j) + m2 * g.coord(l)));
  return f;
}

inline double max_abs_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const RealField& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs(const ComplexField& a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, max_abs_diff(a[c], b[c]));
  return m;
}

inline double max_abs_diff(const SpinorField& a, const SpinorField& b) {
  return std::max(max_abs_diff(a.up, b.up), max_abs_diff(a.down, b.down));
}

inline double max_abs(const VectorField& a) {
  return std::max({max_abs(a[0]), max_abs(a[1]), max_abs(a[2])});
}

inline double max_abs(const SpinorField& a) { return std::max(max_abs(a.up), max_abs(a.down)); }

inline SpinorField diff(const SpinorField& a, const SpinorField& b) {
  SpinorField d(a.size());
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < a.size(); ++i) d[c][i] = a[c][i] - b[c][i];
  return d;
}

}  // namespace mpsim::testing
