#include "mpsim/state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "mpsim/error.hpp"

namespace mpsim {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorClass::config, field + ": " + why);
}

double uniform01(std::mt19937_64& rng) {
  // Fixed mapping so streams are identical across standard libraries.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double squared_distance(const Grid& grid, int i, int j, int l, const Vec3& c) {
  const Vec3 d = minimum_image(grid, {grid.coord(i), grid.coord(j), grid.coord(l)}, c);
  return d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
}

}  // namespace

void validate(const SimParams& p) {
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) bad_field("alpha", "must be positive and finite");
  if (!(p.epsilon >= 0.0) || !std::isfinite(p.epsilon)) bad_field("epsilon", "must be >= 0");
  if (!(p.Z >= 0.0) || !std::isfinite(p.Z)) bad_field("Z", "must be >= 0");
  if (p.n < 4 || (p.n & (p.n - 1)) != 0) bad_field("n", "must be a power of two >= 4");
  if (!(p.box_length > 0.0) || !std::isfinite(p.box_length)) bad_field("box_length", "must be positive");
  for (int c = 0; c < 3; ++c) {
    const double x = p.nucleus[c];
    if (!(x >= -0.5 * p.box_length && x < 0.5 * p.box_length))
      bad_field("nucleus", "must lie inside [-L/2, L/2)^3");
  }
  if (!std::isfinite(p.dt)) bad_field("dt", "must be finite");
  if (!(p.t_end >= 0.0) || !std::isfinite(p.t_end)) bad_field("t_end", "must be >= 0");
  if (!(p.picard_tol > 0.0)) bad_field("picard_tol", "must be positive");
  if (p.picard_max < 1) bad_field("picard_max", "must be >= 1");
}

double default_dt(const SimParams& p) {
  const double h = p.box_length / p.n;
  return std::min(p.alpha * h / kPi, 0.5 * h * h / (1.0 + p.epsilon));
}

Vec3 minimum_image(const Grid& grid, const Vec3& x, const Vec3& c) {
  const double L = grid.length();
  Vec3 d{};
  for (int k = 0; k < 3; ++k) {
    double v = x[k] - c[k];
    v -= L * std::round(v / L);
    d[k] = v;
  }
  return d;
}

double cubic_green_constant() {
  // Ewald split on the unit cube with eta = sqrt(pi); both sums converge to
  // roundoff within |n|, |m| <= 5.
  const double eta = std::sqrt(kPi);
  constexpr int R = 5;
  double real_sum = 0.0, recip_sum = 0.0;
  for (int a = -R; a <= R; ++a) {
    for (int b = -R; b <= R; ++b) {
      for (int c = -R; c <= R; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        const double n2 = static_cast<double>(a * a + b * b + c * c);
        const double r = std::sqrt(n2);
        real_sum += std::erfc(eta * r) / r;
        const double k2 = 4.0 * kPi * kPi * n2;
        recip_sum += std::exp(-k2 / (4.0 * eta * eta)) / k2;
      }
    }
  }
  return real_sum + 4.0 * kPi * recip_sum - kPi / (eta * eta) - 2.0 * eta / std::sqrt(kPi);
}

CoulombPotential make_coulomb(const Grid& grid, double Z, const Vec3& nucleus) {
  if (!(Z >= 0.0)) throw Error(ErrorClass::config, "Z: must be >= 0");
  CoulombPotential v;
  v.Z = Z;
  v.nucleus = nucleus;
  const double L = grid.length();
  v.mean_shift = -Z * cubic_green_constant() / L;
  v.background = 2.0 * kPi * Z / (3.0 * L * L * L);
  if (Z == 0.0) {
    v.values.assign(grid.size(), 0.0);
    return v;
  }
  const int n = grid.n();
  const double scale = -4.0 * kPi * Z / (L * L * L) * static_cast<double>(grid.size());
  ComplexField vh(grid.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        const double kx = grid.wavenumber(i), ky = grid.wavenumber(j), kz = grid.wavenumber(l);
        const double k2 = kx * kx + ky * ky + kz * kz;
        // Phase relative to the first grid point, since x = -L/2 + i h.
        const double phase = kx * (nucleus[0] + 0.5 * L) + ky * (nucleus[1] + 0.5 * L) + kz * (nucleus[2] + 0.5 * L);
        vh[grid.index(i, j, l)] = k2 > 0.0 ? scale / k2 * std::polar(1.0, -phase) : cplx{};
      }
    }
  }
  FftPlan plan(grid);
  plan.inverse(vh);
  v.values.resize(grid.size());
  for (std::size_t i = 0; i < vh.size(); ++i) v.values[i] = vh[i].real();
  return v;
}

double CoulombPotential::expectation(const Grid& grid, const SpinorField& psi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    s += values[i] * (std::norm(psi.up[i]) + std::norm(psi.down[i]));
  return s * grid.cell_volume();
}

double CoulombPotential::shift_correction(const Grid& grid, const SpinorField& psi) const {
  if (Z == 0.0) return 0.0;
  const int n = grid.n();
  double mass = 0.0, r2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const std::size_t idx = grid.index(i, j, l);
        const double rho = std::norm(psi.up[idx]) + std::norm(psi.down[idx]);
        mass += rho;
        r2 += rho * squared_distance(grid, i, j, l, nucleus);
      }
  const double h3 = grid.cell_volume();
  return -mean_shift * mass * h3 + background * r2 * h3;
}

double CoulombPotential::continuum_expectation(const Grid& grid, const SpinorField& psi) const {
  return expectation(grid, psi) + shift_correction(grid, psi);
}

SpinorField make_hydrogen_ground_state(const Grid& grid, double Z, const Vec3& nucleus, double* raw_norm) {
  if (!(Z > 0.0)) throw Error(ErrorClass::config, "Z: hydrogen ground state needs Z > 0");
  const int n = grid.n();
  const double amp = std::pow(Z, 1.5) / (2.0 * std::sqrt(2.0 * kPi));
  SpinorField psi(grid.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const double r = std::sqrt(squared_distance(grid, i, j, l, nucleus));
        psi.up[grid.index(i, j, l)] = amp * std::exp(-0.5 * Z * r);
      }
  const double norm = l2_norm(grid, psi);
  if (raw_norm) *raw_norm = norm;
  for (cplx& v : psi.up) v /= norm;
  return psi;
}

double hydrogen_tail_mass(const Grid& grid, double Z) {
  const double x = 0.5 * Z * grid.length();
  return std::exp(-x) * (1.0 + x + 0.5 * x * x);
}

SpinorField make_gaussian_packet(const Grid& grid, const Vec3& center, double width, const Vec3& momentum,
                                 const std::array<cplx, 2>& spin) {
  if (!(width > 0.0)) throw Error(ErrorClass::config, "width: must be positive");
  if (width < 2.0 * grid.spacing()) {
    std::ostringstream msg;
    msg << "width: " << width << " is under-resolved (needs >= 2h = " << 2.0 * grid.spacing() << ")";
    throw Error(ErrorClass::config, msg.str());
  }
  const double chi_norm = std::sqrt(std::norm(spin[0]) + std::norm(spin[1]));
  if (!(chi_norm > 0.0)) throw Error(ErrorClass::config, "spin: must be a nonzero 2-spinor");
  const int n = grid.n();
  const double amp = std::pow(kPi * width * width, -0.75);
  SpinorField psi(grid.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const Vec3 d = minimum_image(grid, {grid.coord(i), grid.coord(j), grid.coord(l)}, center);
        const double d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        const double pd = momentum[0] * d[0] + momentum[1] * d[1] + momentum[2] * d[2];
        const cplx g = amp * std::exp(-0.5 * d2 / (width * width)) * std::polar(1.0, pd);
        const std::size_t idx = grid.index(i, j, l);
        psi.up[idx] = g * spin[0] / chi_norm;
        psi.down[idx] = g * spin[1] / chi_norm;
      }
  const double norm = l2_norm(grid, psi);
  for (int s = 0; s < 2; ++s)
    for (cplx& v : psi[s]) v /= norm;
  return psi;
}

VectorField make_random_gauge_field(const Spectral& spectral, std::uint64_t seed, double target_norm,
                                    int max_mode) {
  const Grid& grid = spectral.grid();
  if (max_mode < 1 || max_mode > grid.dealias_cutoff())
    throw Error(ErrorClass::config, "max_mode: must lie in [1, dealias cutoff]");
  std::mt19937_64 rng(seed);
  const int n = grid.n();
  std::array<ComplexField, 3> hat;
  for (auto& h : hat) h.assign(grid.size(), cplx{});
  // Visit modes in a fixed order so the stream maps to the same coefficients.
  for (int mx = -max_mode; mx <= max_mode; ++mx)
    for (int my = -max_mode; my <= max_mode; ++my)
      for (int mz = -max_mode; mz <= max_mode; ++mz) {
        if (mx == 0 && my == 0 && mz == 0) continue;
        const std::size_t idx = grid.index((mx + n) % n, (my + n) % n, (mz + n) % n);
        for (int c = 0; c < 3; ++c) {
          const double re = 2.0 * uniform01(rng) - 1.0;
          const double im = 2.0 * uniform01(rng) - 1.0;
          hat[c][idx] = cplx{re, im};
        }
      }
  VectorField a;
  for (int c = 0; c < 3; ++c) a[c] = spectral.fft_inverse_real(hat[c]);
  a = spectral.leray_project(a);
  const double norm = l2_norm(grid, a);
  if (!(norm > 0.0)) throw Error(ErrorClass::domain, "random gauge field vanished");
  for (int c = 0; c < 3; ++c)
    for (double& v : a[c]) v *= target_norm / norm;
  return a;
}

SimState prepare_state(const Spectral& spectral, SpinorField psi, VectorField a, VectorField a_dot,
                       double time) {
  const Grid& grid = spectral.grid();
  if (psi.size() != grid.size() || psi.down.size() != grid.size())
    throw Error(ErrorClass::config, "psi: size does not match the grid");
  SimState s;
  s.time = time;
  s.psi.up = spectral.dealias(psi.up);
  s.psi.down = spectral.dealias(psi.down);
  const double norm = l2_norm(grid, s.psi);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorClass::domain, "psi: zero or non-finite norm");
  for (int c = 0; c < 2; ++c)
    for (cplx& v : s.psi[c]) v /= norm;
  auto project = [&](VectorField v, const char* name) {
    if (v.size() == 0) return VectorField(grid.size());
    if (v.size() != grid.size()) throw Error(ErrorClass::config, std::string(name) + ": size does not match the grid");
    for (int c = 0; c < 3; ++c) v[c] = spectral.dealias(v[c]);
    return spectral.leray_project(v);
  };
  s.a = project(std::move(a), "a");
  s.a_dot = project(std::move(a_dot), "a_dot");
  return s;
}

// Checkpoint I/O -------------------------------------------------------------

namespace {

constexpr char kMagic[6] = {'M', 'P', 'S', 'I', 'M', '1'};

template <typename T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw Error(ErrorClass::io, "checkpoint: unexpected end of file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const SimParams& params, const SimState& state) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorClass::io, "checkpoint: cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof(kMagic));
  for (int k = 0; k < 3; ++k) put_le<std::uint32_t>(os, static_cast<std::uint32_t>(params.n));
  put_le<double>(os, params.box_length);
  put_le<double>(os, params.alpha);
  put_le<double>(os, params.epsilon);
  put_le<double>(os, params.Z);
  put_le<double>(os, state.time);
  for (int s = 0; s < 2; ++s) {
    for (const cplx& v : state.psi[s]) put_le<double>(os, v.real());
    for (const cplx& v : state.psi[s]) put_le<double>(os, v.imag());
  }
  for (int c = 0; c < 3; ++c)
    for (double v : state.a[c]) put_le<double>(os, v);
  for (int c = 0; c < 3; ++c)
    for (double v : state.a_dot[c]) put_le<double>(os, v);
  if (!os) throw Error(ErrorClass::io, "checkpoint: write failed for " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorClass::io, "checkpoint: cannot open " + path.string());
  char magic[sizeof(kMagic)];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw Error(ErrorClass::io, "checkpoint: bad magic in " + path.string());
  Checkpoint cp;
  std::uint32_t dims[3];
  for (auto& d : dims) d = get_le<std::uint32_t>(is);
  if (dims[0] != dims[1] || dims[1] != dims[2] || dims[0] < 4 || dims[0] > 4096)
    throw Error(ErrorClass::io, "checkpoint: unsupported grid dimensions");
  cp.n = static_cast<int>(dims[0]);
  cp.box_length = get_le<double>(is);
  cp.alpha = get_le<double>(is);
  cp.epsilon = get_le<double>(is);
  cp.Z = get_le<double>(is);
  cp.state.time = get_le<double>(is);
  const std::size_t size = static_cast<std::size_t>(cp.n) * cp.n * cp.n;
  cp.state.psi = SpinorField(size);
  for (int s = 0; s < 2; ++s) {
    for (cplx& v : cp.state.psi[s]) v.real(get_le<double>(is));
    for (cplx& v : cp.state.psi[s]) v.imag(get_le<double>(is));
  }
  cp.state.a = VectorField(size);
  cp.state.a_dot = VectorField(size);
  for (int c = 0; c < 3; ++c)
    for (double& v : cp.state.a[c]) v = get_le<double>(is);
  for (int c = 0; c < 3; ++c)
    for (double& v : cp.state.a_dot[c]) v = get_le<double>(is);
  return cp;
}

}  // namespace mpsim
