#include "mpsim/zeromode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mpsim/error.hpp"
#include "mpsim/pauli.hpp"
#include "mpsim/quadrature.hpp"

namespace mpsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// (sigma . v) phi for a real 3-vector v.
Spinor sigma_dot(const Vec3& v, const Spinor& phi) {
  return {v[2] * phi[0] + cplx{v[0], -v[1]} * phi[1], cplx{v[0], v[1]} * phi[0] - v[2] * phi[1]};
}

Spinor sigma_j(int j, const Spinor& phi) {
  switch (j) {
    case 0: return {phi[1], phi[0]};
    case 1: return {-kI * phi[1], kI * phi[0]};
    default: return {phi[0], -phi[1]};
  }
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 spin_of(const Spinor& p) {
  const cplx ud = std::conj(p[0]) * p[1];
  return {2.0 * ud.real(), 2.0 * ud.imag(), std::norm(p[0]) - std::norm(p[1])};
}

// 6 axis directions and 8 cube diagonals.
const std::vector<Vec3>& angular_rule() {
  static const std::vector<Vec3> dirs = [] {
    std::vector<Vec3> d;
    for (int c = 0; c < 3; ++c)
      for (double s : {1.0, -1.0}) {
        Vec3 v{0, 0, 0};
        v[c] = s;
        d.push_back(v);
      }
    const double t = 1.0 / std::sqrt(3.0);
    for (double a : {t, -t})
      for (double b : {t, -t})
        for (double c : {t, -t}) d.push_back({a, b, c});
    return d;
  }();
  return dirs;
}

// Spherical average of f(r e) over the angular rule.
template <typename F>
double angular_average(double r, F&& f) {
  const auto& dirs = angular_rule();
  double s = 0.0;
  for (const Vec3& e : dirs) s += f(Vec3{r * e[0], r * e[1], r * e[2]});
  return s / static_cast<double>(dirs.size());
}

double radial_integral(const std::function<double(double)>& f, double rel_tol, double abs_tol = 0.0) {
  return integrate_half_line(f, rel_tol, abs_tol, 20000).value;
}

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

}  // namespace

ZeroModeSpec ZeroModeSpec::from_spinor(const Spinor& phi0) {
  const double n = std::sqrt(std::norm(phi0[0]) + std::norm(phi0[1]));
  if (!(n > 0.0)) throw Error(ErrorClass::config, "phi0: must be a nonzero 2-spinor");
  ZeroModeSpec s;
  s.phi0 = {phi0[0] / n, phi0[1] / n};
  s.w = spin_of(s.phi0);
  return s;
}

LossYauValue loss_yau_eval(const ZeroModeSpec& spec, const Vec3& x_in, double lambda) {
  const Vec3 x{lambda * x_in[0], lambda * x_in[1], lambda * x_in[2]};
  const double r2 = dot(x, x);
  const double d = 1.0 + r2;
  const double d32 = d * std::sqrt(d);
  const Vec3& w = spec.w;

  const Spinor sx = sigma_dot(x, spec.phi0);
  const Spinor chi{spec.phi0[0] + kI * sx[0], spec.phi0[1] + kI * sx[1]};
  const double amp = std::pow(lambda, 1.5);
  const double gamp = std::pow(lambda, 2.5);

  LossYauValue v;
  for (int s = 0; s < 2; ++s) v.psi[s] = amp * chi[s] / (kPi * d32);
  for (int j = 0; j < 3; ++j) {
    const Spinor sj = sigma_j(j, spec.phi0);
    for (int s = 0; s < 2; ++s)
      v.grad_psi[j][s] = gamp * (kI * sj[s] / d32 - 3.0 * x[j] * chi[s] / (d32 * d)) / kPi;
  }
  const double wx = dot(w, x);
  const Vec3 wcx = cross(w, x);
  for (int c = 0; c < 3; ++c) v.a[c] = lambda * 3.0 * ((r2 - 1.0) * w[c] - 2.0 * wx * x[c] - 2.0 * wcx[c]) / (d * d);
  return v;
}

Vec3 loss_yau_curl(const ZeroModeSpec& spec, const Vec3& x) {
  const double r2 = dot(x, x);
  const double d = 1.0 + r2;
  const double pre = 12.0 / (d * d * d);
  const Vec3 xcw = cross(x, spec.w);
  const double xw = dot(x, spec.w);
  Vec3 b{};
  for (int c = 0; c < 3; ++c) b[c] = pre * (2.0 * xcw[c] + (r2 - 1.0) * spec.w[c] - 2.0 * x[c] * xw);
  return b;
}

double dirac_residual_at(const ZeroModeSpec& spec, const Vec3& x, double lambda) {
  const LossYauValue v = loss_yau_eval(spec, x, lambda);
  Spinor total{};
  for (int j = 0; j < 3; ++j) {
    Spinor pij;
    for (int s = 0; s < 2; ++s) pij[s] = -kI * v.grad_psi[j][s] + v.a[j] * v.psi[s];
    const Spinor t = sigma_j(j, pij);
    total[0] += t[0];
    total[1] += t[1];
  }
  return std::sqrt(std::norm(total[0]) + std::norm(total[1]));
}

double dirac_residual(const ZeroModeSpec& spec, const std::vector<Vec3>& samples, double lambda) {
  double m = 0.0;
  for (const Vec3& x : samples) m = std::max(m, dirac_residual_at(spec, x, lambda));
  return m;
}

std::vector<Vec3> halton_ball_samples(int count, double radius) {
  std::vector<Vec3> out;
  out.reserve(count);
  for (int i = 1; static_cast<int>(out.size()) < count; ++i) {
    const Vec3 p{radius * (2.0 * halton(i, 2) - 1.0), radius * (2.0 * halton(i, 3) - 1.0),
                 radius * (2.0 * halton(i, 5) - 1.0)};
    if (dot(p, p) <= radius * radius) out.push_back(p);
  }
  return out;
}

double gauge_profile(double r) {
  if (r < 0.5) {
    // sum_n (-1)^n r^{2n} / (2n + 3)
    const double r2 = r * r;
    double term = 1.0, s = 0.0;
    for (int n = 0; n < 60; ++n) {
      s += (n % 2 == 0 ? 1.0 : -1.0) * term / (2 * n + 3);
      term *= r2;
    }
    return s;
  }
  return (r - std::atan(r)) / (r * r * r);
}

double gauge_profile_dr_over_r(double r) {
  if (r < 0.5) {
    // sum_{n>=1} (-1)^n 2n r^{2n-2} / (2n + 3)
    const double r2 = r * r;
    double term = 1.0, s = 0.0;
    for (int n = 1; n < 60; ++n) {
      s += (n % 2 == 0 ? 1.0 : -1.0) * 2.0 * n * term / (2 * n + 3);
      term *= r2;
    }
    return s;
  }
  // r g' = 1/(1+r^2) - 3 g
  return (1.0 / (1.0 + r * r) - 3.0 * gauge_profile(r)) / (r * r);
}

GaugeFixValue gauge_fix(const ZeroModeSpec& spec, const Vec3& x) {
  const double r2 = dot(x, x);
  const double r = std::sqrt(r2);
  const double g = gauge_profile(r);
  const double gr = gauge_profile_dr_over_r(r);
  const double wx = dot(spec.w, x);
  GaugeFixValue v;
  v.zeta = 3.0 * wx * g;
  const LossYauValue ly = loss_yau_eval(spec, x);
  for (int c = 0; c < 3; ++c) {
    v.grad_zeta[c] = 3.0 * (spec.w[c] * g + wx * gr * x[c]);
    v.a_coulomb[c] = ly.a[c] - v.grad_zeta[c];
  }
  const double d = 1.0 + r2;
  const double div_a = -6.0 * wx / (d * d);
  // Lap((w.x) g) = (w.x)(g'' + 4 g'/r) and g'' + 4 g'/r = -2/(1+r^2)^2.
  const double lap_zeta = 3.0 * wx * (-2.0 / (d * d));
  v.div_a_coulomb = div_a - lap_zeta;
  return v;
}

ZcResult zc_ratio(const ZeroModeSpec& spec, double alpha, double agree_tol) {
  if (!(alpha > 0.0)) throw Error(ErrorClass::config, "alpha: must be positive");
  auto b2 = [&](double r) {
    return angular_average(r, [&](const Vec3& x) {
      const Vec3 s = spin_of(loss_yau_eval(spec, x).psi);
      const double c = 12.0 * kPi * kPi;
      return c * c * dot(s, s);
    });
  };
  auto rho = [&](double r) {
    return angular_average(r, [&](const Vec3& x) {
      const Spinor p = loss_yau_eval(spec, x).psi;
      return std::norm(p[0]) + std::norm(p[1]);
    });
  };
  ZcResult out;
  double prev = 0.0;
  for (double tol = 1e-8; tol >= 1e-14; tol *= 1e-2) {
    const double bb = radial_integral([&](double r) { return 4.0 * kPi * r * r * b2(r); }, tol);
    const double inv_r = radial_integral([&](double r) { return 4.0 * kPi * r * rho(r); }, tol);
    const double norm2 = radial_integral([&](double r) { return 4.0 * kPi * r * r * rho(r); }, tol);
    const double field = bb / (8.0 * kPi * alpha * alpha);
    const double ratio = field / inv_r;
    ++out.refinements;
    out = ZcResult{ratio, field, inv_r, norm2, bb, out.refinements};
    if (out.refinements > 1 && std::abs(ratio - prev) <= agree_tol * std::abs(ratio)) return out;
    prev = ratio;
  }
  throw Error(ErrorClass::nonconvergence, "zc_ratio: quadrature refinements did not agree");
}

ZeroModeEnergy zero_mode_energy(const ZeroModeSpec& spec, double alpha, double Z, double lambda) {
  if (!(alpha > 0.0)) throw Error(ErrorClass::config, "alpha: must be positive");
  if (!(lambda > 0.0)) throw Error(ErrorClass::domain, "lambda: must be positive");
  constexpr double tol = 1e-12;
  ZeroModeEnergy e;
  e.lambda = lambda;
  e.kinetic = radial_integral(
      [&](double r) {
        return 4.0 * kPi * r * r * angular_average(r, [&](const Vec3& x) {
                 const double q = dirac_residual_at(spec, x, lambda);
                 return q * q;
               });
      },
      tol, 1e-14);  // vanishes up to rounding
  e.inverse_r = radial_integral(
      [&](double r) {
        return 4.0 * kPi * r * angular_average(r, [&](const Vec3& x) {
                 const Spinor p = loss_yau_eval(spec, x, lambda).psi;
                 return std::norm(p[0]) + std::norm(p[1]);
               });
      },
      tol);
  const double bb = radial_integral(
      [&](double r) {
        return 4.0 * kPi * r * r * angular_average(r, [&](const Vec3& x) {
                 const Vec3 b = loss_yau_curl(spec, {lambda * x[0], lambda * x[1], lambda * x[2]});
                 return lambda * lambda * lambda * lambda * dot(b, b);
               });
      },
      tol);
  e.field = bb / (8.0 * kPi * alpha * alpha);
  e.energy = e.kinetic - Z * e.inverse_r + e.field;
  return e;
}

double zc_lower_bound(double alpha) { return 3.0 / (kPi * alpha * alpha); }

double zc_upper_bound(double alpha) { return 9.0 * kPi * kPi / (8.0 * alpha * alpha); }

ZeroModePotential zero_mode_A_from_psi(const Spectral& spectral, const SpinorField& psi, double floor) {
  const std::size_t size = psi.size();
  const VectorField curl_s = spectral.curl(spin_density(psi));
  const auto gu = spectral.gradient(psi.up);
  const auto gd = spectral.gradient(psi.down);
  ZeroModePotential out;
  out.a = VectorField(size);
  out.masked.assign(size, 0);
  for (std::size_t i = 0; i < size; ++i) {
    const double rho = std::norm(psi.up[i]) + std::norm(psi.down[i]);
    if (rho < floor) {
      out.masked[i] = 1;
      ++out.masked_count;
      continue;
    }
    for (int c = 0; c < 3; ++c) {
      const double im = (std::conj(psi.up[i]) * gu[c][i] + std::conj(psi.down[i]) * gd[c][i]).imag();
      out.a[c][i] = -(curl_s[c][i] + 2.0 * im) / (2.0 * rho);
    }
  }
  return out;
}

SpinorField sample_loss_yau_psi(const Grid& grid, const ZeroModeSpec& spec) {
  const int n = grid.n();
  SpinorField psi(grid.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const Vec3 x{grid.coord(i), grid.coord(j), grid.coord(l)};
        const LossYauValue v = loss_yau_eval(spec, x);
        const std::size_t idx = grid.index(i, j, l);
        psi.up[idx] = v.psi[0];
        psi.down[idx] = v.psi[1];
      }
  return psi;
}

VectorField sample_loss_yau_a(const Grid& grid, const ZeroModeSpec& spec) {
  const int n = grid.n();
  VectorField a(grid.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const LossYauValue v = loss_yau_eval(spec, {grid.coord(i), grid.coord(j), grid.coord(l)});
        const std::size_t idx = grid.index(i, j, l);
        for (int c = 0; c < 3; ++c) a[c][idx] = v.a[c];
      }
  return a;
}

}  // namespace mpsim
