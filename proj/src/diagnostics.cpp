#include "mpsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "mpsim/error.hpp"
#include "mpsim/pauli.hpp"

namespace mpsim {

namespace {

constexpr double kPi = std::numbers::pi;

double laplacian_expectation(const Spectral& spectral, const SpinorField& psi) {
  const RealField& k2 = spectral.bank().k2();
  double s = 0.0;
  for (int c = 0; c < 2; ++c) {
    const ComplexField h = spectral.fft_forward(psi[c]);
    for (std::size_t i = 0; i < h.size(); ++i) s += k2[i] * std::norm(h[i]);
  }
  const Grid& g = spectral.grid();
  return s * g.cell_volume() / static_cast<double>(g.size());
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorClass::blowup, std::string("non-finite ") + what + " in energy report");
}

}  // namespace

EnergyReport energy_report(const Model& model, const SimState& state) {
  const Grid& grid = model.grid();
  const Spectral& spectral = model.spectral();
  const double alpha = model.params().alpha;
  const double eps = model.params().epsilon;

  EnergyReport r;
  r.time = state.time;
  const VectorField at = model.regularize(state.a);
  const SpinorField q = sigma_dot_pi(spectral, state.psi, at);
  r.kinetic = l2_norm_squared(grid, q);
  r.coulomb = model.coulomb().expectation(grid, state.psi);
  r.coulomb_shift = model.coulomb().shift_correction(grid, state.psi);
  r.field = (l2_norm_squared(grid, spectral.curl(state.a)) + alpha * alpha * l2_norm_squared(grid, state.a_dot)) /
            (8.0 * kPi * alpha * alpha);
  const double norm2 = l2_norm_squared(grid, state.psi);
  r.norm = std::sqrt(norm2);
  r.total = r.kinetic + r.coulomb + r.field * norm2;

  const SpinorField hpsi = model.hamiltonian(state.psi, at);
  const double expect_h = inner(grid, state.psi, hpsi).real();
  r.total_direct = expect_h + r.field * norm2;
  r.dissipation_rate = -2.0 * eps * (l2_norm_squared(grid, hpsi) - expect_h * expect_h);

  r.grad_norm = std::sqrt(laplacian_expectation(spectral, state.psi));
  r.a_norm = l2_norm(grid, state.a);
  r.div_residual = std::max(spectral.divergence_max(state.a), spectral.divergence_max(state.a_dot));
  r.continuity_residual = std::numeric_limits<double>::quiet_NaN();

  require_finite(r.kinetic, "kinetic energy");
  require_finite(r.coulomb, "Coulomb energy");
  require_finite(r.field, "field energy");
  require_finite(r.dissipation_rate, "dissipation rate");
  return r;
}

double continuity_residual(const Model& model, const SimState& before, const SimState& after, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorClass::domain, "continuity_residual: dt must be positive");
  const Spectral& spectral = model.spectral();
  const double alpha = model.params().alpha;
  const VectorField j0 = pauli_current_decomposed(spectral, before.psi, model.regularize(before.a), alpha);
  const VectorField j1 = pauli_current_decomposed(spectral, after.psi, model.regularize(after.a), alpha);
  VectorField jm(j0.size());
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < jm.size(); ++i) jm[c][i] = 0.5 * (j0[c][i] + j1[c][i]);
  RealField res = spectral.divergence(jm);
  // The current is band-limited, so the density change is compared on the
  // same band.
  const RealField rho0 = density(before.psi);
  const RealField rho1 = density(after.psi);
  RealField drho(res.size());
  for (std::size_t i = 0; i < res.size(); ++i) drho[i] = (rho1[i] - rho0[i]) / dt;
  drho = spectral.dealias(drho);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] -= alpha * drho[i];
  return std::sqrt(l2_norm_squared(model.grid(), res));
}

RayleighReport rayleigh_quotient(const Spectral& spectral, const CoulombPotential& coulomb,
                                 const SpinorField& psi) {
  const Grid& grid = spectral.grid();
  RayleighReport r;
  const double norm2 = l2_norm_squared(grid, psi);
  r.kinetic = laplacian_expectation(spectral, psi);
  r.coulomb = coulomb.expectation(grid, psi);
  r.coulomb_shift = coulomb.shift_correction(grid, psi);
  r.torus_quotient = (r.kinetic + r.coulomb) / norm2;
  r.quotient = (r.kinetic + r.coulomb + r.coulomb_shift) / norm2;
  r.reference = -0.25 * coulomb.Z * coulomb.Z;
  r.relative_error = r.reference != 0.0 ? std::abs(r.quotient - r.reference) / std::abs(r.reference)
                                        : std::abs(r.quotient);
  return r;
}

// Scaling --------------------------------------------------------------------

namespace {

// Row-major n x n matrix R with (R f)_i = Fourier interpolant of f at lambda x_i.
std::vector<double> resample_matrix(const Grid& grid, double lambda) {
  const int n = grid.n();
  const double L = grid.length();
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double y = lambda * grid.coord(i);
    if (y < -0.5 * L || y >= 0.5 * L) continue;
    for (int j = 0; j < n; ++j) {
      const double d = y - grid.coord(j);
      double s = 1.0;
      for (int q = 1; q < n / 2; ++q) s += 2.0 * std::cos(2.0 * kPi * q * d / L);
      s += std::cos(kPi * n * d / L);
      m[static_cast<std::size_t>(i) * n + j] = s / n;
    }
  }
  return m;
}

// Applies the 1D matrix along each axis in turn.
RealField resample_real(const Grid& grid, const std::vector<double>& m, const RealField& f) {
  const int n = grid.n();
  RealField cur = f, next(f.size());
  for (int axis = 0; axis < 3; ++axis) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        auto at = [&](int t) {
          if (axis == 0) return grid.index(t, a, b);
          if (axis == 1) return grid.index(a, t, b);
          return grid.index(a, b, t);
        };
        for (int i = 0; i < n; ++i) {
          const double* row = &m[static_cast<std::size_t>(i) * n];
          double s = 0.0;
          for (int j = 0; j < n; ++j) s += row[j] * cur[at(j)];
          next[at(i)] = s;
        }
      }
    std::swap(cur, next);
  }
  return cur;
}

ComplexField resample_complex(const Grid& grid, const std::vector<double>& m, const ComplexField& f) {
  RealField re(f.size()), im(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    re[i] = f[i].real();
    im[i] = f[i].imag();
  }
  re = resample_real(grid, m, re);
  im = resample_real(grid, m, im);
  ComplexField out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = cplx{re[i], im[i]};
  return out;
}

// Fraction of spectral weight at modes with some |k_i| above kcut.
double spectral_weight_beyond(const Spectral& spectral, const std::vector<ComplexField>& fields, double kcut) {
  const Grid& grid = spectral.grid();
  const int n = grid.n();
  double total = 0.0, beyond = 0.0;
  for (const ComplexField& f : fields) {
    const ComplexField h = spectral.fft_forward(f);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          const double e = std::norm(h[grid.index(i, j, l)]);
          total += e;
          const double km = std::max({std::abs(grid.wavenumber(i)), std::abs(grid.wavenumber(j)),
                                      std::abs(grid.wavenumber(l))});
          if (km > kcut) beyond += e;
        }
  }
  return total > 0.0 ? beyond / total : 0.0;
}

// Fraction of sum |f|^2 at points with some |x_i| >= half_width.
double spatial_weight_outside(const Grid& grid, const std::vector<ComplexField>& fields, double half_width) {
  const int n = grid.n();
  double total = 0.0, outside = 0.0;
  for (const ComplexField& f : fields)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          const double e = std::norm(f[grid.index(i, j, l)]);
          total += e;
          const double xm = std::max({std::abs(grid.coord(i)), std::abs(grid.coord(j)), std::abs(grid.coord(l))});
          if (xm >= half_width) outside += e;
        }
  return total > 0.0 ? outside / total : 0.0;
}

ComplexField as_complex(const RealField& f) { return ComplexField(f.begin(), f.end()); }

}  // namespace

SpinorField rescale_spinor(const Grid& grid, const SpinorField& psi, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorClass::domain, "rescale: lambda must be positive");
  const auto m = resample_matrix(grid, lambda);
  const double amp = std::pow(lambda, 1.5);
  SpinorField out;
  for (int s = 0; s < 2; ++s) {
    out[s] = resample_complex(grid, m, psi[s]);
    for (cplx& v : out[s]) v *= amp;
  }
  return out;
}

VectorField rescale_vector(const Grid& grid, const VectorField& a, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorClass::domain, "rescale: lambda must be positive");
  const auto m = resample_matrix(grid, lambda);
  VectorField out;
  for (int c = 0; c < 3; ++c) {
    out[c] = resample_real(grid, m, a[c]);
    for (double& v : out[c]) v *= lambda;
  }
  return out;
}

std::vector<ScalingPoint> scaling_curve(const Spectral& spectral, const CoulombPotential& coulomb,
                                        const SpinorField& psi, const VectorField& a, double alpha,
                                        const std::vector<double>& lambdas, double resolve_tol) {
  const Grid& grid = spectral.grid();
  for (int c = 0; c < 3; ++c)
    if (coulomb.nucleus[c] != 0.0)
      throw Error(ErrorClass::config, "nucleus: scaling is taken about the origin; place the nucleus there");
  if (!(alpha > 0.0)) throw Error(ErrorClass::config, "alpha: must be positive");

  std::vector<ComplexField> fields{psi.up, psi.down};
  for (int c = 0; c < 3; ++c) fields.push_back(as_complex(a[c]));
  const double k_band = 2.0 * kPi * grid.dealias_cutoff() / grid.length();

  std::vector<ScalingPoint> out;
  for (double lambda : lambdas) {
    ScalingPoint p;
    p.lambda = lambda;
    if (!(lambda > 0.0)) {
      p.skipped = true;
      p.warning = "lambda must be positive";
      out.push_back(p);
      continue;
    }
    const double lost = lambda >= 1.0 ? spectral_weight_beyond(spectral, fields, k_band / lambda)
                                      : spatial_weight_outside(grid, fields, 0.5 * lambda * grid.length());
    if (lost > resolve_tol) {
      std::ostringstream msg;
      msg << "lambda = " << lambda << " not resolvable: fraction " << lost << " of the weight would be lost";
      p.skipped = true;
      p.warning = msg.str();
      out.push_back(p);
      continue;
    }
    SpinorField pl = rescale_spinor(grid, psi, lambda);
    VectorField al = rescale_vector(grid, a, lambda);
    for (int s = 0; s < 2; ++s) pl[s] = spectral.dealias(pl[s]);
    for (int c = 0; c < 3; ++c) al[c] = spectral.dealias(al[c]);
    al = spectral.leray_project(al);

    p.norm = l2_norm(grid, pl);
    p.kinetic = l2_norm_squared(grid, sigma_dot_pi(spectral, pl, al));
    p.coulomb = coulomb.continuum_expectation(grid, pl);
    p.field = l2_norm_squared(grid, spectral.curl(al)) / (8.0 * kPi * alpha * alpha);
    p.potential_plus_field = p.coulomb + p.field;
    out.push_back(p);
  }
  return out;
}

ScalingFit fit_scaling(const std::vector<ScalingPoint>& points) {
  ScalingFit fit;
  double t_num = 0.0, t_den = 0.0, l_num = 0.0, l_den = 0.0;
  for (const auto& p : points) {
    if (p.skipped) continue;
    const double l2 = p.lambda * p.lambda;
    t_num += p.kinetic * l2;
    t_den += l2 * l2;
    l_num += p.potential_plus_field * p.lambda;
    l_den += l2;
    ++fit.points_used;
  }
  if (fit.points_used == 0) throw Error(ErrorClass::domain, "scaling fit: no resolvable lambda");
  fit.kinetic_coeff = t_num / t_den;
  fit.linear_coeff = l_num / l_den;
  for (const auto& p : points) {
    if (p.skipped) continue;
    const double tk = fit.kinetic_coeff * p.lambda * p.lambda;
    const double tl = fit.linear_coeff * p.lambda;
    fit.kinetic_residual = std::max(fit.kinetic_residual, std::abs(p.kinetic - tk) / std::abs(tk));
    fit.linear_residual = std::max(fit.linear_residual, std::abs(p.potential_plus_field - tl) / std::abs(tl));
  }
  return fit;
}

// Uniform bounds ---------------------------------------------------------------

BoundReport uniform_bound_monitor(const std::vector<EnergyReport>& series, double window_fraction,
                                  double factor) {
  BoundReport r;
  r.window_fraction = window_fraction;
  r.factor = factor;
  if (series.empty()) return r;
  const std::size_t n = series.size();
  const std::size_t w = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(window_fraction * n)));
  r.window_samples = static_cast<int>(w);
  for (std::size_t i = 0; i < w; ++i) {
    r.grad_window_max = std::max(r.grad_window_max, series[i].grad_norm);
    r.field_window_max = std::max(r.field_window_max, series[i].field);
  }
  double st = 0.0, sa = 0.0, stt = 0.0, sta = 0.0;
  for (const auto& e : series) {
    r.grad_max = std::max(r.grad_max, e.grad_norm);
    r.field_max = std::max(r.field_max, e.field);
    r.a_ratio_max = std::max(r.a_ratio_max, e.a_norm / (1.0 + e.time));
    st += e.time;
    sa += e.a_norm;
    stt += e.time * e.time;
    sta += e.time * e.a_norm;
  }
  const double denom = n * stt - st * st;
  r.a_slope = denom > 0.0 ? (n * sta - st * sa) / denom : 0.0;
  r.c3 = std::max(series.front().a_norm, std::sqrt(8.0 * kPi * factor * r.field_window_max));
  r.grad_ok = r.grad_max <= factor * r.grad_window_max;
  r.field_ok = r.field_max <= factor * r.field_window_max;
  r.a_ok = true;
  for (const auto& e : series)
    if (e.a_norm > r.c3 * (1.0 + e.time - series.front().time)) r.a_ok = false;
  return r;
}

SeriesSummary summarize_series(const std::vector<EnergyReport>& series) {
  SeriesSummary s;
  s.samples = static_cast<int>(series.size());
  if (series.empty()) return s;
  s.t_start = series.front().time;
  s.t_end = series.back().time;
  s.energy_initial = series.front().total;
  s.energy_final = series.back().total;
  if (s.t_end > s.t_start) s.decay_rate = (s.energy_initial - s.energy_final) / (s.t_end - s.t_start);
  s.max_energy_increase = -std::numeric_limits<double>::infinity();
  s.max_dissipation_rate = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const EnergyReport& e = series[i];
    s.max_norm_deviation = std::max(s.max_norm_deviation, std::abs(e.norm - 1.0));
    s.max_div_residual = std::max(s.max_div_residual, e.div_residual);
    if (!std::isnan(e.continuity_residual))
      s.max_continuity_residual = std::max(s.max_continuity_residual, e.continuity_residual);
    s.max_total_mismatch = std::max(s.max_total_mismatch, std::abs(e.total - e.total_direct));
    s.max_dissipation_rate = std::max(s.max_dissipation_rate, e.dissipation_rate);
    if (i > 0) {
      const double inc = e.total - series[i - 1].total;
      s.max_energy_increase = std::max(s.max_energy_increase, inc);
      if (inc > 1e-12 * std::max(1.0, std::abs(series[i - 1].total))) s.energy_monotone = false;
    }
  }
  if (series.size() < 2) s.max_energy_increase = 0.0;
  return s;
}

LinearFit linear_regression(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorClass::domain, "linear_regression: need at least two paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorClass::domain, "linear_regression: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

// Series -------------------------------------------------------------------

Observer SeriesRecorder::observer() {
  return [this](const Sample& s) {
    EnergyReport r = energy_report(*model_, *s.state);
    if (s.previous) r.continuity_residual = continuity_residual(*model_, *s.previous, *s.state, model_->dt());
    series_.push_back(r);
  };
}

std::string csv_header() {
  return "t,norm,kinetic,coulomb,field,total,dissipation_rate,div_residual,continuity_residual";
}

std::string csv_row(const EnergyReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.time, r.norm,
                r.kinetic, r.coulomb, r.field, r.total, r.dissipation_rate, r.div_residual,
                r.continuity_residual);
  return buf;
}

}  // namespace mpsim
