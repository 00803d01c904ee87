#include "mpsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "mpsim/error.hpp"

namespace mpsim {

namespace {

constexpr cplx kI{0.0, 1.0};

ComplexField to_complex(const RealField& f) {
  ComplexField out(f.size());
  std::transform(f.begin(), f.end(), out.begin(), [](double v) { return cplx{v, 0.0}; });
  return out;
}

RealField real_part(const ComplexField& f) {
  RealField out(f.size());
  std::transform(f.begin(), f.end(), out.begin(), [](const cplx& v) { return v.real(); });
  return out;
}

}  // namespace

MultiplierBank::MultiplierBank(const Grid& grid) : grid_(grid) {
  const std::size_t size = grid.size();
  const int n = grid.n();
  const int cutoff = grid.dealias_cutoff();
  k2_.resize(size);
  for (auto& k : kd_) k.resize(size);
  mask_.resize(size);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        const std::size_t idx = grid.index(i, j, l);
        const double kx = grid.wavenumber(i), ky = grid.wavenumber(j), kz = grid.wavenumber(l);
        k2_[idx] = kx * kx + ky * ky + kz * kz;
        kd_[0][idx] = (i == n / 2) ? 0.0 : kx;
        kd_[1][idx] = (j == n / 2) ? 0.0 : ky;
        kd_[2][idx] = (l == n / 2) ? 0.0 : kz;
        const bool keep = std::abs(grid.mode(i)) <= cutoff && std::abs(grid.mode(j)) <= cutoff &&
                          std::abs(grid.mode(l)) <= cutoff;
        mask_[idx] = keep ? 1 : 0;
      }
    }
  }
}

RealField MultiplierBank::lam_s(double s) const {
  RealField m(k2_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::pow(1.0 + k2_[i], 0.5 * s);
  return m;
}

RealField MultiplierBank::lam_eps_inv(double eps) const {
  RealField m(k2_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 1.0 / std::sqrt(1.0 + eps * k2_[i]);
  return m;
}

RealField MultiplierBank::inv_lap() const {
  RealField m(k2_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = k2_[i] > 0.0 ? 1.0 / k2_[i] : 0.0;
  return m;
}

ComplexField MultiplierBank::heat(double t, double eps) const {
  ComplexField m(k2_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::exp(-(kI + eps) * (t * k2_[i]));
  return m;
}

RealField MultiplierBank::wave_cos(double t) const {
  RealField m(k2_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::cos(std::sqrt(k2_[i]) * t);
  return m;
}

RealField MultiplierBank::wave_sinc(double t) const {
  RealField m(k2_.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double k = std::sqrt(k2_[i]);
    m[i] = k > 0.0 ? std::sin(k * t) / k : t;
  }
  return m;
}

Spectral::Spectral(const Grid& grid) : bank_(grid), plan_(grid) {}

void Spectral::check_size(std::size_t size) const {
  if (size != grid().size())
    throw Error(ErrorClass::config, "spectral: field of size " + std::to_string(size) +
                                        " does not match grid of size " + std::to_string(grid().size()));
}

ComplexField Spectral::fft_forward(const ComplexField& f) const {
  check_size(f.size());
  ComplexField out = f;
  plan_.forward(out);
  return out;
}

ComplexField Spectral::fft_forward(const RealField& f) const {
  check_size(f.size());
  ComplexField out = to_complex(f);
  plan_.forward(out);
  return out;
}

ComplexField Spectral::fft_inverse(const ComplexField& fhat) const {
  check_size(fhat.size());
  ComplexField out = fhat;
  plan_.inverse(out);
  return out;
}

RealField Spectral::fft_inverse_real(const ComplexField& fhat) const {
  return real_part(fft_inverse(fhat));
}

ComplexField Spectral::apply_multiplier(const ComplexField& f, const RealField& m) const {
  check_size(m.size());
  ComplexField fh = fft_forward(f);
  for (std::size_t i = 0; i < fh.size(); ++i) fh[i] *= m[i];
  plan_.inverse(fh);
  return fh;
}

ComplexField Spectral::apply_multiplier(const ComplexField& f, const ComplexField& m) const {
  check_size(m.size());
  ComplexField fh = fft_forward(f);
  for (std::size_t i = 0; i < fh.size(); ++i) fh[i] *= m[i];
  plan_.inverse(fh);
  return fh;
}

RealField Spectral::apply_multiplier(const RealField& f, const RealField& m) const {
  return real_part(apply_multiplier(to_complex(f), m));
}

VectorField Spectral::apply_multiplier(const VectorField& v, const RealField& m) const {
  VectorField out;
  for (int c = 0; c < 3; ++c) out[c] = apply_multiplier(v[c], m);
  return out;
}

std::array<ComplexField, 3> Spectral::gradient(const ComplexField& f) const {
  const ComplexField fh = fft_forward(f);
  std::array<ComplexField, 3> out;
  for (int c = 0; c < 3; ++c) {
    const RealField& k = bank_.k()[c];
    out[c].resize(fh.size());
    for (std::size_t i = 0; i < fh.size(); ++i) out[c][i] = kI * k[i] * fh[i];
    plan_.inverse(out[c]);
  }
  return out;
}

VectorField Spectral::gradient(const RealField& f) const {
  auto g = gradient(to_complex(f));
  VectorField out;
  for (int c = 0; c < 3; ++c) out[c] = real_part(g[c]);
  return out;
}

RealField Spectral::divergence(const VectorField& v) const {
  ComplexField acc(grid().size(), cplx{});
  for (int c = 0; c < 3; ++c) {
    const ComplexField vh = fft_forward(v[c]);
    const RealField& k = bank_.k()[c];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += kI * k[i] * vh[i];
  }
  plan_.inverse(acc);
  return real_part(acc);
}

VectorField Spectral::curl(const VectorField& v) const {
  std::array<ComplexField, 3> vh;
  for (int c = 0; c < 3; ++c) vh[c] = fft_forward(v[c]);
  const auto& k = bank_.k();
  VectorField out;
  for (int c = 0; c < 3; ++c) {
    const int a = (c + 1) % 3, b = (c + 2) % 3;
    ComplexField w(vh[0].size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = kI * (k[a][i] * vh[b][i] - k[b][i] * vh[a][i]);
    plan_.inverse(w);
    out[c] = real_part(w);
  }
  return out;
}

double Spectral::divergence_max(const VectorField& v) const {
  std::array<ComplexField, 3> vh;
  for (int c = 0; c < 3; ++c) vh[c] = fft_forward(v[c]);
  const auto& k = bank_.k();
  double best = 0.0;
  for (std::size_t i = 0; i < vh[0].size(); ++i) {
    const cplx d = k[0][i] * vh[0][i] + k[1][i] * vh[1][i] + k[2][i] * vh[2][i];
    best = std::max(best, std::abs(d));
  }
  return best / static_cast<double>(grid().size());
}

void Spectral::leray_project_spectral(std::array<ComplexField, 3>& vh) const {
  for (int c = 0; c < 3; ++c) check_size(vh[c].size());
  const auto& k = bank_.k();
  for (std::size_t i = 0; i < vh[0].size(); ++i) {
    const double kk = k[0][i] * k[0][i] + k[1][i] * k[1][i] + k[2][i] * k[2][i];
    if (kk == 0.0) continue;
    const cplx kv = (k[0][i] * vh[0][i] + k[1][i] * vh[1][i] + k[2][i] * vh[2][i]) / kk;
    for (int c = 0; c < 3; ++c) vh[c][i] -= k[c][i] * kv;
  }
}

VectorField Spectral::leray_project(const VectorField& v) const {
  std::array<ComplexField, 3> vh;
  for (int c = 0; c < 3; ++c) vh[c] = fft_forward(v[c]);
  leray_project_spectral(vh);
  VectorField out;
  for (int c = 0; c < 3; ++c) out[c] = fft_inverse_real(vh[c]);
  return out;
}

void Spectral::dealias_spectral(ComplexField& fh) const {
  check_size(fh.size());
  const auto& mask = bank_.dealias_mask();
  for (std::size_t i = 0; i < fh.size(); ++i)
    if (!mask[i]) fh[i] = cplx{};
}

ComplexField Spectral::dealias(const ComplexField& f) const {
  ComplexField fh = fft_forward(f);
  dealias_spectral(fh);
  plan_.inverse(fh);
  return fh;
}

RealField Spectral::dealias(const RealField& f) const { return real_part(dealias(to_complex(f))); }

double Spectral::band_excess(const ComplexField& f) const {
  const ComplexField fh = fft_forward(f);
  const auto& mask = bank_.dealias_mask();
  double total = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const double e = std::norm(fh[i]);
    total += e;
    if (!mask[i]) outside += e;
  }
  return total > 0.0 ? outside / total : 0.0;
}

double Spectral::band_excess(const RealField& f) const { return band_excess(to_complex(f)); }

SpinorField Spectral::heat_propagate(const SpinorField& psi, double t, double eps) const {
  if (t < 0.0) throw Error(ErrorClass::domain, "heat_propagate: negative time " + std::to_string(t));
  const ComplexField m = bank_.heat(t, eps);
  SpinorField out;
  out.up = apply_multiplier(psi.up, m);
  out.down = apply_multiplier(psi.down, m);
  return out;
}

std::pair<VectorField, VectorField> Spectral::wave_propagate(const VectorField& a0,
                                                             const VectorField& adot0, double t,
                                                             double alpha) const {
  if (!(alpha > 0.0)) throw Error(ErrorClass::config, "wave_propagate: alpha must be positive");
  const RealField cs = bank_.wave_cos(t / alpha);
  const RealField sn = bank_.wave_sinc(t / alpha);
  const RealField& k2 = bank_.k2();
  VectorField a, adot;
  for (int c = 0; c < 3; ++c) {
    const ComplexField ah = fft_forward(a0[c]);
    const ComplexField dh = fft_forward(adot0[c]);
    ComplexField na(ah.size()), nd(ah.size());
    for (std::size_t i = 0; i < ah.size(); ++i) {
      na[i] = cs[i] * ah[i] + alpha * sn[i] * dh[i];
      nd[i] = -(k2[i] / alpha) * sn[i] * ah[i] + cs[i] * dh[i];
    }
    a[c] = fft_inverse_real(na);
    adot[c] = fft_inverse_real(nd);
  }
  return {std::move(a), std::move(adot)};
}

RealField wave_mode_energy(const Spectral& spectral, const VectorField& a, const VectorField& adot,
                           double alpha) {
  const double inv_n = 1.0 / static_cast<double>(spectral.grid().size());
  const RealField& k2 = spectral.bank().k2();
  RealField e(k2.size(), 0.0);
  for (int c = 0; c < 3; ++c) {
    const ComplexField ah = spectral.fft_forward(a[c]);
    const ComplexField dh = spectral.fft_forward(adot[c]);
    for (std::size_t i = 0; i < e.size(); ++i)
      e[i] += (k2[i] * std::norm(ah[i]) + alpha * alpha * std::norm(dh[i])) * inv_n * inv_n;
  }
  return e;
}

}  // namespace mpsim
