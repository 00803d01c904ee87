#include "mpsim/pauli.hpp"

#include <cmath>
#include <sstream>

#include "mpsim/error.hpp"

namespace mpsim {

namespace {

constexpr cplx kI{0.0, 1.0};

// grad[s][c] = d_c psi_s
using SpinorGradient = std::array<std::array<ComplexField, 3>, 2>;

SpinorGradient spinor_gradient(const Spectral& spectral, const SpinorField& psi) {
  return {spectral.gradient(psi.up), spectral.gradient(psi.down)};
}

// sigma.v applied to (u, d) for a complex 3-vector v acting per component:
// up = v_x d - i v_y d + v_z u, down = v_x u + i v_y u - v_z d.
SpinorField sigma_dot_pi_from(const SpinorGradient& g, const SpinorField& psi, const VectorField& a) {
  const std::size_t size = psi.size();
  SpinorField out(size);
  for (std::size_t i = 0; i < size; ++i) {
    const cplx u = psi.up[i], d = psi.down[i];
    // pi_c psi = -i d_c psi + a_c psi
    const cplx pux = -kI * g[0][0][i] + a[0][i] * u, pdx = -kI * g[1][0][i] + a[0][i] * d;
    const cplx puy = -kI * g[0][1][i] + a[1][i] * u, pdy = -kI * g[1][1][i] + a[1][i] * d;
    const cplx puz = -kI * g[0][2][i] + a[2][i] * u, pdz = -kI * g[1][2][i] + a[2][i] * d;
    out.up[i] = pdx - kI * pdy + puz;
    out.down[i] = pux + kI * puy - pdz;
  }
  return out;
}

SpinorField dealias(const Spectral& spectral, const SpinorField& psi) {
  SpinorField out;
  out.up = spectral.dealias(psi.up);
  out.down = spectral.dealias(psi.down);
  return out;
}

}  // namespace

const std::array<Mat2, 3>& pauli_matrices() {
  static const std::array<Mat2, 3> sigma{
      Mat2{{{cplx{0, 0}, cplx{1, 0}}, {cplx{1, 0}, cplx{0, 0}}}},
      Mat2{{{cplx{0, 0}, cplx{0, -1}}, {cplx{0, 1}, cplx{0, 0}}}},
      Mat2{{{cplx{1, 0}, cplx{0, 0}}, {cplx{0, 0}, cplx{-1, 0}}}},
  };
  return sigma;
}

Mat2 mat_mul(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

VectorField spin_density(const SpinorField& psi) {
  VectorField s(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const cplx ud = std::conj(psi.up[i]) * psi.down[i];
    s[0][i] = 2.0 * ud.real();
    s[1][i] = 2.0 * ud.imag();
    s[2][i] = std::norm(psi.up[i]) - std::norm(psi.down[i]);
  }
  return s;
}

void require_coulomb_gauge(const Spectral& spectral, const VectorField& a, double tol) {
  const double d = spectral.divergence_max(a);
  if (!(d <= tol)) {
    std::ostringstream msg;
    msg << "vector potential violates the Coulomb gauge: spectral divergence max " << d
        << " exceeds " << tol;
    throw Error(ErrorClass::gauge, msg.str());
  }
}

SpinorField sigma_dot_pi(const Spectral& spectral, const SpinorField& psi, const VectorField& a) {
  return sigma_dot_pi_from(spinor_gradient(spectral, psi), psi, a);
}

SpinorField apply_hamiltonian(const Spectral& spectral, const SpinorField& psi, const VectorField& a,
                              const RealField* potential, SpinorField* interaction, double* discarded) {
  const std::size_t size = psi.size();
  const RealField& k2 = spectral.bank().k2();
  const auto& kd = spectral.bank().k();
  const VectorField b = spectral.curl(a);

  std::array<ComplexField, 2> hat{spectral.fft_forward(psi.up), spectral.fft_forward(psi.down)};
  SpinorGradient g;
  for (int s = 0; s < 2; ++s) {
    for (int c = 0; c < 3; ++c) {
      ComplexField& gc = g[s][c];
      gc.resize(size);
      for (std::size_t i = 0; i < size; ++i) gc[i] = kI * kd[c][i] * hat[s][i];
      spectral.plan().inverse(gc);
    }
  }

  SpinorField prod(size);
  for (std::size_t i = 0; i < size; ++i) {
    const cplx u = psi.up[i], d = psi.down[i];
    const double ax = a[0][i], ay = a[1][i], az = a[2][i];
    const double a2 = ax * ax + ay * ay + az * az;
    // 2 A.p psi = -2i A.grad psi
    cplx pu = -2.0 * kI * (ax * g[0][0][i] + ay * g[0][1][i] + az * g[0][2][i]);
    cplx pd = -2.0 * kI * (ax * g[1][0][i] + ay * g[1][1][i] + az * g[1][2][i]);
    double scalar = a2;
    if (potential) scalar += (*potential)[i];
    pu += scalar * u;
    pd += scalar * d;
    const double bx = b[0][i], by = b[1][i], bz = b[2][i];
    pu += bz * u + cplx{bx, -by} * d;
    pd += cplx{bx, by} * u - bz * d;
    prod.up[i] = pu;
    prod.down[i] = pd;
  }

  SpinorField out;
  const auto& mask = spectral.bank().dealias_mask();
  double kept = 0.0, dropped = 0.0;
  for (int s = 0; s < 2; ++s) {
    ComplexField ph = spectral.fft_forward(prod[s]);
    if (discarded) {
      for (std::size_t i = 0; i < size; ++i) (mask[i] ? kept : dropped) += std::norm(ph[i]);
    }
    spectral.dealias_spectral(ph);
    if (interaction) (*interaction)[s] = spectral.fft_inverse(ph);
    for (std::size_t i = 0; i < size; ++i) ph[i] += k2[i] * hat[s][i];
    spectral.plan().inverse(ph);
    out[s] = std::move(ph);
  }
  if (discarded) *discarded = kept + dropped > 0.0 ? dropped / (kept + dropped) : 0.0;
  return out;
}

SpinorField pauli_op_apply(const Spectral& spectral, const SpinorField& psi, const VectorField& a) {
  require_coulomb_gauge(spectral, a);
  return apply_hamiltonian(spectral, psi, a);
}

SpinorField pauli_op_apply_composed(const Spectral& spectral, const SpinorField& psi,
                                    const VectorField& a) {
  require_coulomb_gauge(spectral, a);
  const SpinorField once = dealias(spectral, sigma_dot_pi(spectral, psi, a));
  return dealias(spectral, sigma_dot_pi(spectral, once, a));
}

VectorField pauli_current(const Spectral& spectral, const SpinorField& psi, const VectorField& a,
                          double alpha) {
  require_coulomb_gauge(spectral, a);
  const SpinorField q = sigma_dot_pi(spectral, psi, a);
  VectorField j(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const cplx u = psi.up[i], d = psi.down[i];
    // Re<sigma_c psi, q> with sigma_x psi = (d, u), sigma_y psi = (-i d, i u), sigma_z psi = (u, -d)
    const cplx cx = std::conj(d) * q.up[i] + std::conj(u) * q.down[i];
    const cplx cy = std::conj(-kI * d) * q.up[i] + std::conj(kI * u) * q.down[i];
    const cplx cz = std::conj(u) * q.up[i] - std::conj(d) * q.down[i];
    j[0][i] = -2.0 * alpha * cx.real();
    j[1][i] = -2.0 * alpha * cy.real();
    j[2][i] = -2.0 * alpha * cz.real();
  }
  for (int c = 0; c < 3; ++c) j[c] = spectral.dealias(j[c]);
  return j;
}

VectorField pauli_current_decomposed(const Spectral& spectral, const SpinorField& psi,
                                     const VectorField& a, double alpha) {
  const SpinorGradient g = spinor_gradient(spectral, psi);
  const VectorField curl_s = spectral.curl(spin_density(psi));
  VectorField j(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const cplx u = psi.up[i], d = psi.down[i];
    const double rho = std::norm(u) + std::norm(d);
    for (int c = 0; c < 3; ++c) {
      // Re<psi, -i d_c psi> = Im(conj(psi) d_c psi)
      const double im = (std::conj(u) * g[0][c][i] + std::conj(d) * g[1][c][i]).imag();
      j[c][i] = -2.0 * alpha * (im + a[c][i] * rho) - alpha * curl_s[c][i];
    }
  }
  for (int c = 0; c < 3; ++c) j[c] = spectral.dealias(j[c]);
  return j;
}

}  // namespace mpsim
