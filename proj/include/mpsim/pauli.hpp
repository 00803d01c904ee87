#pragma once

#include <array>

#include "mpsim/grid.hpp"
#include "mpsim/spectral.hpp"

namespace mpsim {

using Mat2 = std::array<std::array<cplx, 2>, 2>;

/// sigma_1, sigma_2, sigma_3 in the standard representation.
const std::array<Mat2, 3>& pauli_matrices();

Mat2 mat_mul(const Mat2& a, const Mat2& b);

/// Pointwise <psi, sigma psi>.
VectorField spin_density(const SpinorField& psi);

/// Throws a gauge error when the spectral divergence max of `a` exceeds tol.
void require_coulomb_gauge(const Spectral& spectral, const VectorField& a, double tol = 1e-8);

/// sigma.(p + A) psi with p = -i grad, products taken pointwise (not dealiased).
SpinorField sigma_dot_pi(const Spectral& spectral, const SpinorField& psi, const VectorField& a);

/// [sigma.(p+A)]^2 psi via (-Lap + 2A.p + |A|^2 + sigma.curl A) psi.  When
/// `potential` is non-null, V psi is added.  The sum of products is dealiased
/// once; the Laplacian term is exact.  `interaction` receives the dealiased
/// products alone (H psi + Lap psi) and `discarded` the fraction of their
/// spectral energy removed by dealiasing.
SpinorField apply_hamiltonian(const Spectral& spectral, const SpinorField& psi, const VectorField& a,
                              const RealField* potential = nullptr, SpinorField* interaction = nullptr,
                              double* discarded = nullptr);

/// Checked expansion path of the Pauli operator.
SpinorField pauli_op_apply(const Spectral& spectral, const SpinorField& psi, const VectorField& a);

/// The same operator evaluated as sigma.(p+A) applied twice, each pass dealiased.
SpinorField pauli_op_apply_composed(const Spectral& spectral, const SpinorField& psi,
                                    const VectorField& a);

/// -2 alpha Re<sigma psi, sigma.(p+A) psi>, dealiased.
VectorField pauli_current(const Spectral& spectral, const SpinorField& psi, const VectorField& a,
                          double alpha);

/// J_S - alpha curl <psi, sigma psi> with J_S = -2 alpha Re<psi, (p+A) psi>,
/// dealiased.  No gauge check; the stepper calls this every iterate.
VectorField pauli_current_decomposed(const Spectral& spectral, const SpinorField& psi,
                                     const VectorField& a, double alpha);

}  // namespace mpsim
