#include <cmath>

#include "doctest.h"
#include "mpsim/diagnostics.hpp"
#include "mpsim/dynamics.hpp"
#include "mpsim/error.hpp"
#include "mpsim/pauli.hpp"
#include "test_util.hpp"

using namespace mpsim;
using namespace mpsim::testing;

namespace {

SimParams small_params(double alpha = 1.0, double eps = 0.01) {
  SimParams p;
  p.alpha = alpha;
  p.epsilon = eps;
  p.n = 16;
  p.box_length = 10.0;
  p.Z = 0.0;
  p.t_end = 0.0;
  p.picard_tol = 1e-12;
  return p;
}

SpinorField gaussian(const Model& m, double width = 1.6, Vec3 p = {0.4, 0.0, 0.0}) {
  return make_gaussian_packet(m.grid(), {0.0, 0.0, 0.0}, width, p, {cplx{1, 0}, cplx{0.3, 0.2}});
}

SimState advance(const Model& m, SimState s, int steps) {
  for (int k = 0; k < steps; ++k) s = m.step(s).first;
  return s;
}

double state_distance(const Grid& g, const SimState& a, const SimState& b) {
  return std::max(l2_norm(g, diff(a.psi, b.psi)), std::sqrt(l2_norm_squared(g, a.a) + l2_norm_squared(g, b.a) -
                                                             2.0 * inner(g, a.a, b.a)));
}

}  // namespace

TEST_CASE("model configuration") {
  SimParams p = small_params();
  p.epsilon = 0.0;
  CHECK_THROWS_AS(Model{p}, Error);
  p = small_params();
  p.dt = 10.0;
  try {
    Model m(p);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.error_class() == ErrorClass::config);
    CHECK(std::string(e.what()).find("dt") != std::string::npos);
  }
  p.dt = 0.0;
  const Model m(p);
  CHECK(m.dt() == doctest::Approx(default_dt(p)));
}

TEST_CASE("step inhomogeneity") {
  SUBCASE("free case is the normalization term") {
    const Model m(small_params(1.0, 0.05));
    const SpinorField psi = m.prepare(gaussian(m)).psi;
    const VectorField zero(m.grid().size());
    const SpinorField f = m.rhs_inhomogeneity(psi, zero);
    // T_P[psi, 0] = ||grad psi||^2 from the spectral symbol.
    double t = 0.0;
    for (int c = 0; c < 2; ++c) {
      const ComplexField h = m.spectral().fft_forward(psi[c]);
      for (std::size_t i = 0; i < h.size(); ++i) t += m.spectral().bank().k2()[i] * std::norm(h[i]);
    }
    t *= m.grid().cell_volume() / double(m.grid().size());
    SpinorField expected = psi;
    for (int c = 0; c < 2; ++c)
      for (auto& v : expected[c]) v *= 0.05 * t;
    CHECK(max_abs_diff(f, expected) < 1e-12 * max_abs(expected));
  }
  SUBCASE("vanishes with epsilon in the free case") {
    double prev = 1.0;
    for (double eps : {1e-2, 1e-4, 1e-6}) {
      const Model m(small_params(1.0, eps));
      const SpinorField psi = m.prepare(gaussian(m)).psi;
      const double size = max_abs(m.rhs_inhomogeneity(psi, VectorField(m.grid().size())));
      CHECK(size < prev * 1e-1);
      prev = size;
    }
    CHECK(prev < 1e-5);
  }
  SUBCASE("interaction form is real") {
    SimParams p = small_params();
    p.Z = 1.0;
    p.nucleus = {0.1, 0.2, -0.3};
    const Model m(p);
    const SpinorField psi = m.prepare(smooth_spinor(m.spectral(), 3, 2)).psi;
    const VectorField a = m.regularize(smooth_solenoidal(m.spectral(), 4, 2, 1.0));
    SpinorField inter;
    m.hamiltonian(psi, a, &inter);
    const cplx form = inner(m.grid(), psi, inter);
    CHECK(std::abs(form.imag()) < 1e-10 * std::max(1.0, std::abs(form.real())));
  }
}

TEST_CASE("one step from rest") {
  const Model m([] {
    SimParams p = small_params();
    p.dt = 0.02;
    return p;
  }());
  const SimState s0 = m.prepare(gaussian(m));
  auto [s1, rep] = m.step(s0);
  CHECK(std::abs(l2_norm(m.grid(), s1.psi) - 1.0) < 1e-8);
  CHECK(l2_norm(m.grid(), s1.a_dot) > 0.0);
  CHECK(l2_norm(m.grid(), s1.a) > 0.0);
  CHECK(rep.div_max < 1e-10);
  CHECK(rep.picard_iters >= 2);
  CHECK(rep.picard_residual <= m.params().picard_tol);
  CHECK(s1.time == doctest::Approx(0.02));
}

TEST_CASE("picard budget exhaustion is reported") {
  SimParams p = small_params();
  p.picard_max = 1;
  const Model m(p);
  try {
    m.step(m.prepare(gaussian(m)));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.error_class() == ErrorClass::nonconvergence);
  }
}

TEST_CASE("blowup on non-finite input") {
  const Model m(small_params());
  SimState s = m.prepare(gaussian(m));
  s.psi.up[5] = cplx{std::nan(""), 0.0};
  try {
    m.step(s);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.error_class() == ErrorClass::blowup);
  }
}

TEST_CASE("self-convergence under step halving") {
  // Fixed end time; differences between successive refinements shrink by
  // about 2^2 for the second-order trapezoidal quadrature.
  SimParams p = small_params();
  const Model probe(p);
  const double dt = probe.dt();
  const double t = 8 * dt;
  std::vector<SimState> finals;
  for (int level = 0; level < 3; ++level) {
    p.dt = dt / (1 << level);
    const Model m(p);
    SimState s0 = m.prepare(gaussian(m), smooth_solenoidal(m.spectral(), 5, 2, 0.3));
    finals.push_back(advance(m, s0, static_cast<int>(std::lround(t / p.dt))));
  }
  const Grid g = probe.grid();
  const double d01 = state_distance(g, finals[0], finals[1]);
  const double d12 = state_distance(g, finals[1], finals[2]);
  const double order = std::log2(d01 / d12);
  MESSAGE("observed order " << order);
  CHECK(order > 1.8);
  CHECK(order < 2.3);
}

TEST_CASE("strong dissipation relaxes toward the lowest mode") {
  SimParams p = small_params(1.0, 1.0);
  const Model m(p);
  SimState s = m.prepare(gaussian(m, 1.3, {0.0, 0.0, 0.0}));
  double prev = energy_report(m, s).kinetic;
  const double start = prev;
  for (int k = 0; k < 60; ++k) {
    s = m.step(s).first;
    const EnergyReport r = energy_report(m, s);
    CHECK(r.kinetic <= prev + 1e-12);
    // At eps = 1 the step's O(dt^2) norm error is no longer negligible.
    CHECK(std::abs(r.norm - 1.0) < 5e-4);
    prev = r.kinetic;
  }
  CHECK(prev < 0.1 * start);
}

TEST_CASE("run orchestration") {
  SimParams p = small_params();
  const Model m0(p);
  p.t_end = 6 * m0.dt();
  const Model m(p);
  const SimState s0 = m.prepare(gaussian(m), smooth_solenoidal(m.spectral(), 9, 2, 0.2));

  SUBCASE("nothing to do at t_end = 0") {
    SimParams q = p;
    q.t_end = 0.0;
    const Model mz(q);
    int calls = 0;
    const RunResult r = run(mz, s0, {[&](const Sample&) { ++calls; }});
    CHECK(calls == 0);
    CHECK(r.steps_taken == 0);
    CHECK(max_abs_diff(r.final_state.psi, s0.psi) == 0.0);
  }
  SUBCASE("sampling schedule") {
    std::vector<long> steps;
    const RunResult r = run(m, s0, {[&](const Sample& s) { steps.push_back(s.step); }}, 4);
    CHECK(r.steps_taken == 6);
    CHECK(steps == std::vector<long>{0, 4, 6});
  }
  SUBCASE("deterministic") {
    const RunResult a = run(m, s0, {});
    const RunResult b = run(m, s0, {});
    CHECK(max_abs_diff(a.final_state.psi, b.final_state.psi) == 0.0);
    CHECK(max_abs_diff(a.final_state.a, b.final_state.a) == 0.0);
    CHECK(max_abs_diff(a.final_state.a_dot, b.final_state.a_dot) == 0.0);
    SeriesRecorder rec(m);
    const RunResult c = run(m, s0, {rec.observer()});
    CHECK(rec.series().size() == 7);
    CHECK(max_abs_diff(a.final_state.psi, c.final_state.psi) == 0.0);
    CHECK(max_abs_diff(a.final_state.a, c.final_state.a) == 0.0);
  }
  SUBCASE("invariants along the run at the physical coupling") {
    SimParams q = small_params(1.0 / 137.035999);
    q.t_end = 40 * default_dt(q);
    const Model mp(q);
    SeriesRecorder rec(mp);
    const RunResult r = run(mp, mp.prepare(gaussian(mp)), {rec.observer()});
    const SeriesSummary sum = summarize_series(rec.series());
    CHECK(sum.max_norm_deviation < 1e-6);
    CHECK(sum.energy_monotone);
    CHECK(r.max_div < 1e-9);
  }
  SUBCASE("sample interval must be positive") {
    CHECK_THROWS_AS(run(m, s0, {}, 0), Error);
  }
}
