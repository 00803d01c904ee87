#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mpsim/error.hpp"
#include "mpsim/state.hpp"
#include "test_util.hpp"

using namespace mpsim;
using namespace mpsim::testing;

namespace {

// Radial integral 4 pi int_0^inf r^2 psi0(r)^2 w(r) dr for the continuum
// hydrogen ground state, by double-exponential quadrature.
template <class W>
double hydrogen_moment(double Z, W weight) {
  boost::math::quadrature::exp_sinh<double> q;
  auto f = [&](double r) {
    const double psi = std::pow(Z, 1.5) * std::exp(-0.5 * Z * r) / (2.0 * std::sqrt(2.0 * M_PI));
    return 4.0 * M_PI * r * r * psi * psi * weight(r);
  };
  return q.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

ErrorClass error_class_of(const std::function<void()>& f, std::string* what = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.error_class();
  }
  FAIL("no error thrown");
  return ErrorClass::io;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mpsim_test_" + name);
}

}  // namespace

TEST_CASE("parameter validation names the field") {
  SimParams ok;
  CHECK_NOTHROW(validate(ok));
  std::string what;
  SimParams p = ok;
  p.epsilon = -1.0;
  CHECK(error_class_of([&] { validate(p); }, &what) == ErrorClass::config);
  CHECK(what.find("epsilon") != std::string::npos);
  p = ok;
  p.alpha = 0.0;
  error_class_of([&] { validate(p); }, &what);
  CHECK(what.find("alpha") != std::string::npos);
  p = ok;
  p.nucleus = {0.0, 0.0, ok.box_length};
  error_class_of([&] { validate(p); }, &what);
  CHECK(what.find("nucleus") != std::string::npos);
  p = ok;
  p.n = 24;
  error_class_of([&] { validate(p); }, &what);
  CHECK(what.find("n:") == 0);
}

TEST_CASE("default step") {
  SimParams p;
  p.alpha = 1.0;
  p.epsilon = 0.01;
  p.n = 32;
  p.box_length = 16.0;
  const double h = 0.5;
  CHECK(default_dt(p) == doctest::Approx(std::min(h / M_PI, 0.5 * h * h / 1.01)));
  p.alpha = 0.01;
  CHECK(default_dt(p) == doctest::Approx(0.01 * h / M_PI));
}

TEST_CASE("hydrogen ground state") {
  const Grid g(64, 40.0);
  // The exact state is normalized in the continuum.
  CHECK(hydrogen_moment(1.0, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));

  SUBCASE("discrete norm before renormalization") {
    double raw_offset = 0.0, raw_centred = 0.0;
    const double h = g.spacing();
    const SpinorField offset = make_hydrogen_ground_state(g, 1.0, {0.25 * h, 0.25 * h, 0.25 * h}, &raw_offset);
    make_hydrogen_ground_state(g, 1.0, {0, 0, 0}, &raw_centred);
    // Off-node placement samples the cusp symmetrically enough for 1e-4;
    // a nucleus on a grid node overweights the cusp by about 8e-4.
    CHECK(std::abs(raw_offset - 1.0) < 1e-4);
    CHECK(std::abs(raw_centred - 1.0) < 1e-3);
    CHECK(l2_norm(g, offset) == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("spin up with the exact profile shape") {
    double raw = 0.0;
    const SpinorField psi = make_hydrogen_ground_state(g, 1.0, {0, 0, 0}, &raw);
    const int c = g.n() / 2;
    const double scale = raw;
    CHECK(psi.up[g.index(c, c, c)].real() * scale == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0 * M_PI))));
    CHECK(psi.up[g.index(c + 4, c, c)].real() * scale ==
          doctest::Approx(std::exp(-0.5 * 4 * g.spacing()) / (2.0 * std::sqrt(2.0 * M_PI))));
    CHECK(max_abs(psi.down) == 0.0);
  }
  SUBCASE("tail mass outside the inscribed ball") {
    // Closed form: int_R^inf x^2 e^{-x} dx / 2 with x = Z r.
    for (double Z : {1.0, 2.0}) {
      const double x = 0.5 * Z * g.length();
      CHECK(hydrogen_tail_mass(g, Z) == doctest::Approx(std::exp(-x) * (x * x + 2 * x + 2) / 2).epsilon(1e-10));
    }
    CHECK(hydrogen_tail_mass(g, 1.0) > 1e-8);
    CHECK(hydrogen_tail_mass(Grid(64, 60.0), 1.0) < 1e-8);
  }
  CHECK(error_class_of([&] { make_hydrogen_ground_state(g, 0.0); }) == ErrorClass::config);
}

TEST_CASE("gaussian packet") {
  const Grid g(32, 16.0);
  Spectral s(g);
  const double w = 1.3;
  const Vec3 centre{0.7, -1.1, 0.4};
  const Vec3 p{0.8, 0.0, -0.5};
  const SpinorField psi = make_gaussian_packet(g, centre, w, p, {cplx{1, 0}, cplx{0, 1}});
  CHECK(l2_norm(g, psi) == doctest::Approx(1.0).epsilon(1e-13));

  const RealField rho = density(psi);
  for (int c = 0; c < 3; ++c) {
    RealField xr(g.size());
    for (int i = 0; i < g.n(); ++i)
      for (int j = 0; j < g.n(); ++j)
        for (int l = 0; l < g.n(); ++l) {
          const int idx[3] = {i, j, l};
          const std::size_t at = g.index(i, j, l);
          xr[at] = g.coord(idx[c]) * rho[at];
        }
    CHECK(std::abs(integrate(g, xr) - centre[c]) < 1e-8);
  }

  // <p> and <p^2> through spectral derivatives.
  double kinetic = 0.0;
  for (int sp = 0; sp < 2; ++sp) {
    const auto grad = s.gradient(psi[sp]);
    for (int c = 0; c < 3; ++c) {
      ComplexField prod(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) prod[i] = std::conj(psi[sp][i]) * cplx{0, -1} * grad[c][i];
      double re = 0.0;
      for (const auto& v : prod) re += v.real();
      re *= g.cell_volume();
      if (sp == 0) {
        const auto grad_d = s.gradient(psi.down);
        double rd = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) rd += (std::conj(psi.down[i]) * cplx{0, -1} * grad_d[c][i]).real();
        CHECK(std::abs(re + rd * g.cell_volume() - p[c]) < 1e-6);
      }
      kinetic += l2_norm_squared(g, grad[c]);
    }
  }
  const double p2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
  CHECK(kinetic == doctest::Approx(1.5 / (w * w) + p2).epsilon(1e-8));

  const SpinorField still = make_gaussian_packet(g, {0, 0, 0}, w, {0, 0, 0}, {cplx{1, 0}, cplx{0, 0}});
  const auto grad = s.gradient(still.up);
  for (int c = 0; c < 3; ++c) {
    double re = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) re += (std::conj(still.up[i]) * cplx{0, -1} * grad[c][i]).real();
    CHECK(std::abs(re * g.cell_volume()) < 1e-10);
  }

  std::string what;
  CHECK(error_class_of([&] { make_gaussian_packet(g, {0, 0, 0}, 0.9, {0, 0, 0}, {cplx{1, 0}, cplx{0, 0}}); },
                       &what) == ErrorClass::config);
  CHECK(what.find("width") != std::string::npos);
}

TEST_CASE("torus coulomb potential") {
  const Grid g(64, 40.0);
  const double h = g.spacing();

  SUBCASE("published cubic lattice constant") {
    // Mean-zero periodic Green's function of the unit cube: 1/r - 2.837297... + O(r^2).
    CHECK(cubic_green_constant() == doctest::Approx(-2.837297479481).epsilon(1e-11));
  }
  SUBCASE("zero charge gives zero potential") {
    const CoulombPotential v = make_coulomb(g, 0.0, {0, 0, 0});
    CHECK(max_abs(v.values) == 0.0);
  }
  SUBCASE("linear in Z with zero mean") {
    const Vec3 r{0.3 * h, -0.2 * h, 0.1 * h};
    const CoulombPotential v1 = make_coulomb(g, 1.0, r);
    const CoulombPotential v3 = make_coulomb(g, 3.0, r);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(v3.values[i] - 3.0 * v1.values[i]));
    CHECK(worst < 1e-12 * max_abs(v3.values));
    CHECK(std::abs(integrate(g, v1.values)) < 1e-10 * g.volume() * max_abs(v1.values));
  }
  SUBCASE("minimum at the grid point nearest the nucleus") {
    const Vec3 r{2.3, -4.1, 0.6};
    const CoulombPotential v = make_coulomb(g, 1.0, r);
    const auto it = std::min_element(v.values.begin(), v.values.end());
    const std::size_t at = static_cast<std::size_t>(it - v.values.begin());
    const int i = at / (g.n() * g.n()), j = (at / g.n()) % g.n(), l = at % g.n();
    const Vec3 d = minimum_image(g, {g.coord(i), g.coord(j), g.coord(l)}, r);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(d[c]) <= 0.5 * h + 1e-12);
  }
  SUBCASE("shifted potential is nonpositive") {
    const CoulombPotential v = make_coulomb(g, 1.0, {0, 0, 0});
    double top = -1e300;
    for (double x : v.values) top = std::max(top, x - v.mean_shift);
    CHECK(top < 0.0);
  }
  SUBCASE("hydrogen coulomb energy") {
    const double inv_r = hydrogen_moment(1.0, [](double r) { return 1.0 / r; });
    CHECK(inv_r == doctest::Approx(0.5).epsilon(1e-12));
    const Vec3 r{0.25 * h, 0.25 * h, 0.25 * h};
    const CoulombPotential v = make_coulomb(g, 1.0, r);
    const SpinorField psi = make_hydrogen_ground_state(g, 1.0, r);
    const double continuum = v.continuum_expectation(g, psi);
    CHECK(v.expectation(g, psi) + v.shift_correction(g, psi) == doctest::Approx(continuum));
    CHECK(continuum == doctest::Approx(-inv_r).epsilon(2e-2));
    // The raw torus value differs by about the mean shift.
    CHECK(std::abs(v.expectation(g, psi) - continuum - v.mean_shift) < 0.01);
  }
}

TEST_CASE("random gauge field") {
  const Grid g(16, 8.0);
  Spectral s(g);
  const VectorField a = make_random_gauge_field(s, 42, 0.7, 2);
  const VectorField b = make_random_gauge_field(s, 42, 0.7, 2);
  const VectorField c = make_random_gauge_field(s, 43, 0.7, 2);
  CHECK(max_abs_diff(a, b) == 0.0);
  CHECK(max_abs_diff(a, c) > 0.0);
  CHECK(l2_norm(g, a) == doctest::Approx(0.7).epsilon(1e-13));
  CHECK(s.divergence_max(a) < 1e-14);
  CHECK(s.band_excess(a[0]) < 1e-28);
  CHECK(error_class_of([&] { make_random_gauge_field(s, 1, 1.0, 6); }) == ErrorClass::config);
}

TEST_CASE("prepared states satisfy the state invariants") {
  const Grid g(16, 8.0);
  Spectral s(g);
  const SimState st = prepare_state(s, random_spinor(g.size(), 3), random_vector(g.size(), 4),
                                    random_vector(g.size(), 7), 0.5);
  CHECK(l2_norm(g, st.psi) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(s.band_excess(st.psi.up) < 1e-28);
  CHECK(s.divergence_max(st.a) < 1e-10);
  CHECK(s.divergence_max(st.a_dot) < 1e-10);
  CHECK(st.time == 0.5);
  const SimState empty = prepare_state(s, random_spinor(g.size(), 3));
  CHECK(max_abs(empty.a) == 0.0);
  CHECK(empty.a_dot.size() == g.size());
}

TEST_CASE("checkpoint round trip") {
  const Grid g(8, 5.0);
  Spectral s(g);
  SimParams p;
  p.n = 8;
  p.box_length = 5.0;
  p.alpha = 0.25;
  p.epsilon = 0.03;
  p.Z = 1.5;
  const SimState st = prepare_state(s, random_spinor(g.size(), 1), random_vector(g.size(), 2),
                                    random_vector(g.size(), 5), 1.625);
  const auto path = temp_path("ckpt.bin");
  write_checkpoint(path, p, st);
  const Checkpoint back = read_checkpoint(path);
  CHECK(back.n == 8);
  CHECK(back.box_length == 5.0);
  CHECK(back.alpha == 0.25);
  CHECK(back.epsilon == 0.03);
  CHECK(back.Z == 1.5);
  CHECK(back.state.time == 1.625);
  CHECK(max_abs_diff(back.state.psi, st.psi) == 0.0);
  CHECK(max_abs_diff(back.state.a, st.a) == 0.0);
  CHECK(max_abs_diff(back.state.a_dot, st.a_dot) == 0.0);

  std::ifstream is(path, std::ios::binary);
  char magic[6];
  is.read(magic, 6);
  CHECK(std::string(magic, 6) == "MPSIM1");
  const auto expected_size = 6 + 3 * 4 + 5 * 8 + (4 + 6) * 8 * g.size();
  CHECK(std::filesystem::file_size(path) == expected_size);

  {
    std::ofstream bad(path, std::ios::binary);
    bad << "NOTSIM";
  }
  CHECK(error_class_of([&] { read_checkpoint(path); }) == ErrorClass::io);
  std::filesystem::remove(path);
  CHECK(error_class_of([&] { read_checkpoint(path); }) == ErrorClass::io);
}
