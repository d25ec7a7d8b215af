#include "heisencorr/propagator.hpp"

#include "support.hpp"

#include <unsupported/Eigen/MatrixFunctions>

using namespace heisencorr;

namespace {

// Dense H0 + A p_z + A^2/2 on a tiny grid, channel-major like WaveState::coeffs.
struct DenseModel {
  Eigen::MatrixXcd h0, pz;
  Eigen::Index dim;

  explicit DenseModel(const Propagator& prop) {
    const RadialGrid& g = prop.grid();
    const Eigen::Index n = g.points();
    dim = n * g.channels();
    h0 = Eigen::MatrixXcd::Zero(dim, dim);
    for (int l = 0; l < g.channels(); ++l)
      h0.block(l * n, l * n, n, n) = radial_hamiltonian(g, prop.potential(), l).dense().cast<cdouble>();
    pz.resize(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
      WaveState e(g);
      e.coeffs(k % n, k / n) = 1.0;
      const WaveState col = apply_pz(e, prop.derivative());
      pz.col(k) = Eigen::Map<const Eigen::VectorXcd>(col.coeffs.data(), dim);
    }
  }

  Eigen::MatrixXcd h(double a) const {
    return h0 + a * pz + Eigen::MatrixXcd::Identity(dim, dim) * (0.5 * a * a);
  }

  // Fourth-order Magnus integrator with fine steps.
  Eigen::VectorXcd evolve(const Propagator& prop, Eigen::VectorXcd psi, double t0, double t1, int steps) const {
    const double h = (t1 - t0) / steps;
    const double off = std::sqrt(3.0) / 6.0;
    for (int k = 0; k < steps; ++k) {
      const double mid = t0 + (k + 0.5) * h;
      const Eigen::MatrixXcd m1 = cdouble(0, -1) * this->h(prop.vector_potential_at(mid - off * h));
      const Eigen::MatrixXcd m2 = cdouble(0, -1) * this->h(prop.vector_potential_at(mid + off * h));
      const Eigen::MatrixXcd omega = 0.5 * h * (m1 + m2) + (std::sqrt(3.0) / 12.0) * h * h * (m2 * m1 - m1 * m2);
      psi = omega.exp() * psi;
    }
    return psi;
  }
};

WaveState smooth_mixture(const RadialGrid& grid) {
  WaveState s(grid);
  const Eigen::VectorXd r = grid.radii();
  for (Eigen::Index i = 0; i < s.points(); ++i) {
    s.coeffs(i, 0) = std::exp(-(r(i) - 3.5) * (r(i) - 3.5));
    s.coeffs(i, 1) = cdouble(0.3, 0.2) * std::exp(-0.8 * (r(i) - 3.2) * (r(i) - 3.2));
  }
  s.coeffs /= std::sqrt(norm_squared(s));
  return s;
}

double dense_error(const Propagator& prop, const DenseModel& dense, double dt) {
  WaveState s = smooth_mixture(prop.grid());
  s.time = 1.0;
  const Eigen::VectorXcd start = Eigen::Map<const Eigen::VectorXcd>(s.coeffs.data(), dense.dim);
  const Eigen::VectorXcd exact = dense.evolve(prop, start, 1.0, 2.0, 400);
  prop.advance(s, 2.0, dt);
  return (Eigen::Map<const Eigen::VectorXcd>(s.coeffs.data(), dense.dim) - exact).norm();
}

}  // namespace

TEST_CASE("split-step propagator converges to the dense solution at its nominal order") {
  // Smooth potential, state kept off the origin: the coupling there excites
  // grid-scale modes whose phase the step cannot resolve.
  const RadialGrid grid = RadialGrid::from_extent(0.25, 8.0, 2, 0.0);
  const PulseParams pulse{0.4, 1.0, 1.0};
  for (int order : {2, 4}) {
    CAPTURE(order);
    const Propagator prop(grid, PotentialSpec::harmonic(1.0), pulse, {order, false});
    const DenseModel dense(prop);
    const double e1 = dense_error(prop, dense, 0.025);
    const double e2 = dense_error(prop, dense, 0.0125);
    MESSAGE("errors ", e1, " ", e2);
    const double rate = std::log2(e1 / e2);
    CHECK(e2 < (order == 2 ? 2e-2 : 3e-4));
    CHECK(rate > order - 0.3);
    CHECK(rate < order + 0.5);
  }
}

TEST_CASE("norm is conserved with the absorber off") {
  const RadialGrid grid = hc_test::small_grid(4);
  const Propagator prop(grid, PotentialSpec::coulomb(1.0), PulseParams{0.06, 0.057, 1.0}, {2, false});
  WaveState s = hc_test::random_state(grid, 7);
  prop.advance(s, 30.0, 0.02);
  CHECK(std::abs(norm_squared(s) - 1.0) <= 1e-10);
}

TEST_CASE("retreat undoes advance") {
  const RadialGrid grid = hc_test::small_grid(4);
  for (int order : {2, 4}) {
    const Propagator prop(grid, PotentialSpec::coulomb(1.0), PulseParams{0.06, 0.057, 1.0}, {order, false});
    WaveState start = hc_test::random_state(grid, 3);
    start.time = 20.0;
    WaveState s = start;
    prop.advance(s, 27.3, 0.02);
    CHECK(s.time == 27.3);
    prop.retreat(s, 20.0, 0.02);
    CHECK(s.time == 20.0);
    CHECK((s.coeffs - start.coeffs).norm() < 1e-11);
  }
}

TEST_CASE("ground state is stationary with the global phase exp(-i E t)") {
  const EigenResult& g = hc_test::small_hydrogen();
  const PulseParams pulse{0.0, 0.057, 1.0};
  const double t_end = pulse.duration();
  const Propagator prop(g.state.grid, PotentialSpec::coulomb(1.0), std::nullopt, {4, false});
  WaveState s = g.state;
  prop.advance(s, t_end, 0.02);
  const cdouble overlap = inner(g.state, s);
  CHECK(std::abs(std::abs(overlap) - 1.0) <= 1e-8);
  CHECK(std::abs(overlap - std::polar(1.0, -g.energy * t_end)) <= 1e-6);
}

TEST_CASE("zero field amplitude reproduces the field-free propagation bit for bit") {
  const RadialGrid grid = hc_test::small_grid(3, 40.0, 0.2);
  const Propagator with(grid, PotentialSpec::coulomb(1.0), PulseParams{0.0, 0.057, 1.0});
  const Propagator without(grid, PotentialSpec::coulomb(1.0), std::nullopt);
  WaveState a = hc_test::random_state(grid, 9), b = a;
  with.advance(a, 15.0, 0.02);
  without.advance(b, 15.0, 0.02);
  CHECK(a.coeffs == b.coeffs);
}

TEST_CASE("absorber removes an outgoing packet") {
  const RadialGrid grid = hc_test::small_grid(0, 40.0, 0.25);
  WaveState s(grid);
  const Eigen::VectorXd r = grid.radii();
  for (Eigen::Index i = 0; i < s.points(); ++i)
    s.coeffs(i, 0) = std::exp(-(r(i) - 15.0) * (r(i) - 15.0) / 16.0) * std::polar(1.0, 3.0 * r(i));
  s.coeffs /= std::sqrt(norm_squared(s));
  const Propagator prop(grid, PotentialSpec::free(), std::nullopt);
  prop.advance(s, 25.0, 0.02);
  MESSAGE("norm left ", norm_squared(s));
  CHECK(norm_squared(s) < 1e-3);
}

TEST_CASE("propagator argument checks") {
  const RadialGrid grid = hc_test::small_grid(2);
  CHECK_THROWS_AS(Propagator(grid, PotentialSpec::coulomb(1.0), std::nullopt, {3, true}), std::invalid_argument);
  const Propagator prop(grid, PotentialSpec::coulomb(1.0), std::nullopt);
  WaveState s(grid, 5.0);
  CHECK_THROWS_AS(prop.advance(s, 4.0, 0.02), std::invalid_argument);
  CHECK_THROWS_AS(prop.retreat(s, 6.0, 0.02), std::invalid_argument);
  CHECK_THROWS_AS(prop.advance(s, 6.0, 0.0), std::invalid_argument);
  WaveState other(hc_test::small_grid(3));
  CHECK_THROWS_AS(prop.advance(other, 1.0, 0.02), std::invalid_argument);
}
