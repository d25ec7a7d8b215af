#include "heisencorr/correlation.hpp"
#include "heisencorr/compare.hpp"
#include "heisencorr/errors.hpp"
#include "heisencorr/oracles.hpp"

#include "support.hpp"

using namespace heisencorr;

namespace {

const PulseParams kFastPulse{0.1, 0.5, 1.0};  // 12.6 a.u. long

double max_shift_defect(const Eigen::MatrixXcd& c) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i + 1 < c.rows(); ++i)
    for (Eigen::Index j = 0; j + 1 < c.cols(); ++j) worst = std::max(worst, std::abs(c(i, j) - c(i + 1, j + 1)));
  return worst;
}

}  // namespace

TEST_CASE("field-free correlation is stationary with <z^2> on the diagonal") {
  const EigenResult& g = hc_test::small_hydrogen();
  const Propagator prop(g.state.grid, PotentialSpec::coulomb(1.0), std::nullopt);
  const TimeGrid tgrid{12, 40.0};
  const CorrelationMatrix c = correlation_tdse(g.state, prop, tgrid, Observable::z);
  CHECK(c.source == CorrelationSource::free);
  CHECK(max_shift_defect(c.values) <= 1e-3);
  for (int k = 0; k < tgrid.n_t; ++k) CHECK(std::abs(c.values(k, k) - 1.0) <= 1e-3);
  const MeanTrajectory zbar = mean_trajectory(g.state, prop, tgrid, Observable::z);
  CHECK(zbar.q_bar.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("both triangles agree with Hermitian conjugation") {
  const RadialGrid grid = hc_test::small_grid(6);
  const EigenResult& g = hc_test::small_hydrogen();
  WaveState start(grid);
  start.coeffs.col(0) = g.state.coeffs.col(0);
  const Propagator prop(grid, PotentialSpec::coulomb(1.0), kFastPulse, {2, false});
  CorrelationOptions opts;
  opts.both_triangles = true;
  const CorrelationMatrix c = correlation_tdse(start, prop, TimeGrid::over_pulse(kFastPulse, 8), Observable::z, opts);
  CHECK(c.meta.at("lower_triangle") == "repropagated");
  CHECK(hermitian_defect(c.values) <= 1e-6);
}

TEST_CASE("row parallelism does not change the result") {
  const RadialGrid grid = hc_test::small_grid(4);
  WaveState start(grid);
  start.coeffs.col(0) = hc_test::small_hydrogen().state.coeffs.col(0);
  const Propagator prop(grid, PotentialSpec::coulomb(1.0), kFastPulse);
  const TimeGrid tgrid = TimeGrid::over_pulse(kFastPulse, 9);
  CorrelationOptions one, three;
  three.jobs = 3;
  const auto a = correlation_tdse(start, prop, tgrid, Observable::z, one);
  const auto b = correlation_tdse(start, prop, tgrid, Observable::z, three);
  CHECK(a.values == b.values);
}

TEST_CASE("free electron in a pulse follows the Volkov solution") {
  const RadialGrid grid = RadialGrid::from_extent(0.1, 60.0, 8, 0.0);
  const EigenResult g = build_ground_state(grid, PotentialSpec::coulomb(1.0));
  const Propagator prop(grid, PotentialSpec::free(), kFastPulse, {2, false});
  const TimeGrid tgrid = TimeGrid::over_pulse(kFastPulse, 9);

  const MeanTrajectory zbar = mean_trajectory(g.state, prop, tgrid, Observable::z);
  const MeanTrajectory vbar = mean_trajectory(g.state, prop, tgrid, Observable::velocity);
  for (int k = 0; k < tgrid.n_t; ++k) {
    CHECK(std::abs(zbar.q_bar(k) - excursion_integral(kFastPulse, tgrid.t(k))) <= 1e-4);
    CHECK(std::abs(vbar.q_bar(k) - vector_potential(kFastPulse, tgrid.t(k))) <= 1e-4);
  }

}

TEST_CASE("free Gaussian packet in a pulse has the Volkov correlation") {
  // The 1s momentum tail reaches the wall of any small box; a Gaussian's does not.
  const RadialGrid grid = RadialGrid::from_extent(0.1, 80.0, 8, 0.0);
  WaveState start(grid);
  const Eigen::VectorXd r = grid.radii();
  start.coeffs.col(0) = (r.array() * (-0.5 * r.array().square()).exp()).cast<cdouble>();
  start.coeffs /= std::sqrt(norm_squared(start));
  const Propagator prop(grid, PotentialSpec::free(), kFastPulse, {2, false});
  const TimeGrid tgrid = TimeGrid::over_pulse(kFastPulse, 9);
  const CorrelationMatrix c = correlation_tdse(start, prop, tgrid, Observable::z);
  const SecondMoments gaussian{0.5, cdouble(0.0, 0.5), cdouble(0.0, -0.5), 0.5};
  CHECK(max_relative_error(c, volkov_matrix(gaussian, tgrid)) <= 1e-3);
}

TEST_CASE("oscillator correlation matches the closed form") {
  const RadialGrid grid = RadialGrid::from_extent(0.1, 20.0, 2, 0.0);
  const EigenResult g = build_ground_state(grid, PotentialSpec::harmonic(1.0));
  const Propagator prop(grid, PotentialSpec::harmonic(1.0), std::nullopt, {4, false});
  const TimeGrid tgrid{10, 12.0};
  const CorrelationMatrix c = correlation_tdse(g.state, prop, tgrid, Observable::z);
  const CorrelationMatrix oracle = ho_matrix(1.0, tgrid);
  CHECK((c.values - oracle.values).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("mixed derivative of a bilinear correlation is exact") {
  const TimeGrid tgrid{17, 30.0};
  const CorrelationMatrix zz = volkov_matrix(hydrogen_1s_moments(), tgrid);
  const CorrelationMatrix vv = velocity_from_zz(zz);
  CHECK(vv.kind == CorrelationKind::vv);
  CHECK((vv.values.array() - 1.0 / 3.0).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("time derivative matrix is exact on quadratics") {
  const TimeGrid tgrid{9, 4.0};
  const Eigen::MatrixXd d = time_derivative_matrix(tgrid);
  const Eigen::VectorXd t = tgrid.times();
  const Eigen::VectorXd f = (3.0 * t.array().square() - t.array() + 2.0).matrix();
  const Eigen::VectorXd df = (6.0 * t.array() - 1.0).matrix();
  CHECK((d * f - df).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(velocity_from_zz(volkov_matrix(hydrogen_1s_moments(), TimeGrid{4, 1.0})), std::invalid_argument);
}

TEST_CASE("field-free velocity correlation has <p_z^2> on the diagonal") {
  const EigenResult& g = hc_test::small_hydrogen();
  const Propagator prop(g.state.grid, PotentialSpec::coulomb(1.0), std::nullopt);
  const TimeGrid tgrid{41, 4.0};
  const CorrelationMatrix vv = velocity_from_zz(correlation_tdse(g.state, prop, tgrid, Observable::z));
  for (int k = 2; k < tgrid.n_t - 2; ++k) CHECK(std::abs(vv.values(k, k) - 1.0 / 3.0) <= 2e-2);
}

TEST_CASE("differentiated and direct velocity correlations agree in a pulse") {
  const RadialGrid grid = hc_test::small_grid(8, 60.0);
  WaveState start(grid);
  start.coeffs.col(0) = build_ground_state(grid, PotentialSpec::coulomb(1.0)).state.coeffs.col(0);
  const Propagator prop(grid, PotentialSpec::coulomb(1.0), kFastPulse, {2, false});
  const TimeGrid tgrid = TimeGrid::over_pulse(kFastPulse, 41);
  const CorrelationMatrix from_zz = velocity_from_zz(correlation_tdse(start, prop, tgrid, Observable::z));
  const CorrelationMatrix direct = correlation_tdse(start, prop, tgrid, Observable::velocity);
  CHECK(direct.kind == CorrelationKind::vv);
  CHECK(frobenius_rel_interior(from_zz, direct, Part::complex) <= 0.05);
}

TEST_CASE("absorber loss guard") {
  const RadialGrid grid = hc_test::small_grid(6, 30.0, 0.3);
  WaveState start(grid);
  start.coeffs.col(0) = hc_test::small_hydrogen().state.coeffs.col(0).head(start.points());
  start.coeffs /= std::sqrt(norm_squared(start));
  const PulseParams strong{0.5, 0.5, 1.0};
  const Propagator prop(grid, PotentialSpec::coulomb(1.0), strong);
  CorrelationOptions opts;
  opts.max_norm_loss = 1e-6;
  CHECK_THROWS_AS(base_propagation(start, prop, TimeGrid::over_pulse(strong, 5), opts), NumericalFailure);
}

TEST_CASE("time grid and enum spellings") {
  const TimeGrid tgrid{5, 2.0};
  CHECK(tgrid.t(4) == 2.0);
  CHECK(tgrid.step() == 0.5);
  CHECK_THROWS_AS(TimeGrid({1, 2.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({4, 0.0}).validate(), std::invalid_argument);
  for (auto s : {CorrelationSource::tdse, CorrelationSource::model, CorrelationSource::free, CorrelationSource::oracle})
    CHECK(parse_source(to_string(s)) == s);
  CHECK(parse_kind("vv") == CorrelationKind::vv);
  CHECK_THROWS_AS(parse_kind("zv"), std::invalid_argument);
}
