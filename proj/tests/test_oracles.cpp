#include "heisencorr/correlation.hpp"
#include "heisencorr/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <random>

using namespace heisencorr;

TEST_CASE("Volkov bilinear form with hydrogen moments") {
  const SecondMoments m = hydrogen_1s_moments();
  CHECK(m.valid());
  CHECK(volkov_zz(m, 0.0, 0.0) == std::complex<double>(1.0, 0.0));
  const auto v = volkov_zz(m, 2.0, 1.0);
  CHECK(v.real() == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(v.imag() == doctest::Approx(0.5).epsilon(1e-15));

  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-50.0, 150.0);
  for (int k = 0; k < 100; ++k) {
    const double t1 = u(rng), t2 = u(rng);
    CHECK(std::abs(volkov_zz(m, t1, t2) - std::conj(volkov_zz(m, t2, t1))) < 1e-12);
    // 1 + i (t1 - t2)/2 + t1 t2/3
    CHECK(std::abs(volkov_zz(m, t1, t2) - std::complex<double>(1.0 + t1 * t2 / 3.0, 0.5 * (t1 - t2))) < 1e-10);
  }
}

TEST_CASE("moment validity check") {
  SecondMoments bad = hydrogen_1s_moments();
  bad.m_pz = {0.0, 0.5};
  CHECK_FALSE(bad.valid());
}

TEST_CASE("oscillator correlation") {
  CHECK(ho_zz(1.0, 3.0, 3.0).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ho_zz(1.0, 0.2, 0.2 + std::numbers::pi).real() == doctest::Approx(-0.5).epsilon(1e-14));
  for (double t1 : {0.0, 1.3, 7.0})
    for (double t2 : {0.4, 5.5}) {
      CHECK(std::abs(ho_zz(2.0, t1, t2)) == doctest::Approx(0.25).epsilon(1e-15));
      CHECK(std::abs(ho_vv(2.0, t1, t2) - 4.0 * ho_zz(2.0, t1, t2)) < 1e-14);
    }
  CHECK_THROWS_AS(ho_zz(0.0, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("oracle matrices put t2 on rows") {
  const TimeGrid tgrid{6, 5.0};
  const CorrelationMatrix v = volkov_matrix(hydrogen_1s_moments(), tgrid);
  const CorrelationMatrix h = ho_matrix(1.5, tgrid);
  CHECK(v.source == CorrelationSource::oracle);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      CHECK(v.values(i, j) == volkov_zz(hydrogen_1s_moments(), tgrid.t(j), tgrid.t(i)));
      CHECK(h.values(i, j) == ho_zz(1.5, tgrid.t(j), tgrid.t(i)));
    }
}

TEST_CASE("mixed difference of the oscillator correlation gives the velocity correlation") {
  auto interior_error = [](const TimeGrid& tgrid) {
    const CorrelationMatrix vv = velocity_from_zz(ho_matrix(1.0, tgrid));
    double err = 0.0;
    for (int i = 1; i + 1 < tgrid.n_t; ++i)
      for (int j = 1; j + 1 < tgrid.n_t; ++j)
        err = std::max(err, std::abs(vv.values(i, j) - ho_vv(1.0, tgrid.t(j), tgrid.t(i))));
    return err;
  };
  CHECK(interior_error(TimeGrid{128, 0.25}) <= 1e-6);
  // Second order in the step over a full period.
  const double coarse = interior_error(TimeGrid{65, 2.0 * std::numbers::pi});
  const double fine = interior_error(TimeGrid{129, 2.0 * std::numbers::pi});
  CHECK(std::log2(coarse / fine) == doctest::Approx(2.0).epsilon(0.05));
}
