#include "heisencorr/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace heisencorr {

using namespace std::complex_literals;

bool SecondMoments::valid(double tol) const {
  return std::abs(m_zz.imag()) <= tol && m_zz.real() > 0.0 && std::abs(m_pp.imag()) <= tol && m_pp.real() > 0.0 &&
         std::abs(m_zp - m_pz - 1i) <= tol && std::abs(m_zp - std::conj(m_pz)) <= tol;
}

SecondMoments hydrogen_1s_moments() { return {1.0, 0.5i, -0.5i, 1.0 / 3.0}; }

SecondMoments measure_moments(const WaveState& s) {
  const WaveState z = apply_z(s);
  const WaveState p = apply_pz(s);
  return {inner(z, z), inner(z, p), inner(p, z), inner(p, p)};
}

std::complex<double> volkov_zz(const SecondMoments& mom, double t1, double t2) {
  return mom.m_zz + t1 * mom.m_zp + t2 * mom.m_pz + t1 * t2 * mom.m_pp;
}

std::complex<double> ho_zz(double omega, double t1, double t2) {
  if (!(omega > 0.0)) throw std::invalid_argument("oscillator frequency must be > 0");
  return std::polar(0.5 / omega, -omega * (t2 - t1));
}

std::complex<double> ho_vv(double omega, double t1, double t2) {
  if (!(omega > 0.0)) throw std::invalid_argument("oscillator frequency must be > 0");
  return std::polar(0.5 * omega, -omega * (t2 - t1));
}

namespace {

template <typename F>
CorrelationMatrix sample(const TimeGrid& grid, CorrelationKind kind, F&& f) {
  grid.validate();
  CorrelationMatrix c;
  c.kind = kind;
  c.source = CorrelationSource::oracle;
  c.grid = grid;
  c.values.resize(grid.n_t, grid.n_t);
  for (int i = 0; i < grid.n_t; ++i)
    for (int j = 0; j < grid.n_t; ++j) c.values(i, j) = f(grid.t(j), grid.t(i));
  return c;
}

}  // namespace

CorrelationMatrix volkov_matrix(const SecondMoments& mom, const TimeGrid& grid) {
  auto c = sample(grid, CorrelationKind::zz, [&](double t1, double t2) { return volkov_zz(mom, t1, t2); });
  c.meta["oracle"] = "volkov";
  return c;
}

CorrelationMatrix ho_matrix(double omega, const TimeGrid& grid) {
  auto c = sample(grid, CorrelationKind::zz, [&](double t1, double t2) { return ho_zz(omega, t1, t2); });
  c.meta["oracle"] = "harmonic";
  c.meta["omega"] = omega;
  return c;
}

}  // namespace heisencorr
