#pragma once

#include "heisencorr/correlation.hpp"

#include <complex>

namespace heisencorr {

/// Second moments of z and p_z in a state.
struct SecondMoments {
  std::complex<double> m_zz, m_zp, m_pz, m_pp;

  /// m_zz, m_pp real positive; m_zp - m_pz = i; m_zp = conj(m_pz).
  bool valid(double tol = 1e-12) const;
};

/// (1, i/2, -i/2, 1/3): the moments of the hydrogen 1s state.
SecondMoments hydrogen_1s_moments();

/// Moments measured on a grid state (z and p_z from the partial-wave operators).
SecondMoments measure_moments(const WaveState& s);

/// Free-particle coordinate correlation m_zz + t1 m_zp + t2 m_pz + t1 t2 m_pp.
std::complex<double> volkov_zz(const SecondMoments& mom, double t1, double t2);

/// Ground-state coordinate correlation of the isotropic oscillator of frequency omega:
/// exp(-i omega (t2 - t1)) / (2 omega).
std::complex<double> ho_zz(double omega, double t1, double t2);

/// ho_zz mixed derivative: (omega/2) exp(-i omega (t2 - t1)).
std::complex<double> ho_vv(double omega, double t1, double t2);

/// Sampled oracles on a time grid, entry (i, j) = C(t2 = t_i, t1 = t_j).
CorrelationMatrix volkov_matrix(const SecondMoments& mom, const TimeGrid& grid);
CorrelationMatrix ho_matrix(double omega, const TimeGrid& grid);

}  // namespace heisencorr
