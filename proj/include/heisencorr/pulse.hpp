#pragma once

#include <numbers>

namespace heisencorr {

/// Linearly polarized sin^2-envelope pulse with a sine carrier, atomic units.
///
/// The vector potential is A(t) = -(e0/omega) sin^2(pi t/T1) sin(omega t) on
/// [0, T1], T1 = n_cycles * 2pi/omega, and zero elsewhere.
struct PulseParams {
  double e0 = 0.0;
  double omega = 0.057;
  double n_cycles = 1.0;

  double duration() const { return n_cycles * 2.0 * std::numbers::pi / omega; }
  double period() const { return 2.0 * std::numbers::pi / omega; }

  /// Throws std::invalid_argument unless e0 >= 0, omega > 0, n_cycles > 0.
  void validate() const;
};

double vector_potential(const PulseParams& p, double t);

/// E(t) = -dA/dt, evaluated analytically.
double electric_field(const PulseParams& p, double t);

/// Integral of A from 0 to t (closed form). Constant beyond T1.
double excursion_integral(const PulseParams& p, double t);

/// Integral of A^2/2 from 0 to t; phase of the A^2 term in the velocity gauge.
double ponderomotive_phase(const PulseParams& p, double t);

/// Keldysh parameter omega*sqrt(2 ip)/e0. Rejects e0 = 0.
double keldysh_gamma(const PulseParams& p, double ip);

}  // namespace heisencorr
