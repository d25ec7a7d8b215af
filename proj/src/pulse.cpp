#include "heisencorr/pulse.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace heisencorr {

namespace {

constexpr double kPi = std::numbers::pi;

// (1 - cos(k t))/k, the integral of sin(k tau) over [0, t]; k = 0 gives 0.
double sin_integral(double k, double t) {
  if (k == 0.0) return 0.0;
  const double s = std::sin(0.5 * k * t);
  return 2.0 * s * s / k;
}

}  // namespace

void PulseParams::validate() const {
  if (!(e0 >= 0.0)) throw std::invalid_argument("pulse.e0 must be >= 0");
  if (!(omega > 0.0)) throw std::invalid_argument("pulse.omega must be > 0");
  if (!(n_cycles > 0.0)) throw std::invalid_argument("pulse.n_cycles must be > 0");
}

double vector_potential(const PulseParams& p, double t) {
  const double t1 = p.duration();
  if (p.e0 == 0.0 || t <= 0.0 || t >= t1) return 0.0;
  const double env = std::sin(kPi * t / t1);
  return -(p.e0 / p.omega) * env * env * std::sin(p.omega * t);
}

double electric_field(const PulseParams& p, double t) {
  const double t1 = p.duration();
  if (p.e0 == 0.0 || t <= 0.0 || t >= t1) return 0.0;
  const double phase = kPi * t / t1;
  const double f = std::sin(phase) * std::sin(phase);
  const double df = (kPi / t1) * std::sin(2.0 * phase);
  return (p.e0 / p.omega) * (df * std::sin(p.omega * t) + p.omega * f * std::cos(p.omega * t));
}

double excursion_integral(const PulseParams& p, double t) {
  if (p.e0 == 0.0 || t <= 0.0) return 0.0;
  const double t1 = p.duration();
  const double tc = std::min(t, t1);
  // sin^2(Wt/2) sin(wt) = [sin(wt) - sin((w+W)t)/2 - sin((w-W)t)/2] / 2, W = 2pi/T1
  const double w = p.omega;
  const double big_w = 2.0 * kPi / t1;
  const double integral = 0.5 * (sin_integral(w, tc) - 0.5 * sin_integral(w + big_w, tc) -
                                 0.5 * sin_integral(w - big_w, tc));
  return -(p.e0 / p.omega) * integral;
}

double ponderomotive_phase(const PulseParams& p, double t) {
  if (p.e0 == 0.0 || t <= 0.0) return 0.0;
  const double tc = std::min(t, p.duration());
  // Composite 8-point Gauss-Legendre; the integrand is entire, so a panel
  // per quarter carrier period is far below double round-off.
  static constexpr std::array<double, 4> x = {0.1834346424956498, 0.5255324099163290,
                                               0.7966664774136267, 0.9602898564975363};
  static constexpr std::array<double, 4> w = {0.3626837833783620, 0.3137066458778873,
                                               0.2223810344533745, 0.1012285362903763};
  const int panels = std::max(1, static_cast<int>(std::ceil(tc / (0.25 * p.period()))) * 2);
  const double h = tc / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * h;
    for (std::size_t q = 0; q < x.size(); ++q) {
      const double a = vector_potential(p, mid - 0.5 * h * x[q]);
      const double b = vector_potential(p, mid + 0.5 * h * x[q]);
      sum += w[q] * (a * a + b * b);
    }
  }
  return 0.25 * h * sum;
}

double keldysh_gamma(const PulseParams& p, double ip) {
  if (!(p.e0 > 0.0)) throw std::invalid_argument("keldysh_gamma: undefined for e0 = 0");
  if (!(ip > 0.0)) throw std::invalid_argument("keldysh_gamma: ip must be > 0");
  return p.omega * std::sqrt(2.0 * ip) / p.e0;
}

}  // namespace heisencorr
