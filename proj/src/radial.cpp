#include "heisencorr/radial.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

namespace heisencorr {

namespace {

// Central second-derivative weights c_0 ... c_w.
std::span<const double> second_derivative_weights(int order) {
  static constexpr std::array<double, 2> o2 = {-2.0, 1.0};
  static constexpr std::array<double, 3> o4 = {-5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0};
  static constexpr std::array<double, 4> o6 = {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
  switch (order) {
    case 2: return o2;
    case 4: return o4;
    case 6: return o6;
  }
  throw std::invalid_argument("grid.fd_order must be 2, 4 or 6");
}

// Central first-derivative weights d_1 ... d_w.
std::span<const double> first_derivative_weights(int order) {
  static constexpr std::array<double, 1> o2 = {0.5};
  static constexpr std::array<double, 2> o4 = {2.0 / 3.0, -1.0 / 12.0};
  static constexpr std::array<double, 3> o6 = {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
  switch (order) {
    case 2: return o2;
    case 4: return o4;
    case 6: return o6;
  }
  throw std::invalid_argument("grid.fd_order must be 2, 4 or 6");
}

}  // namespace

RadialGrid RadialGrid::from_extent(double dr, double r_max, int l_max, double absorber_fraction, int fd_order) {
  RadialGrid g;
  g.dr = dr;
  g.n_r = static_cast<int>(std::lround(r_max / dr));
  g.l_max = l_max;
  g.absorber_fraction = absorber_fraction;
  g.fd_order = fd_order;
  return g;
}

Eigen::VectorXd RadialGrid::radii() const {
  return Eigen::VectorXd::LinSpaced(points(), dr, dr * static_cast<double>(points()));
}

void RadialGrid::validate() const {
  if (!(dr > 0.0)) throw std::invalid_argument("grid.dr must be > 0");
  if (n_r < 16) throw std::invalid_argument("grid needs at least 16 radial points");
  if (l_max < 0) throw std::invalid_argument("grid.lmax must be >= 0");
  if (!(absorber_fraction >= 0.0 && absorber_fraction < 0.5))
    throw std::invalid_argument("grid.absorber_fraction must lie in [0, 0.5)");
  second_derivative_weights(fd_order);
}

double PotentialSpec::operator()(double r) const {
  return std::visit(
      [r](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Coulomb>) return -v.charge / r;
        else if constexpr (std::is_same_v<T, Harmonic>) return 0.5 * v.omega * v.omega * r * r;
        else return 0.0;
      },
      variant);
}

std::string PotentialSpec::name() const {
  switch (variant.index()) {
    case 0: return "coulomb";
    case 1: return "harmonic";
    default: return "free";
  }
}

void PotentialSpec::validate() const {
  if (const auto* c = std::get_if<Coulomb>(&variant); c && !(c->charge > 0.0))
    throw std::invalid_argument("potential.z must be > 0");
  if (const auto* h = std::get_if<Harmonic>(&variant); h && !(h->omega > 0.0))
    throw std::invalid_argument("potential.ohm must be > 0");
}

BandMatrix<double> radial_hamiltonian(const RadialGrid& grid, const PotentialSpec& pot, int l) {
  const auto c = second_derivative_weights(grid.fd_order);
  const int w = static_cast<int>(c.size()) - 1;
  const Eigen::Index n = grid.points();
  const double h2 = grid.dr * grid.dr;

  double cusp = 0.0;
  if (const auto* coul = std::get_if<Coulomb>(&pot.variant)) {
    cusp = coul->charge * grid.dr / (l + 1.0);
    if (cusp * w >= 0.5) cusp = 0.0;  // grid too coarse for the cusp closure
  }
  const double parity = (l % 2 == 0) ? -1.0 : 1.0;

  // Unsymmetrized Laplacian, then (L + L^T)/2.
  BandMatrix<double> lap(n, w);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = -w; k <= w; ++k) {
      const Eigen::Index j = i + k;
      const double ck = c[std::abs(k)];
      if (j >= 0 && j < n) {
        lap.at(i, j) += ck;
      } else if (j < -1) {
        // ghost at r = -m dr mirrors the unknown at r = m dr (index m - 1)
        const Eigen::Index m = -j - 1;
        const double ratio = parity * (1.0 + cusp * m) / (1.0 - cusp * m);
        lap.at(i, m - 1) += ratio * ck;
      }
    }
  }
  BandMatrix<double> h(n, w);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = std::max<Eigen::Index>(0, i - w); j <= std::min<Eigen::Index>(n - 1, i + w); ++j)
      h.at(i, j) = -0.25 * (lap.at(i, j) + lap.at(j, i)) / h2;
    const double r = grid.r(i);
    h.at(i, i) += 0.5 * l * (l + 1.0) / (r * r) + pot(r);
  }
  return h;
}

BandMatrix<double> radial_derivative(const RadialGrid& grid) {
  const auto d = first_derivative_weights(grid.fd_order);
  const int w = static_cast<int>(d.size());
  const Eigen::Index n = grid.points();
  BandMatrix<double> out(n, w);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 1; k <= w; ++k) {
      if (i + k < n) out.at(i, i + k) = d[k - 1] / grid.dr;
      if (i - k >= 0) out.at(i, i - k) = -d[k - 1] / grid.dr;
    }
  }
  return out;
}

Eigen::VectorXd absorber_mask(const RadialGrid& grid) {
  const Eigen::Index n = grid.points();
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(n);
  if (grid.absorber_fraction <= 0.0) return mask;
  const double r_max = grid.r_max();
  const double start = r_max * (1.0 - grid.absorber_fraction);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = grid.r(i);
    if (r > start) {
      const double x = 0.5 * std::numbers::pi * (r - start) / (r_max - start);
      mask(i) = std::pow(std::cos(x), 0.125);
    }
  }
  return mask;
}

}  // namespace heisencorr
