#pragma once

#include "heisencorr/banded.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <variant>

namespace heisencorr {

/// Uniform radial grid for reduced radial functions u_l(r) = r R_l(r).
///
/// Unknowns live at r_i = (i + 1) dr, i = 0 ... n_r - 2; u vanishes at r = 0
/// and at r_max = n_r dr.
struct RadialGrid {
  double dr = 0.1;
  int n_r = 2400;
  int l_max = 16;
  double absorber_fraction = 0.2;
  /// Order of the central finite-difference stencils (2, 4 or 6).
  int fd_order = 6;

  static RadialGrid from_extent(double dr, double r_max, int l_max, double absorber_fraction = 0.2,
                                int fd_order = 6);

  double r_max() const { return n_r * dr; }
  Eigen::Index points() const { return n_r - 1; }
  int channels() const { return l_max + 1; }
  double r(Eigen::Index i) const { return static_cast<double>(i + 1) * dr; }
  Eigen::VectorXd radii() const;

  void validate() const;
  bool operator==(const RadialGrid&) const = default;
};

struct Coulomb {
  double charge = 1.0;
};
struct Harmonic {
  double omega = 1.0;
};
struct FreeParticle {};

/// Field-free central potential.
struct PotentialSpec {
  std::variant<Coulomb, Harmonic, FreeParticle> variant = Coulomb{};

  static PotentialSpec coulomb(double z) { return {Coulomb{z}}; }
  static PotentialSpec harmonic(double w) { return {Harmonic{w}}; }
  static PotentialSpec free() { return {FreeParticle{}}; }

  bool is_free() const { return std::holds_alternative<FreeParticle>(variant); }
  double operator()(double r) const;
  std::string name() const;
  void validate() const;
};

/// Angular factor <l+1,0| cos(theta) |l,0>.
inline double dipole_coupling(int l) {
  const double x = l;
  return (x + 1.0) / std::sqrt((2.0 * x + 1.0) * (2.0 * x + 3.0));
}

/// Symmetric band matrix of -1/2 d^2/dr^2 + l(l+1)/(2r^2) + V(r) in channel l.
///
/// Near the origin the stencil reaches ghost points r = -k dr, which are tied
/// to u(k dr) by the small-r behaviour of the solution: parity (-1)^(l+1) for
/// smooth potentials, and the additional Coulomb cusp factor
/// (1 + Z k dr/(l+1))/(1 - Z k dr/(l+1)) for Coulomb. The resulting operator is
/// symmetrized so that propagation stays exactly unitary.
BandMatrix<double> radial_hamiltonian(const RadialGrid& grid, const PotentialSpec& pot, int l);

/// Antisymmetric central first-derivative stencil (ghost values taken as zero).
BandMatrix<double> radial_derivative(const RadialGrid& grid);

/// Absorbing mask: cos^(1/8) ramp over the outer absorber_fraction of the box.
Eigen::VectorXd absorber_mask(const RadialGrid& grid);

}  // namespace heisencorr
