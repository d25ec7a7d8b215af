#pragma once

#include "heisencorr/wave_state.hpp"

namespace heisencorr {

struct EigenResult {
  WaveState state;
  double energy = 0.0;
};

/// Lowest s-wave eigenpair of the radial Hamiltonian, normalized to 1.
///
/// The eigenvalue is bracketed by Sturm counts (inertia of the band LDL^T of
/// H - sigma) and polished by shifted inverse iteration. Throws
/// std::invalid_argument for the free particle and NumericalFailure if the
/// iteration does not converge.
EigenResult build_ground_state(const RadialGrid& grid, const PotentialSpec& pot);

/// Number of eigenvalues of the symmetric band matrix below sigma.
int count_eigenvalues_below(const BandMatrix<double>& h, double sigma);

}  // namespace heisencorr
