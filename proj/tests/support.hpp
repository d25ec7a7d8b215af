#pragma once

#include "heisencorr/ground_state.hpp"
#include "heisencorr/propagator.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>

namespace hc_test {

using namespace heisencorr;

// Hydrogen on a box small enough for quick propagation; 1s moments stay within 1e-4.
inline RadialGrid small_grid(int l_max = 4, double r_max = 40.0, double absorber = 0.0) {
  return RadialGrid::from_extent(0.1, r_max, l_max, absorber);
}

inline const EigenResult& small_hydrogen() {
  static const EigenResult g = build_ground_state(small_grid(), PotentialSpec::coulomb(1.0));
  return g;
}

inline WaveState random_state(const RadialGrid& grid, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  WaveState s(grid);
  // Smooth random profile: random combination of a few bumps per channel.
  const Eigen::VectorXd r = grid.radii();
  for (int l = 0; l < s.channels(); ++l)
    for (int k = 0; k < 3; ++k) {
      const double c = 3.0 + 4.0 * std::abs(n(rng)), w = 1.0 + std::abs(n(rng));
      const cdouble amp(n(rng), n(rng));
      for (Eigen::Index i = 0; i < s.points(); ++i)
        s.coeffs(i, l) += amp * std::exp(-(r(i) - c) * (r(i) - c) / (2.0 * w * w)) * r(i) / (1.0 + r(i));
    }
  s.coeffs /= std::sqrt(norm_squared(s));
  return s;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("heisencorr_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace hc_test
