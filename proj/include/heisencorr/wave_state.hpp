#pragma once

#include "heisencorr/radial.hpp"

#include <Eigen/Core>

#include <complex>
#include <filesystem>

namespace heisencorr {

using cdouble = std::complex<double>;

/// Partial-wave wavefunction (m = 0): column l holds u_l on the radial grid.
struct WaveState {
  RadialGrid grid;
  Eigen::MatrixXcd coeffs;
  double time = 0.0;

  WaveState() = default;
  explicit WaveState(const RadialGrid& g, double t = 0.0)
      : grid(g), coeffs(Eigen::MatrixXcd::Zero(g.points(), g.channels())), time(t) {}

  Eigen::Index points() const { return coeffs.rows(); }
  int channels() const { return static_cast<int>(coeffs.cols()); }
};

/// <a|b> = sum conj(a) b dr. Rejects states on different grids.
cdouble inner(const WaveState& a, const WaveState& b);
double norm_squared(const WaveState& s);

/// Squared norm pushed beyond l_max by the last operator application.
struct TruncationLoss {
  double norm_squared = 0.0;
};

/// z psi with z = r cos(theta); couples l <-> l +- 1.
WaveState apply_z(const WaveState& s, TruncationLoss* loss = nullptr);

/// p_z psi = -i d/dz psi in the partial-wave representation.
WaveState apply_pz(const WaveState& s, TruncationLoss* loss = nullptr);
WaveState apply_pz(const WaveState& s, const BandMatrix<double>& derivative, TruncationLoss* loss = nullptr);

/// Binary state dump: "WAVS", u32 version, u32 n_l, u32 n_r, f64 dr, then the
/// (n_r - 1) interior coefficients of each channel as (re, im) f64 pairs, l-major.
void write_wave_state(const std::filesystem::path& path, const WaveState& s);
WaveState read_wave_state(const std::filesystem::path& path);

}  // namespace heisencorr
