#pragma once

#include "heisencorr/pulse.hpp"
#include "heisencorr/wave_state.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace heisencorr {

struct PropagatorOptions {
  /// 2: one symmetric split Crank-Nicolson step per dt.
  /// 4: triple-jump composition of three such steps (fourth order in dt).
  int order = 2;
  bool absorber = true;
};

/// Velocity-gauge propagator for H0 + A(t) p_z + A(t)^2/2.
///
/// Each step is a palindromic product: a half-step sweep over the dipole
/// couplings of the channel pairs (l, l+1), l = 0 ... l_max-1, a full
/// Crank-Nicolson step of the diagonal-in-l atomic Hamiltonian, and the
/// mirrored coupling sweep. Within a pair the coupling splits into a pointwise
/// 2x2 rotation (the (l+1)/r part) and two banded Cayley transforms of the
/// radial derivative. Every factor is unitary, so the step is unitary and its
/// inverse is the same step with negative dt. The A^2/2 term is applied as an
/// analytic global phase.
///
/// advance() is const and may be called concurrently on distinct states.
class Propagator {
 public:
  Propagator(const RadialGrid& grid, const PotentialSpec& pot, std::optional<PulseParams> pulse,
             PropagatorOptions options = {});

  /// Propagates s to t_end >= s.time in equal steps no longer than dt, applying
  /// the absorbing mask once per step.
  void advance(WaveState& s, double t_end, double dt) const;

  /// Exact inverse of advance over the same interval (t_end <= s.time); no
  /// absorbing mask is applied.
  void retreat(WaveState& s, double t_end, double dt) const;

  const RadialGrid& grid() const { return grid_; }
  const PotentialSpec& potential() const { return pot_; }
  const std::optional<PulseParams>& pulse() const { return pulse_; }
  const PropagatorOptions& options() const { return options_; }
  const BandMatrix<double>& derivative() const { return derivative_; }
  double vector_potential_at(double t) const { return pulse_ ? vector_potential(*pulse_, t) : 0.0; }

 private:
  struct AtomicFactors {
    std::vector<BandLU<cdouble>> lu;  // I + i dt/2 H_l
  };
  struct Workspace;

  void run(WaveState& s, double t_end, double dt, bool forward) const;
  void full_step(Eigen::MatrixXcd& psi, std::vector<char>& active, double t0, double step, Workspace& ws) const;
  void split_step(Eigen::MatrixXcd& psi, std::vector<char>& active, double t0, double step, Workspace& ws) const;
  void coupling_pair(Eigen::MatrixXcd& psi, int l, double a, double tau, Workspace& ws) const;
  const AtomicFactors& atomic_factors(double step) const;

  RadialGrid grid_;
  PotentialSpec pot_;
  std::optional<PulseParams> pulse_;
  PropagatorOptions options_;

  std::vector<BandMatrix<double>> hamiltonian_;  // per l
  BandMatrix<double> derivative_;
  std::vector<double> derivative_weights_;
  Eigen::VectorXd inv_r_;
  Eigen::VectorXd mask_;
  Eigen::Index mask_start_ = 0;

  mutable std::mutex cache_mutex_;
  mutable std::map<double, std::shared_ptr<const AtomicFactors>> cache_;
};

/// Convenience wrapper: returns s propagated to t_end.
WaveState propagate(const WaveState& s, const PotentialSpec& pot, std::optional<PulseParams> pulse, double t_end,
                    double dt, PropagatorOptions options = {});

}  // namespace heisencorr
