#pragma once

#include "heisencorr/propagator.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace heisencorr {

/// Uniform time axis t_k = k t_end/(n_t - 1), k = 0 ... n_t - 1.
struct TimeGrid {
  int n_t = 64;
  double t_end = 0.0;

  static TimeGrid over_pulse(const PulseParams& p, int n_t) { return {n_t, p.duration()}; }

  double step() const { return t_end / static_cast<double>(n_t - 1); }
  double t(int k) const { return k == n_t - 1 ? t_end : static_cast<double>(k) * step(); }
  Eigen::VectorXd times() const;
  void validate() const;
  bool operator==(const TimeGrid&) const = default;
};

enum class CorrelationKind { zz, vv };
enum class CorrelationSource { tdse, model, free, oracle };

std::string to_string(CorrelationKind k);
std::string to_string(CorrelationSource s);
CorrelationKind parse_kind(const std::string& s);
CorrelationSource parse_source(const std::string& s);

/// values(i, j) = C(t2 = t_i, t1 = t_j).
struct CorrelationMatrix {
  CorrelationKind kind = CorrelationKind::zz;
  CorrelationSource source = CorrelationSource::tdse;
  TimeGrid grid;
  Eigen::MatrixXcd values;
  nlohmann::json meta = nlohmann::json::object();
};

/// Largest |C(i,j) - conj(C(j,i))| over the matrix.
double hermitian_defect(const Eigen::MatrixXcd& values);

/// Expectation values of the observable along the base propagation.
struct MeanTrajectory {
  Eigen::VectorXcd q_bar;
};

enum class Observable {
  z,         ///< position
  velocity,  ///< kinetic momentum p_z + A(t)
};

struct CorrelationOptions {
  double dt = 0.02;
  /// Largest tolerated norm loss to the absorber on the base propagation.
  double max_norm_loss = 0.05;
  /// Worker threads for the row repropagations; 0 uses the hardware count.
  int jobs = 1;
  /// Compute the t2 < t1 triangle by backward repropagation instead of by
  /// conjugate reflection (for checking the Hermitian symmetry).
  bool both_triangles = false;
};

/// Diagnostics of a base propagation with checkpoints.
struct BaseRun {
  std::vector<WaveState> checkpoints;  // Psi(t_k)
  double norm_loss = 0.0;              // 1 - |Psi(t_end)|^2 / |Psi(0)|^2
};

/// Propagates the initial state through the time grid, keeping Psi(t_k).
/// Throws NumericalFailure if the absorber removes more than max_norm_loss.
BaseRun base_propagation(const WaveState& initial, const Propagator& prop, const TimeGrid& tgrid,
                         const CorrelationOptions& opts);

MeanTrajectory mean_trajectory(const BaseRun& base, const Propagator& prop, Observable q);
MeanTrajectory mean_trajectory(const WaveState& initial, const Propagator& prop, const TimeGrid& tgrid,
                               Observable q, const CorrelationOptions& opts = {});

/// Applies the observable at time t (the time matters only for the velocity).
WaveState apply_observable(const WaveState& s, const Propagator& prop, Observable q, double t,
                           TruncationLoss* loss = nullptr);

/// Two-time autocorrelation <Psi(t2)| Q U(t2,t1) Q |Psi(t1)> - Qbar(t2) Qbar(t1)
/// by checkpointing the base propagation and repropagating Q Psi(t1) for every
/// t1 on the grid. Rows are independent and may run on several threads; the
/// result does not depend on the thread count.
CorrelationMatrix correlation_tdse(const WaveState& initial, const Propagator& prop, const TimeGrid& tgrid,
                                   Observable q, const CorrelationOptions& opts = {});

/// Same, reusing an existing base propagation.
CorrelationMatrix correlation_tdse(const BaseRun& base, const Propagator& prop, const TimeGrid& tgrid,
                                   Observable q, const CorrelationOptions& opts = {});

/// Mixed derivative d^2 C / dt1 dt2 of a coordinate correlation, with central
/// second-order differences inside and one-sided second-order differences at
/// the edges. Requires n_t >= 5.
CorrelationMatrix velocity_from_zz(const CorrelationMatrix& c);

/// First-derivative matrix used by velocity_from_zz.
Eigen::MatrixXd time_derivative_matrix(const TimeGrid& grid);

}  // namespace heisencorr
