#include "heisencorr/correlation.hpp"

#include "heisencorr/errors.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace heisencorr {

Eigen::VectorXd TimeGrid::times() const {
  Eigen::VectorXd t(n_t);
  for (int k = 0; k < n_t; ++k) t(k) = this->t(k);
  return t;
}

void TimeGrid::validate() const {
  if (n_t < 2) throw std::invalid_argument("time grid needs n_t >= 2");
  if (!(t_end > 0.0)) throw std::invalid_argument("time grid needs a positive extent");
}

std::string to_string(CorrelationKind k) { return k == CorrelationKind::zz ? "zz" : "vv"; }

std::string to_string(CorrelationSource s) {
  switch (s) {
    case CorrelationSource::tdse: return "tdse";
    case CorrelationSource::model: return "model";
    case CorrelationSource::free: return "free";
    case CorrelationSource::oracle: return "oracle";
  }
  return "unknown";
}

CorrelationKind parse_kind(const std::string& s) {
  if (s == "zz") return CorrelationKind::zz;
  if (s == "vv") return CorrelationKind::vv;
  throw std::invalid_argument("unknown correlation kind '" + s + "'");
}

CorrelationSource parse_source(const std::string& s) {
  for (auto src : {CorrelationSource::tdse, CorrelationSource::model, CorrelationSource::free,
                   CorrelationSource::oracle})
    if (to_string(src) == s) return src;
  throw std::invalid_argument("unknown correlation source '" + s + "'");
}

double hermitian_defect(const Eigen::MatrixXcd& values) {
  return (values - values.adjoint()).cwiseAbs().maxCoeff();
}

BaseRun base_propagation(const WaveState& initial, const Propagator& prop, const TimeGrid& tgrid,
                         const CorrelationOptions& opts) {
  tgrid.validate();
  BaseRun run;
  run.checkpoints.reserve(tgrid.n_t);
  WaveState psi = initial;
  psi.time = 0.0;
  const double n0 = norm_squared(psi);
  run.checkpoints.push_back(psi);
  for (int k = 1; k < tgrid.n_t; ++k) {
    prop.advance(psi, tgrid.t(k), opts.dt);
    run.checkpoints.push_back(psi);
  }
  run.norm_loss = 1.0 - norm_squared(psi) / n0;
  if (run.norm_loss > opts.max_norm_loss) {
    throw NumericalFailure("absorber removed " + std::to_string(run.norm_loss) +
                           " of the norm on the base propagation (limit " + std::to_string(opts.max_norm_loss) +
                           ")");
  }
  return run;
}

WaveState apply_observable(const WaveState& s, const Propagator& prop, Observable q, double t,
                           TruncationLoss* loss) {
  if (q == Observable::z) return apply_z(s, loss);
  WaveState out = apply_pz(s, prop.derivative(), loss);
  const double a = prop.vector_potential_at(t);
  if (a != 0.0) out.coeffs += a * s.coeffs;
  return out;
}

MeanTrajectory mean_trajectory(const BaseRun& base, const Propagator& prop, Observable q) {
  MeanTrajectory m;
  m.q_bar.resize(static_cast<Eigen::Index>(base.checkpoints.size()));
  for (std::size_t k = 0; k < base.checkpoints.size(); ++k) {
    const WaveState& psi = base.checkpoints[k];
    m.q_bar(static_cast<Eigen::Index>(k)) = inner(psi, apply_observable(psi, prop, q, psi.time));
  }
  return m;
}

MeanTrajectory mean_trajectory(const WaveState& initial, const Propagator& prop, const TimeGrid& tgrid,
                               Observable q, const CorrelationOptions& opts) {
  return mean_trajectory(base_propagation(initial, prop, tgrid, opts), prop, q);
}

CorrelationMatrix correlation_tdse(const WaveState& initial, const Propagator& prop, const TimeGrid& tgrid,
                                   Observable q, const CorrelationOptions& opts) {
  return correlation_tdse(base_propagation(initial, prop, tgrid, opts), prop, tgrid, q, opts);
}

CorrelationMatrix correlation_tdse(const BaseRun& base, const Propagator& prop, const TimeGrid& tgrid,
                                   Observable q, const CorrelationOptions& opts) {
  tgrid.validate();
  if (static_cast<int>(base.checkpoints.size()) != tgrid.n_t)
    throw std::invalid_argument("base propagation does not match the time grid");
  const int n = tgrid.n_t;

  // Q Psi(t_k) for every checkpoint; <Psi(t2)| Q chi> = <Q Psi(t2)| chi> since Q is Hermitian.
  std::vector<WaveState> q_psi;
  q_psi.reserve(n);
  double truncation = 0.0;
  Eigen::VectorXd q_bar(n);
  for (int k = 0; k < n; ++k) {
    TruncationLoss loss;
    q_psi.push_back(apply_observable(base.checkpoints[k], prop, q, tgrid.t(k), &loss));
    truncation = std::max(truncation, loss.norm_squared);
    q_bar(k) = inner(base.checkpoints[k], q_psi.back()).real();
  }

  Eigen::MatrixXcd values = Eigen::MatrixXcd::Zero(n, n);

  // Row task j: column j of the lower triangle (t2 >= t1 = t_j), and with
  // both_triangles also row j of the upper triangle by backward propagation.
  auto task = [&](int j) {
    WaveState chi = q_psi[j];
    values(j, j) = inner(q_psi[j], chi);
    for (int i = j + 1; i < n; ++i) {
      prop.advance(chi, tgrid.t(i), opts.dt);
      values(i, j) = inner(q_psi[i], chi);
    }
    if (opts.both_triangles) {
      WaveState back = q_psi[j];
      for (int i = j - 1; i >= 0; --i) {
        prop.retreat(back, tgrid.t(i), opts.dt);
        values(i, j) = inner(q_psi[i], back);
      }
    }
  };

  const int workers = std::max(1, std::min(n, opts.jobs > 0 ? opts.jobs
                                                            : static_cast<int>(std::thread::hardware_concurrency())));
  if (workers == 1) {
    for (int j = 0; j < n; ++j) task(j);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int j = next++; j < n; j = next++) {
          try {
            task(j);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  if (!opts.both_triangles) {
    for (int j = 0; j < n; ++j)
      for (int i = j + 1; i < n; ++i) values(j, i) = std::conj(values(i, j));
  }
  values -= (q_bar * q_bar.transpose()).cast<cdouble>();

  CorrelationMatrix c;
  c.kind = q == Observable::z ? CorrelationKind::zz : CorrelationKind::vv;
  c.source = prop.pulse() ? CorrelationSource::tdse : CorrelationSource::free;
  c.grid = tgrid;
  c.values = std::move(values);
  c.meta["absorber_norm_loss"] = base.norm_loss;
  c.meta["truncation_norm_loss"] = truncation;
  c.meta["lower_triangle"] = opts.both_triangles ? "repropagated" : "conjugate reflection";
  if (q == Observable::velocity) c.meta["velocity"] = "direct operator";
  return c;
}

Eigen::MatrixXd time_derivative_matrix(const TimeGrid& grid) {
  const int n = grid.n_t;
  const double h = grid.step();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i + 1 < n; ++i) {
    d(i, i - 1) = -0.5 / h;
    d(i, i + 1) = 0.5 / h;
  }
  d(0, 0) = -1.5 / h;
  d(0, 1) = 2.0 / h;
  d(0, 2) = -0.5 / h;
  d(n - 1, n - 1) = 1.5 / h;
  d(n - 1, n - 2) = -2.0 / h;
  d(n - 1, n - 3) = 0.5 / h;
  return d;
}

CorrelationMatrix velocity_from_zz(const CorrelationMatrix& c) {
  if (c.kind != CorrelationKind::zz) throw std::invalid_argument("velocity_from_zz needs a zz correlation");
  if (c.grid.n_t < 5) throw std::invalid_argument("velocity_from_zz needs n_t >= 5");
  if (c.values.rows() != c.grid.n_t || c.values.cols() != c.grid.n_t)
    throw std::invalid_argument("correlation values do not match the time grid");
  const Eigen::MatrixXcd d = time_derivative_matrix(c.grid).cast<cdouble>();
  CorrelationMatrix v = c;
  v.kind = CorrelationKind::vv;
  v.values = d * c.values * d.transpose();
  v.meta["velocity"] = "mixed second difference";
  v.meta["edge_accuracy"] = "first and last rows and columns use one-sided stencils";
  return v;
}

}  // namespace heisencorr
