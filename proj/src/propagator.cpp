#include "heisencorr/propagator.hpp"

#include "toeplitz_cayley.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace heisencorr {

namespace {

// Triple-jump weights: 2 g1 + g2 = 1.
const double kJump1 = 1.0 / (2.0 - std::cbrt(2.0));
const double kJump2 = 1.0 - 2.0 * kJump1;

// One Crank-Nicolson step u <- (I + i s H)^{-1} (I - i s H) u for a band H of
// half-width W, with the packed LU of I + i s H. pad holds n + 2W zeros.
template <int W>
void crank_nicolson_kernel(const double* h, const cdouble* lu, const cdouble* inv_pivot, Eigen::Index n,
                           double s, cdouble* u, cdouble* pad) {
  constexpr int kWidth = 2 * W + 1;
  cdouble* x = pad + W;
  std::copy(u, u + n, x);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* row = h + i * kWidth + W;
    cdouble hx(0.0);
    for (int k = -W; k <= W; ++k) hx += row[k] * x[i + k];
    u[i] = x[i] + cdouble(s * hx.imag(), -s * hx.real());
  }
  // Entries of the packed factors outside the matrix are zero, and so is the padding.
  for (Eigen::Index i = 0; i < n; ++i) {
    const cdouble* row = lu + i * kWidth + W;
    cdouble acc = u[i];
    for (int k = 1; k <= W; ++k) acc -= row[-k] * x[i - k];
    x[i] = acc;
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const cdouble* row = lu + i * kWidth + W;
    cdouble acc = x[i];
    for (int k = 1; k <= W; ++k) acc -= row[k] * x[i + k];
    x[i] = acc * inv_pivot[i];
  }
  std::copy(x, x + n, u);
}

bool column_is_zero(const Eigen::MatrixXcd& psi, Eigen::Index l) {
  for (Eigen::Index i = 0; i < psi.rows(); ++i)
    if (psi(i, l) != cdouble(0.0)) return false;
  return true;
}

}  // namespace

struct Propagator::Workspace {
  Workspace(Eigen::Index n, int w, std::vector<double> weights)
      : pad(n + 2 * w), cos(n), sin(n), cayley(std::move(weights), n) {
    pad.setZero();
  }
  Eigen::VectorXcd pad;
  Eigen::VectorXd cos, sin;
  detail::ToeplitzCayley cayley;
};

Propagator::Propagator(const RadialGrid& grid, const PotentialSpec& pot, std::optional<PulseParams> pulse,
                       PropagatorOptions options)
    : grid_(grid), pot_(pot), pulse_(pulse), options_(options) {
  grid_.validate();
  pot_.validate();
  if (pulse_) pulse_->validate();
  if (options_.order != 2 && options_.order != 4) throw std::invalid_argument("time.order must be 2 or 4");
  hamiltonian_.reserve(grid_.channels());
  for (int l = 0; l < grid_.channels(); ++l) hamiltonian_.push_back(radial_hamiltonian(grid_, pot_, l));
  derivative_ = radial_derivative(grid_);
  for (int k = 1; k <= derivative_.half_width(); ++k) derivative_weights_.push_back(derivative_.at(0, k));
  inv_r_ = grid_.radii().cwiseInverse();
  mask_ = absorber_mask(grid_);
  mask_start_ = mask_.size();
  for (Eigen::Index i = 0; i < mask_.size(); ++i) {
    if (mask_(i) != 1.0) {
      mask_start_ = i;
      break;
    }
  }
}

const Propagator::AtomicFactors& Propagator::atomic_factors(double step) const {
  std::lock_guard lock(cache_mutex_);
  auto it = cache_.find(step);
  if (it != cache_.end()) return *it->second;
  auto factors = std::make_shared<AtomicFactors>();
  factors->lu.reserve(hamiltonian_.size());
  const cdouble half_step(0.0, 0.5 * step);
  for (const auto& h : hamiltonian_) {
    BandMatrix<cdouble> m = h.cast<cdouble>();
    m.table() *= half_step;
    m.table().col(m.half_width()).array() += 1.0;
    factors->lu.emplace_back(m);
  }
  return *cache_.emplace(step, std::move(factors)).first->second;
}

void Propagator::advance(WaveState& s, double t_end, double dt) const { run(s, t_end, dt, true); }

void Propagator::retreat(WaveState& s, double t_end, double dt) const { run(s, t_end, dt, false); }

void Propagator::run(WaveState& s, double t_end, double dt, bool forward) const {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (forward && t_end < s.time) throw std::invalid_argument("cannot advance to an earlier time");
  if (!forward && t_end > s.time) throw std::invalid_argument("cannot retreat to a later time");
  if (!(s.grid == grid_)) throw std::invalid_argument("state grid does not match the propagator grid");
  const double span = t_end - s.time;
  if (span == 0.0) return;

  const long n_steps = std::max(1L, static_cast<long>(std::ceil(std::abs(span) / dt - 1e-9)));
  const double step = span / static_cast<double>(n_steps);

  std::vector<char> active(grid_.channels());
  for (int l = 0; l < grid_.channels(); ++l) active[l] = !column_is_zero(s.coeffs, l);

  Workspace ws(grid_.points(), hamiltonian_.front().half_width(), derivative_weights_);
  const double t0 = s.time;
  const bool masking = forward && options_.absorber && mask_start_ < mask_.size();
  for (long k = 0; k < n_steps; ++k) {
    full_step(s.coeffs, active, t0 + static_cast<double>(k) * step, step, ws);
    if (masking) {
      const Eigen::Index len = mask_.size() - mask_start_;
      for (int l = 0; l < grid_.channels(); ++l)
        if (active[l]) s.coeffs.col(l).tail(len).array() *= mask_.tail(len).array();
    }
  }
  if (pulse_) {
    const double phase = ponderomotive_phase(*pulse_, t_end) - ponderomotive_phase(*pulse_, t0);
    if (phase != 0.0) s.coeffs *= std::polar(1.0, -phase);
  }
  s.time = t_end;
}

void Propagator::full_step(Eigen::MatrixXcd& psi, std::vector<char>& active, double t0, double step,
                           Workspace& ws) const {
  if (options_.order == 2) {
    split_step(psi, active, t0, step, ws);
    return;
  }
  split_step(psi, active, t0, kJump1 * step, ws);
  split_step(psi, active, t0 + kJump1 * step, kJump2 * step, ws);
  split_step(psi, active, t0 + (kJump1 + kJump2) * step, kJump1 * step, ws);
}

void Propagator::split_step(Eigen::MatrixXcd& psi, std::vector<char>& active, double t0, double step,
                            Workspace& ws) const {
  const double a = vector_potential_at(t0 + 0.5 * step);
  const int lmax = grid_.l_max;
  const bool coupled = a != 0.0 && lmax >= 1;

  if (coupled) {
    for (int l = 0; l < lmax; ++l) {
      if (!active[l] && !active[l + 1]) continue;
      coupling_pair(psi, l, a, 0.5 * step, ws);
      active[l] = active[l + 1] = 1;
    }
  }

  const AtomicFactors& atomic = atomic_factors(step);
  const Eigen::Index n = grid_.points();
  for (int l = 0; l <= lmax; ++l) {
    if (!active[l]) continue;
    const double* h = hamiltonian_[l].table().data();
    const cdouble* lu = atomic.lu[l].factors().table().data();
    const cdouble* piv = atomic.lu[l].inverse_pivots().data();
    cdouble* u = psi.col(l).data();
    switch (hamiltonian_[l].half_width()) {
      case 1: crank_nicolson_kernel<1>(h, lu, piv, n, 0.5 * step, u, ws.pad.data()); break;
      case 2: crank_nicolson_kernel<2>(h, lu, piv, n, 0.5 * step, u, ws.pad.data()); break;
      default: crank_nicolson_kernel<3>(h, lu, piv, n, 0.5 * step, u, ws.pad.data()); break;
    }
  }

  if (coupled) {
    for (int l = lmax - 1; l >= 0; --l) coupling_pair(psi, l, a, 0.5 * step, ws);
  }
}

void Propagator::coupling_pair(Eigen::MatrixXcd& psi, int l, double a, double tau, Workspace& ws) const {
  const double c = dipole_coupling(l);
  // (l+1)/r part: generator c (l+1)/r sigma_y, Cayley rotation over tau/2.
  // Derivative part: -i c D sigma_x, diagonal in (u_l +- u_{l+1})/sqrt2.
  const double half_angle = 0.25 * tau * a * c * (l + 1.0);
  ws.cayley.compute(0.5 * tau * a * c);
  const Eigen::Index n = grid_.points();
  cdouble* lower = psi.col(l).data();
  cdouble* upper = psi.col(l + 1).data();
  double* cs = ws.cos.data();
  double* sn = ws.sin.data();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = half_angle * inv_r_[i];
    const double den = 1.0 / (1.0 + h * h);
    cs[i] = (1.0 - h * h) * den;
    sn[i] = 2.0 * h * den;
  }

  const double s2 = 0.5 * std::numbers::sqrt2;
  cdouble* plus = ws.cayley.plus();
  cdouble* minus = ws.cayley.minus();
  for (Eigen::Index i = 0; i < n; ++i) {
    const cdouble x = cs[i] * lower[i] - sn[i] * upper[i];
    const cdouble y = sn[i] * lower[i] + cs[i] * upper[i];
    plus[i] = s2 * (x + y);
    minus[i] = s2 * (x - y);
  }
  ws.cayley.apply();
  for (Eigen::Index i = 0; i < n; ++i) {
    const cdouble x = s2 * (plus[i] + minus[i]);
    const cdouble y = s2 * (plus[i] - minus[i]);
    lower[i] = cs[i] * x - sn[i] * y;
    upper[i] = sn[i] * x + cs[i] * y;
  }
}

WaveState propagate(const WaveState& s, const PotentialSpec& pot, std::optional<PulseParams> pulse, double t_end,
                    double dt, PropagatorOptions options) {
  Propagator prop(s.grid, pot, pulse, options);
  WaveState out = s;
  prop.advance(out, t_end, dt);
  return out;
}

}  // namespace heisencorr
