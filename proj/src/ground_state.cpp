#include "heisencorr/ground_state.hpp"

#include "heisencorr/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace heisencorr {

namespace {

BandMatrix<double> shifted(const BandMatrix<double>& h, double sigma) {
  BandMatrix<double> a = h;
  a.table().col(a.half_width()).array() -= sigma;
  return a;
}

}  // namespace

int count_eigenvalues_below(const BandMatrix<double>& h, double sigma) {
  // Symmetric elimination without pivoting; the pivots are the D of LDL^T.
  BandMatrix<double> a = shifted(h, sigma);
  const Eigen::Index n = a.size();
  const int w = a.half_width();
  auto& t = a.table();
  int negative = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    double pivot = t(k, w);
    if (pivot == 0.0) pivot = std::numeric_limits<double>::epsilon() * (1.0 + std::abs(sigma));
    if (pivot < 0.0) ++negative;
    const Eigen::Index last = std::min<Eigen::Index>(n - 1, k + w);
    for (Eigen::Index i = k + 1; i <= last; ++i) {
      const double lik = t(i, k - i + w) / pivot;
      if (lik == 0.0) continue;
      for (Eigen::Index j = k + 1; j <= last; ++j) t(i, j - i + w) -= lik * t(k, j - k + w);
    }
  }
  return negative;
}

EigenResult build_ground_state(const RadialGrid& grid, const PotentialSpec& pot) {
  grid.validate();
  pot.validate();
  if (pot.is_free()) throw std::invalid_argument("free particle has no bound ground state");

  const BandMatrix<double> h = radial_hamiltonian(grid, pot, 0);
  const Eigen::Index n = h.size();
  const int w = h.half_width();

  // Gershgorin lower bound and the smallest diagonal entry as an upper bound.
  double lo = std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = h.table()(i, w);
    const double radius = h.table().row(i).cwiseAbs().sum() - std::abs(d);
    lo = std::min(lo, d - radius);
    hi = std::min(hi, d);
  }
  hi += 1e-6 * (1.0 + std::abs(hi));

  for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_eigenvalues_below(h, mid) == 0) lo = mid;
    else hi = mid;
  }

  // Inverse iteration just below the bracketed eigenvalue.
  const double sigma = lo - 1e-9 * (1.0 + std::abs(lo));
  const BandLU<double> lu(shifted(h, sigma));
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n).normalized();
  Eigen::VectorXd hx(n);
  double energy = 0.0;
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    lu.solve_in_place(x);
    x.normalize();
    band_multiply(h, x, hx);
    energy = x.dot(hx);
    if ((hx - energy * x).norm() <= 1e-9 * (1.0 + std::abs(energy))) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericalFailure("ground-state eigensolve did not converge");

  // fix the sign: positive near the origin
  Eigen::Index peak = 0;
  x.cwiseAbs().maxCoeff(&peak);
  if (x(peak) < 0.0) x = -x;

  EigenResult result{WaveState(grid), energy};
  result.state.coeffs.col(0) = (x / std::sqrt(grid.dr)).cast<cdouble>();
  return result;
}

}  // namespace heisencorr
