#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace heisencorr::detail {

/// Cayley transforms of a Toeplitz antisymmetric band matrix D with weights
/// d_1 ... d_w (D(i, i+k) = d_k, D(i, i-k) = -d_k):
///   plus  <- (I + bD)^{-1} (I - bD) plus
///   minus <- (I - bD)^{-1} (I + bD) minus = (I + bD)^{-T} (I + bD)^T minus
/// acting in place on the buffers plus() and minus().
///
/// The unpivoted LU rows of a Toeplitz band matrix converge geometrically, so
/// only the rows up to convergence are stored and the last one is reused.
class ToeplitzCayley {
 public:
  using cdouble = std::complex<double>;

  ToeplitzCayley(std::vector<double> weights, Eigen::Index n)
      : w_(static_cast<int>(weights.size())), n_(n), d_(std::move(weights)) {
    if (w_ < 1 || w_ > 3) throw std::invalid_argument("unsupported stencil width");
    pad_a_.assign(n_ + 2 * w_, cdouble(0.0));
    pad_b_.assign(n_ + 2 * w_, cdouble(0.0));
    rhs_a_.resize(n_);
    rhs_b_.resize(n_);
  }

  /// Length-n work vectors with zero padding on both sides.
  cdouble* plus() { return pad_a_.data() + w_; }
  cdouble* minus() { return pad_b_.data() + w_; }

  void compute(double b) {
    const int w = w_;
    b_ = b;
    lower_.clear();
    upper_.clear();
    inv_diag_.clear();
    rows_ = 0;
    auto a_entry = [&](int k) { return k == 0 ? 1.0 : (k > 0 ? b * d_[k - 1] : -b * d_[-k - 1]); };
    auto u_at = [&](Eigen::Index m, Eigen::Index j) { return upper_[m * (w + 1) + (j - m)]; };
    for (Eigen::Index i = 0; i < n_; ++i) {
      lower_.resize((i + 1) * w, 0.0);
      upper_.resize((i + 1) * (w + 1), 0.0);
      double* lrow = &lower_[i * w];
      double* urow = &upper_[i * (w + 1)];
      for (int k = w; k >= 1; --k) {
        const Eigen::Index j = i - k;
        if (j < 0) continue;
        double s = a_entry(-k);
        for (Eigen::Index m = std::max<Eigen::Index>(0, std::max(i, j) - w); m < j; ++m)
          s -= lrow[i - m - 1] * u_at(m, j);
        lrow[k - 1] = s * inv_diag_[j];
      }
      for (int k = 0; k <= w; ++k) {
        const Eigen::Index j = i + k;
        double s = a_entry(k);
        for (Eigen::Index m = std::max<Eigen::Index>(0, j - w); m < i; ++m) s -= lrow[i - m - 1] * u_at(m, j);
        urow[k] = s;
      }
      if (urow[0] == 0.0) throw std::runtime_error("ToeplitzCayley: zero pivot");
      inv_diag_.push_back(1.0 / urow[0]);
      rows_ = i + 1;
      if (i > w && converged(i)) break;
    }
  }

  void apply() {
    switch (w_) {
      case 1: apply_impl<1>(); break;
      case 2: apply_impl<2>(); break;
      default: apply_impl<3>(); break;
    }
  }

 private:
  bool converged(Eigen::Index i) const {
    const double tol = 4.0 * std::numeric_limits<double>::epsilon();
    for (int k = 0; k < w_; ++k)
      if (std::abs(lower_[i * w_ + k] - lower_[(i - 1) * w_ + k]) > tol) return false;
    for (int k = 0; k <= w_; ++k)
      if (std::abs(upper_[i * (w_ + 1) + k] - upper_[(i - 1) * (w_ + 1) + k]) > tol) return false;
    return true;
  }

  template <int W>
  void apply_impl() {
    const Eigen::Index n = n_;
    const Eigen::Index last = rows_ - 1;
    auto lrow = [&](Eigen::Index i) { return &lower_[std::min(i, last) * W]; };
    auto urow = [&](Eigen::Index i) { return &upper_[std::min(i, last) * (W + 1)]; };
    auto inv = [&](Eigen::Index i) { return inv_diag_[std::min(i, last)]; };
    const Eigen::Index steady = std::min(n, rows_ + W);
    const double* lc = lrow(last);
    const double* uc = urow(last);
    const double ic = inv(last);

    cdouble* x = pad_a_.data() + W;
    cdouble* y = pad_b_.data() + W;
    cdouble* plus = rhs_a_.data();
    cdouble* minus = rhs_b_.data();
    double dk[W];
    for (int k = 0; k < W; ++k) dk[k] = b_ * d_[k];

    // Right-hand sides: (I - bD) x for plus, (I + bD) y for minus.
    for (Eigen::Index i = 0; i < n; ++i) {
      cdouble dx(0.0), dy(0.0);
      for (int k = 1; k <= W; ++k) {
        dx += dk[k - 1] * (x[i + k] - x[i - k]);
        dy += dk[k - 1] * (y[i + k] - y[i - k]);
      }
      plus[i] = x[i] - dx;
      minus[i] = y[i] + dy;
    }

    // Forward sweeps: L for plus, U^T for minus (two independent recurrences).
    for (Eigen::Index i = 0; i < steady; ++i) {
      const double* l = lrow(i);
      cdouble ax = plus[i];
      cdouble ay = minus[i];
      for (int k = 1; k <= W; ++k) {
        ax -= l[k - 1] * x[i - k];
        ay -= urow(std::max<Eigen::Index>(i - k, 0))[k] * y[i - k];
      }
      x[i] = ax;
      y[i] = ay * inv(i);
    }
    for (Eigen::Index i = steady; i < n; ++i) {
      cdouble ax = plus[i];
      cdouble ay = minus[i];
      for (int k = 1; k <= W; ++k) {
        ax -= lc[k - 1] * x[i - k];
        ay -= uc[k] * y[i - k];
      }
      x[i] = ax;
      y[i] = ay * ic;
    }

    // Backward sweeps: U for plus, L^T (unit upper) for minus.
    for (Eigen::Index i = n - 1; i >= steady; --i) {
      cdouble ax = x[i];
      cdouble ay = y[i];
      for (int k = 1; k <= W; ++k) {
        ax -= uc[k] * x[i + k];
        ay -= lc[k - 1] * y[i + k];
      }
      x[i] = ax * ic;
      y[i] = ay;
    }
    for (Eigen::Index i = std::min(steady, n) - 1; i >= 0; --i) {
      const double* u = urow(i);
      cdouble ax = x[i];
      cdouble ay = y[i];
      for (int k = 1; k <= W; ++k) {
        ax -= u[k] * x[i + k];
        ay -= lrow(i + k)[k - 1] * y[i + k];
      }
      x[i] = ax * inv(i);
      y[i] = ay;
    }
  }

  int w_;
  Eigen::Index n_;
  std::vector<double> d_;
  double b_ = 0.0;
  Eigen::Index rows_ = 0;
  std::vector<double> lower_, upper_, inv_diag_;
  std::vector<cdouble> pad_a_, pad_b_, rhs_a_, rhs_b_;
};

}  // namespace heisencorr::detail
