#pragma once

#include <Eigen/Core>

#include <cassert>
#include <complex>
#include <stdexcept>

namespace heisencorr {

/// Square band matrix with equal lower and upper bandwidth.
///
/// Row i stores entries A(i, i-w) ... A(i, i+w) in columns 0 ... 2w of a
/// row-major coefficient table; entries that fall outside the matrix are kept
/// at zero.
template <typename Scalar>
class BandMatrix {
 public:
  using Table = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  BandMatrix() = default;
  BandMatrix(Eigen::Index n, int half_width) : width_(half_width), table_(Table::Zero(n, 2 * half_width + 1)) {}

  Eigen::Index size() const { return table_.rows(); }
  int half_width() const { return width_; }

  /// Entry (i, j); |i - j| <= half_width is required.
  Scalar& at(Eigen::Index i, Eigen::Index j) {
    assert(std::abs(i - j) <= width_);
    return table_(i, j - i + width_);
  }
  Scalar at(Eigen::Index i, Eigen::Index j) const {
    if (std::abs(i - j) > width_) return Scalar(0);
    return table_(i, j - i + width_);
  }

  Table& table() { return table_; }
  const Table& table() const { return table_; }

  template <typename Other>
  BandMatrix<Other> cast() const {
    BandMatrix<Other> out(size(), width_);
    out.table() = table_.template cast<Other>();
    return out;
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
    const Eigen::Index n = size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = std::max<Eigen::Index>(0, i - width_); j <= std::min(n - 1, i + width_); ++j)
        d(i, j) = at(i, j);
    return d;
  }

 private:
  int width_ = 0;
  Table table_;
};

/// y = A x for a band matrix and a dense vector (scalars may differ).
template <typename MatScalar, typename Vec, typename Out>
void band_multiply(const BandMatrix<MatScalar>& a, const Eigen::MatrixBase<Vec>& x,
                   Eigen::MatrixBase<Out> const& y_) {
  auto& y = const_cast<Eigen::MatrixBase<Out>&>(y_);
  using S = typename Out::Scalar;
  const Eigen::Index n = a.size();
  const int w = a.half_width();
  const auto& t = a.table();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - w);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + w);
    S acc(0);
    for (Eigen::Index j = lo; j <= hi; ++j) acc += t(i, j - i + w) * x(j);
    y(i) = acc;
  }
}

/// LU factorization of a band matrix without pivoting.
///
/// Intended for matrices whose Hermitian part is definite (I + i*dt*H with
/// Hermitian H, or I + b*D with antisymmetric real D), for which elimination
/// without pivoting is stable. Fill-in stays inside the band.
template <typename Scalar>
class BandLU {
 public:
  BandLU() = default;
  explicit BandLU(const BandMatrix<Scalar>& a) { compute(a); }

  void compute(const BandMatrix<Scalar>& a) {
    lu_ = a;
    const Eigen::Index n = lu_.size();
    const int w = lu_.half_width();
    auto& t = lu_.table();
    inv_pivot_.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const Scalar pivot = t(k, w);
      if (pivot == Scalar(0)) throw std::runtime_error("BandLU: zero pivot");
      const Scalar inv = Scalar(1) / pivot;
      inv_pivot_(k) = inv;
      const Eigen::Index last = std::min<Eigen::Index>(n - 1, k + w);
      for (Eigen::Index i = k + 1; i <= last; ++i) {
        Scalar& lik = t(i, k - i + w);
        lik *= inv;
        if (lik == Scalar(0)) continue;
        for (Eigen::Index j = k + 1; j <= last; ++j) t(i, j - i + w) -= lik * t(k, j - k + w);
      }
    }
  }

  /// Packed factors: strictly lower part holds L (unit diagonal implied), the
  /// rest holds U, in the band layout of the input matrix.
  const BandMatrix<Scalar>& factors() const { return lu_; }
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& inverse_pivots() const { return inv_pivot_; }

  /// Solves A x = b in place.
  template <typename Vec>
  void solve_in_place(Eigen::MatrixBase<Vec>& x) const {
    const Eigen::Index n = lu_.size();
    const int w = lu_.half_width();
    const auto& t = lu_.table();
    for (Eigen::Index i = 1; i < n; ++i) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, i - w);
      typename Vec::Scalar acc = x(i);
      for (Eigen::Index j = lo; j < i; ++j) acc -= t(i, j - i + w) * x(j);
      x(i) = acc;
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + w);
      typename Vec::Scalar acc = x(i);
      for (Eigen::Index j = i + 1; j <= hi; ++j) acc -= t(i, j - i + w) * x(j);
      x(i) = acc * inv_pivot_(i);
    }
  }

  /// Solves A^T x = b in place using the same factors (A^T = U^T L^T).
  template <typename Vec>
  void solve_transposed_in_place(Eigen::MatrixBase<Vec>& x) const {
    const Eigen::Index n = lu_.size();
    const int w = lu_.half_width();
    const auto& t = lu_.table();
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, i - w);
      typename Vec::Scalar acc = x(i);
      for (Eigen::Index j = lo; j < i; ++j) acc -= t(j, i - j + w) * x(j);
      x(i) = acc * inv_pivot_(i);
    }
    for (Eigen::Index i = n - 2; i >= 0; --i) {
      const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + w);
      typename Vec::Scalar acc = x(i);
      for (Eigen::Index j = i + 1; j <= hi; ++j) acc -= t(j, i - j + w) * x(j);
      x(i) = acc;
    }
  }

 private:
  BandMatrix<Scalar> lu_;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inv_pivot_;
};

}  // namespace heisencorr
