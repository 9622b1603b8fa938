/**
 * @file linalg.hpp
 * @brief Dense real matrices and the small eigensolvers the stability
 *        analysis is built on.
 *
 * Sizes here are small (a few hundred rows at most), so everything is dense,
 * row-major and computed in-house: cyclic Jacobi for symmetric spectra and
 * balancing + Hessenberg reduction + Francis double-shift QR for general
 * real matrices. All functions are pure.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netstab/error.hpp"

namespace netstab {

using Complex = std::complex<double>;

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
      : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows_ * cols_) {
      throw InvalidArgument("DenseMatrix: entry count " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(rows_) + "x" +
                            std::to_string(cols_));
    }
  }

  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw InvalidArgument("DenseMatrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  [[nodiscard]] static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  [[nodiscard]] static DenseMatrix diagonal(std::span<const double> d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] std::span<double> data() noexcept { return data_; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }

  [[nodiscard]] std::vector<double> column(std::size_t j) const {
    std::vector<double> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  [[nodiscard]] DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  [[nodiscard]] double trace() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
  }

  /// Maximum absolute row sum.
  [[nodiscard]] double inf_norm() const noexcept {
    double best = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (double v : row(i)) s += std::abs(v);
      best = std::max(best, s);
    }
    return best;
  }

  /// Maximum absolute column sum.
  [[nodiscard]] double one_norm() const noexcept {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
      best = std::max(best, s);
    }
    return best;
  }

  [[nodiscard]] double frobenius_norm() const noexcept {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  [[nodiscard]] double max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  [[nodiscard]] bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    require_same_shape(o, "+");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& o) {
    require_same_shape(o, "-");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  DenseMatrix& operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(DenseMatrix a, double s) { return a *= s; }
  friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw InvalidArgument("DenseMatrix: cannot multiply " + a.shape() + " by " + b.shape());
    }
    DenseMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend std::vector<double> operator*(const DenseMatrix& a, std::span<const double> x) {
    if (a.cols_ != x.size()) throw InvalidArgument("DenseMatrix: vector length mismatch");
    std::vector<double> y(a.rows_, 0.0);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

  [[nodiscard]] std::string shape() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

 private:
  void require_same_shape(const DenseMatrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw InvalidArgument(std::string("DenseMatrix: shape mismatch in '") + op + "': " +
                            shape() + " vs " + o.shape());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Largest absolute entrywise difference; shapes must agree.
[[nodiscard]] inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument("max_abs_diff: shape mismatch " + a.shape() + " vs " + b.shape());
  }
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

struct SymmetricSpectrum {
  std::vector<double> eigenvalues;  // ascending
  DenseMatrix eigenvectors;         // column j pairs with eigenvalues[j]
};

struct GershgorinDisc {
  double center = 0.0;
  double radius = 0.0;
  std::size_t row_index = 0;

  [[nodiscard]] double right_edge() const noexcept { return center + radius; }
  [[nodiscard]] bool contains(Complex z, double slack = 0.0) const noexcept {
    return std::abs(z - Complex(center, 0.0)) <= radius + slack;
  }
};

namespace detail {

inline void require_square(const DenseMatrix& a, const char* who) {
  if (!a.is_square()) {
    throw InvalidArgument(std::string(who) + ": matrix must be square, got " + a.shape());
  }
}

inline void require_finite(const DenseMatrix& a, const char* who) {
  if (!a.all_finite()) throw InvalidArgument(std::string(who) + ": matrix has non-finite entries");
}

}  // namespace detail

/// Orders a spectrum by (real part, imaginary part), both ascending.
inline void sort_spectrum(std::vector<Complex>& values) {
  std::sort(values.begin(), values.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

/// Block-diagonal matrix with the given square blocks along the diagonal.
[[nodiscard]] inline DenseMatrix direct_sum(std::span<const DenseMatrix> blocks) {
  std::size_t total = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (!blocks[b].is_square()) {
      throw InvalidArgument("direct_sum: block " + std::to_string(b) + " is not square (" +
                            blocks[b].shape() + ")");
    }
    total += blocks[b].rows();
  }
  DenseMatrix out(total, total);
  std::size_t offset = 0;
  for (const auto& blk : blocks) {
    for (std::size_t i = 0; i < blk.rows(); ++i)
      for (std::size_t j = 0; j < blk.cols(); ++j) out(offset + i, offset + j) = blk(i, j);
    offset += blk.rows();
  }
  return out;
}

[[nodiscard]] inline DenseMatrix direct_sum(std::initializer_list<DenseMatrix> blocks) {
  return direct_sum(std::span<const DenseMatrix>(blocks.begin(), blocks.size()));
}

// ---------------------------------------------------------------------------
// LU factorization with partial pivoting
// ---------------------------------------------------------------------------

/// PA = LU with unit-lower L and U packed into one matrix.
class LuDecomposition {
 public:
  explicit LuDecomposition(const DenseMatrix& a) : lu_(a), perm_(a.rows()) {
    detail::require_square(a, "LuDecomposition");
    const std::size_t n = a.rows();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        if (std::abs(lu_(i, k)) > best) {
          best = std::abs(lu_(i, k));
          piv = i;
        }
      }
      if (best == 0.0) {
        singular_ = true;
        continue;
      }
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
        std::swap(perm_[k], perm_[piv]);
        sign_ = -sign_;
      }
      const double pivot = lu_(k, k);
      for (std::size_t i = k + 1; i < n; ++i) {
        const double f = lu_(i, k) / pivot;
        lu_(i, k) = f;
        if (f == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  [[nodiscard]] bool singular() const noexcept { return singular_; }
  [[nodiscard]] std::size_t size() const noexcept { return lu_.rows(); }

  [[nodiscard]] double determinant() const noexcept {
    if (singular_) return 0.0;
    double d = sign_;
    for (std::size_t i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
    return d;
  }

  /// Solves A x = b.
  [[nodiscard]] std::vector<double> solve(std::span<const double> b) const {
    require_solvable(b.size());
    const std::size_t n = size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
      x[i] /= lu_(i, i);
    }
    return x;
  }

  /// Solves A^T x = b.
  [[nodiscard]] std::vector<double> solve_transpose(std::span<const double> b) const {
    require_solvable(b.size());
    const std::size_t n = size();
    std::vector<double> w(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) w[i] -= lu_(j, i) * w[j];
      w[i] /= lu_(i, i);
    }
    for (std::size_t i = n; i-- > 0;)
      for (std::size_t j = i + 1; j < n; ++j) w[i] -= lu_(j, i) * w[j];
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = w[i];
    return x;
  }

  /// Solves A X = B column by column.
  [[nodiscard]] DenseMatrix solve(const DenseMatrix& b) const {
    require_solvable(b.rows());
    DenseMatrix x(b.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
      const auto col = solve(b.column(j));
      for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = col[i];
    }
    return x;
  }

 private:
  void require_solvable(std::size_t len) const {
    if (singular_) throw SingularMatrixError("LuDecomposition: matrix is singular", INFINITY);
    if (len != size()) throw InvalidArgument("LuDecomposition: right-hand side length mismatch");
  }

  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
  double sign_ = 1.0;
  bool singular_ = false;
};

/**
 * @brief 1-norm condition number estimate, ||A||_1 * est(||A^-1||_1).
 *
 * Hager's estimator with Higham's alternating-sign safeguard vector; costs a
 * handful of solves with the existing factorization. Returns +inf when the
 * factorization is singular.
 */
[[nodiscard]] inline double condition_estimate(const DenseMatrix& a, const LuDecomposition& lu) {
  if (lu.singular()) return std::numeric_limits<double>::infinity();
  const std::size_t n = a.rows();
  if (n == 0) return 1.0;
  auto norm1 = [](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
  };

  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  double estimate = 0.0;
  std::size_t last_j = n;
  for (int iter = 0; iter < 5; ++iter) {
    const auto y = lu.solve(x);
    estimate = std::max(estimate, norm1(y));
    std::vector<double> xi(n);
    for (std::size_t i = 0; i < n; ++i) xi[i] = y[i] >= 0.0 ? 1.0 : -1.0;
    const auto z = lu.solve_transpose(xi);
    std::size_t j = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(z[i]) > std::abs(z[j])) j = i;
    double ztx = 0.0;
    for (std::size_t i = 0; i < n; ++i) ztx += z[i] * x[i];
    if (std::abs(z[j]) <= ztx || j == last_j) break;
    std::fill(x.begin(), x.end(), 0.0);
    x[j] = 1.0;
    last_j = j;
  }

  std::vector<double> alt(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mag = 1.0 + (n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0);
    alt[i] = (i % 2 == 0) ? mag : -mag;
  }
  const auto y_alt = lu.solve(alt);
  estimate = std::max(estimate, 2.0 * norm1(y_alt) / (3.0 * static_cast<double>(n)));

  return a.one_norm() * estimate;
}

[[nodiscard]] inline double determinant(const DenseMatrix& a) {
  return LuDecomposition(a).determinant();
}

// ---------------------------------------------------------------------------
// Symmetric eigenproblem: cyclic Jacobi
// ---------------------------------------------------------------------------

inline constexpr int kJacobiMaxSweeps = 50;

/**
 * @brief Full eigendecomposition of a symmetric matrix by cyclic Jacobi.
 *
 * Sweeps until the off-diagonal Frobenius norm drops to 1e-12 of ||A||_F.
 * Eigenvalues come back ascending; each eigenvector's largest-magnitude
 * component is made positive so output is reproducible.
 */
[[nodiscard]] inline SymmetricSpectrum sym_eigen(const DenseMatrix& a_in) {
  detail::require_square(a_in, "sym_eigen");
  detail::require_finite(a_in, "sym_eigen");
  const std::size_t n = a_in.rows();
  const double asym = (a_in - a_in.transpose()).inf_norm();
  if (asym > 1e-10 * (1.0 + a_in.inf_norm())) {
    throw InvalidArgument("sym_eigen: matrix is not symmetric (||A - A^T|| = " +
                          std::to_string(asym) + ")");
  }

  DenseMatrix a = a_in;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = avg;
      a(j, i) = avg;
    }
  DenseMatrix v = DenseMatrix::identity(n);

  const double target = 1e-12 * a.frobenius_norm();
  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  double off = off_norm();
  int sweep = 0;
  while (off > target) {
    if (sweep == kJacobiMaxSweeps) {
      throw ConvergenceError("sym_eigen: Jacobi did not converge in " +
                                 std::to_string(kJacobiMaxSweeps) + " sweeps (off-diagonal norm " +
                                 std::to_string(off) + ")",
                             off, sweep);
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(p, k) = a(k, p);
          a(k, q) = s * akp + c * akq;
          a(q, k) = a(k, q);
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    ++sweep;
    off = off_norm();
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymmetricSpectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    out.eigenvalues[col] = a(src, src);
    std::size_t big = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (std::abs(v(k, src)) > std::abs(v(big, src)) + 1e-14) big = k;
    const double sign = v(big, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, col) = sign * v(k, src);
  }
  return out;
}

// ---------------------------------------------------------------------------
// General real eigenproblem: balance, Hessenberg, Francis double-shift QR
// ---------------------------------------------------------------------------

namespace detail {

// 1-based view over a row-major square buffer; the QR sweep below reads far
// more naturally with the textbook index ranges.
class OneBased {
 public:
  explicit OneBased(DenseMatrix& m) : m_(m) {}
  double& operator()(std::size_t i, std::size_t j) noexcept { return m_(i - 1, j - 1); }

 private:
  DenseMatrix& m_;
};

inline void balance(DenseMatrix& m) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const std::size_t n = m.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(m(j, i));
        r += std::abs(m(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) m(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) m(j, i) *= f;
      }
    }
  }
}

// Gaussian elimination with pivoting to upper Hessenberg form.
inline void reduce_to_hessenberg(DenseMatrix& mat) {
  const std::size_t n = mat.rows();
  OneBased a(mat);
  for (std::size_t m = 2; m < n; ++m) {
    double x = 0.0;
    std::size_t i = m;
    for (std::size_t j = m; j <= n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        i = j;
      }
    }
    if (i != m) {
      for (std::size_t j = m - 1; j <= n; ++j) std::swap(a(i, j), a(m, j));
      for (std::size_t j = 1; j <= n; ++j) std::swap(a(j, i), a(j, m));
    }
    if (x != 0.0) {
      for (i = m + 1; i <= n; ++i) {
        double y = a(i, m - 1);
        if (y == 0.0) continue;
        y /= x;
        a(i, m - 1) = y;
        for (std::size_t j = m; j <= n; ++j) a(i, j) -= y * a(m, j);
        for (std::size_t j = 1; j <= n; ++j) a(j, m) += y * a(j, i);
      }
    }
  }
  for (std::size_t i = 3; i <= n; ++i)
    for (std::size_t j = 1; j + 1 < i; ++j) a(i, j) = 0.0;
}

// Francis double-shift QR on an upper Hessenberg matrix. Total iteration
// budget is 30n, with exceptional shifts after 10 and 20 stalled sweeps.
inline std::vector<Complex> hessenberg_qr(DenseMatrix& mat) {
  const std::size_t n = mat.rows();
  OneBased a(mat);
  std::vector<double> wr(n + 1, 0.0);
  std::vector<double> wi(n + 1, 0.0);

  double anorm = 0.0;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = std::max<std::size_t>(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));

  const int budget = 30 * static_cast<int>(n);
  int total_its = 0;
  std::size_t nn = n;
  double t = 0.0;
  while (nn >= 1) {
    int its = 0;
    std::size_t l = 0;
    do {
      for (l = nn; l >= 2; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) + s == s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      if (l == 0) l = 1;
      double x = a(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = 0.0;
        --nn;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + std::copysign(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -z;
            wi[nn] = z;
          }
          nn -= 2;
        } else {
          if (total_its >= budget) {
            std::string msg = "gen_eigenvalues: Francis QR did not converge within " +
                              std::to_string(budget) + " iterations; " +
                              std::to_string(n - nn) + " of " + std::to_string(n) +
                              " eigenvalues deflated, active block " + std::to_string(l) + ".." +
                              std::to_string(nn) + ", last subdiagonal |h| = " +
                              std::to_string(std::abs(a(nn, nn - 1)));
            throw ConvergenceError(msg, std::abs(a(nn, nn - 1)), total_its);
          }
          if (its == 10 || its == 20) {
            t += x;
            for (std::size_t i = 1; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          ++total_its;
          std::size_t m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (;; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (std::size_t i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (std::size_t k = m; k + 1 <= nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (std::size_t j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k != nn - 1) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const std::size_t mmin = nn < k + 3 ? nn : k + 3;
            for (std::size_t i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k != nn - 1) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (nn >= 1 && l + 1 < nn);
  }

  std::vector<Complex> out;
  out.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
  return out;
}

}  // namespace detail

/**
 * @brief All eigenvalues of a real square matrix, with multiplicity.
 *
 * Balancing, Hessenberg reduction, then Francis double-shift QR. Values with
 * |im| <= 1e-9 (1 + |re|) are snapped to the real axis. Output is sorted by
 * (re, im).
 */
[[nodiscard]] inline std::vector<Complex> gen_eigenvalues(const DenseMatrix& a) {
  detail::require_square(a, "gen_eigenvalues");
  detail::require_finite(a, "gen_eigenvalues");
  const std::size_t n = a.rows();
  if (n == 0) return {};
  if (n == 1) return {Complex(a(0, 0), 0.0)};

  DenseMatrix work = a;
  detail::balance(work);
  detail::reduce_to_hessenberg(work);
  auto values = detail::hessenberg_qr(work);
  for (auto& z : values) {
    if (std::abs(z.imag()) <= 1e-9 * (1.0 + std::abs(z.real()))) z = Complex(z.real(), 0.0);
  }
  sort_spectrum(values);
  return values;
}

/// One disc per row: center a_rr, radius sum_{t != r} |a_rt|.
[[nodiscard]] inline std::vector<GershgorinDisc> gershgorin_discs(const DenseMatrix& a) {
  detail::require_square(a, "gershgorin_discs");
  std::vector<GershgorinDisc> discs;
  discs.reserve(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double radius = 0.0;
    for (std::size_t t = 0; t < a.cols(); ++t)
      if (t != r) radius += std::abs(a(r, t));
    discs.push_back({a(r, r), radius, r});
  }
  return discs;
}

/// Distance from z to the union of discs (0 when inside one).
[[nodiscard]] inline double distance_to_discs(Complex z, std::span<const GershgorinDisc> discs) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& d : discs) {
    best = std::min(best, std::max(0.0, std::abs(z - Complex(d.center, 0.0)) - d.radius));
  }
  return best;
}

inline constexpr double kSingularCondition = 1e12;

/**
 * @brief P^{-1} A P via an LU solve against A P; the inverse is never formed.
 *
 * Rejects P whose 1-norm condition estimate exceeds 1e12.
 */
[[nodiscard]] inline DenseMatrix similarity_transform(const DenseMatrix& a, const DenseMatrix& p) {
  detail::require_square(a, "similarity_transform");
  detail::require_square(p, "similarity_transform");
  if (a.rows() != p.rows()) {
    throw InvalidArgument("similarity_transform: A is " + a.shape() + " but P is " + p.shape());
  }
  const LuDecomposition lu(p);
  const double cond = condition_estimate(p, lu);
  if (lu.singular() || !(cond <= kSingularCondition)) {
    throw SingularMatrixError("similarity_transform: P is numerically singular (condition ~ " +
                                  std::to_string(cond) + ")",
                              cond);
  }
  return lu.solve(a * p);
}

/// Largest real part in a spectrum.
[[nodiscard]] inline double spectral_abscissa(std::span<const Complex> spectrum) {
  if (spectrum.empty()) throw InvalidArgument("spectral_abscissa: empty spectrum");
  double best = -std::numeric_limits<double>::infinity();
  for (auto z : spectrum) best = std::max(best, z.real());
  return best;
}

}  // namespace netstab
