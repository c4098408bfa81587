#pragma once

#include "abnet/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace abnet {

/// Dense row-major matrix over an exact ring.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    for (const auto& row : init) {
      if (row.size() != cols_) throw InvalidArgument("ragged matrix literal");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }
  std::vector<T> column(std::size_t j) const {
    std::vector<T> out;
    for (std::size_t i = 0; i < rows_; ++i) out.push_back((*this)(i, j));
    return out;
  }

  /// Submatrix on the given row and column index lists.
  Matrix select(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const {
    Matrix out(rs.size(), cs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < cs.size(); ++j) out(i, j) = (*this)(rs[i], cs[j]);
    return out;
  }

  Matrix transpose() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw InvalidArgument("matrix product: dimension mismatch");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += a(i, k) * b(k, j);
      }
    return out;
  }

  friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& x) {
    if (a.cols_ != x.size()) throw InvalidArgument("matrix-vector product: dimension mismatch");
    std::vector<T> out(a.rows_, T(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) out[i] += a(i, j) * x[j];
    return out;
  }

  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidArgument("matrix difference: dimension mismatch");
    Matrix out = a;
    for (std::size_t k = 0; k < out.data_.size(); ++k) out.data_[k] -= b.data_[k];
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rational>;

inline RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
  return out;
}

/// Integer matrix if every entry is integral.
inline std::optional<IntMatrix> to_integer(const RatMatrix& m) {
  IntMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (denominator(m(i, j)) != 1) return std::nullopt;
      out(i, j) = numerator(m(i, j));
    }
  return out;
}

namespace detail {

/// Clears denominators row by row: m = diag(1/scale) * result.
inline std::pair<IntMatrix, std::vector<Int>> clear_row_denominators(const RatMatrix& m) {
  IntMatrix out(m.rows(), m.cols());
  std::vector<Int> scale(m.rows(), Int(1));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) scale[i] = lcm(scale[i], denominator(m(i, j)));
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = numerator(m(i, j) * scale[i]);
  }
  return {std::move(out), std::move(scale)};
}

/// Bareiss elimination with row pivoting; returns det.
inline Int bareiss_determinant(IntMatrix a) {
  const std::size_t n = a.rows();
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a(p, k) == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(k, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return n == 0 ? Int(1) : Int(sign * a(n - 1, n - 1));
}

}  // namespace detail

inline Rational determinant(const RatMatrix& m) {
  if (!m.square()) throw InvalidArgument("determinant of a non-square matrix");
  auto [a, scale] = detail::clear_row_denominators(m);
  Rational det(detail::bareiss_determinant(std::move(a)));
  for (const auto& s : scale) det /= s;
  return det;
}

/// Determinants of the k x k leading submatrices, k = 1..n. Bareiss without
/// pivoting produces them as successive pivots; once a pivot vanishes the
/// rest are computed one by one.
inline std::vector<Rational> leading_principal_minors(const RatMatrix& m) {
  if (!m.square()) throw InvalidArgument("leading_principal_minors of a non-square matrix");
  const std::size_t n = m.rows();
  auto [a, scale] = detail::clear_row_denominators(m);
  std::vector<Rational> out;
  Rational row_scale = 1;
  Int prev = 1;
  std::size_t k = 0;
  for (; k < n; ++k) {
    if (a(k, k) == 0) break;
    row_scale *= scale[k];
    out.push_back(Rational(a(k, k)) / row_scale);
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  for (; k < n; ++k) {
    std::vector<std::size_t> idx(k + 1);
    for (std::size_t i = 0; i <= k; ++i) idx[i] = i;
    out.push_back(determinant(m.select(idx, idx)));
  }
  return out;
}

/// Every principal minor, keyed by the bitmask of the chosen indices.
/// Exponential; intended as a cross-check for small matrices.
inline std::vector<std::pair<std::uint32_t, Rational>> principal_minors(const RatMatrix& m) {
  if (!m.square()) throw InvalidArgument("principal_minors of a non-square matrix");
  if (m.rows() > 20) throw InvalidArgument("principal_minors: matrix too large for exhaustive enumeration");
  std::vector<std::pair<std::uint32_t, Rational>> out;
  const std::uint32_t n = static_cast<std::uint32_t>(m.rows());
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> idx;
    for (std::uint32_t i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    out.emplace_back(mask, determinant(m.select(idx, idx)));
  }
  return out;
}

/// Exact inverse by fraction-free Gauss-Jordan elimination, or nullopt when
/// the matrix is singular.
inline std::optional<RatMatrix> inverse(const RatMatrix& m) {
  if (!m.square()) throw InvalidArgument("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  auto [a, scale] = detail::clear_row_denominators(m);
  IntMatrix b(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) b(i, j) = a(i, j);
    b(i, n + i) = 1;
  }
  Int prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && b(p, k) == 0) ++p;
    if (p == n) return std::nullopt;
    if (p != k)
      for (std::size_t j = 0; j < 2 * n; ++j) std::swap(b(p, j), b(k, j));
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const Int factor = b(i, k);
      for (std::size_t j = 0; j < 2 * n; ++j) b(i, j) = (b(k, k) * b(i, j) - factor * b(k, j)) / prev;
    }
    prev = b(k, k);
  }
  // Now b = [d*I | d*A^-1] with d = det(A) up to sign; undo the row scaling
  // by scaling column j by scale[j].
  RatMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = make_rational(b(i, n + j) * scale[j], b(i, i));
  return inv;
}

/// Full-rank sublattice of Z^dim, stored as its Hermite normal form basis:
/// upper triangular rows, positive pivots, entries above each pivot reduced
/// into [0, pivot).
class IntLattice {
 public:
  IntLattice() = default;
  explicit IntLattice(IntMatrix hnf_basis) : basis_(std::move(hnf_basis)) {}

  const IntMatrix& basis() const { return basis_; }
  std::size_t dim() const { return basis_.rows(); }

  /// |Z^dim / L|.
  Int index() const {
    Int idx = 1;
    for (std::size_t i = 0; i < dim(); ++i) idx *= basis_(i, i);
    return idx;
  }

  bool contains(std::vector<Int> v) const {
    if (v.size() != dim()) throw InvalidArgument("lattice membership: dimension mismatch");
    for (std::size_t c = 0; c < dim(); ++c) {
      if (v[c] % basis_(c, c) != 0) return false;
      const Int q = v[c] / basis_(c, c);
      if (q != 0)
        for (std::size_t j = c; j < dim(); ++j) v[j] -= q * basis_(c, j);
    }
    return true;
  }

  friend bool operator==(const IntLattice&, const IntLattice&) = default;

 private:
  IntMatrix basis_;
};

/// Hermite normal form of the integer span of `relations` in Z^dim. Throws
/// InvalidArgument when the span has rank below dim.
inline IntLattice hnf(const std::vector<std::vector<Int>>& relations, std::size_t dim) {
  std::vector<std::vector<Int>> rows;
  for (const auto& r : relations) {
    if (r.size() != dim) throw InvalidArgument("hnf: relation has wrong dimension");
    if (std::any_of(r.begin(), r.end(), [](const Int& x) { return x != 0; })) rows.push_back(r);
  }
  auto axpy = [](std::vector<Int>& y, const Int& q, const std::vector<Int>& x) {
    for (std::size_t j = 0; j < y.size(); ++j) y[j] -= q * x[j];
  };
  for (std::size_t col = 0; col < dim; ++col) {
    // Euclid on the column entries of the rows from `col` down.
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t i = col; i < rows.size(); ++i)
        if (rows[i][col] != 0 && (best == rows.size() || abs(rows[i][col]) < abs(rows[best][col]))) best = i;
      if (best == rows.size()) throw InvalidArgument("hnf: relations are rank-deficient");
      std::swap(rows[col], rows[best]);
      bool done = true;
      for (std::size_t i = col + 1; i < rows.size(); ++i) {
        if (rows[i][col] == 0) continue;
        axpy(rows[i], rows[i][col] / rows[col][col], rows[col]);
        if (rows[i][col] != 0) done = false;
      }
      if (done) break;
    }
    if (rows[col][col] < 0)
      for (auto& x : rows[col]) x = -x;
    for (std::size_t i = 0; i < col; ++i) axpy(rows[i], floor_div(rows[i][col], rows[col][col]), rows[col]);
    for (std::size_t i = rows.size(); i-- > col + 1;)
      if (std::all_of(rows[i].begin(), rows[i].end(), [](const Int& x) { return x == 0; }))
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(i));
  }
  IntMatrix basis(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) basis(i, j) = rows[i][j];
  return IntLattice(std::move(basis));
}

/// L intersected with the coordinate subspace spanned by `coords` (which are
/// kept in the given order). The echelon rows whose pivots fall in the last
/// block, after moving the other coordinates first, span the intersection.
inline IntLattice intersect_coordinates(const IntLattice& lattice, const std::vector<std::size_t>& coords) {
  const std::size_t n = lattice.dim();
  std::vector<bool> keep(n, false);
  for (auto c : coords) keep[c] = true;
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < n; ++c)
    if (!keep[c]) order.push_back(c);
  order.insert(order.end(), coords.begin(), coords.end());
  std::vector<std::vector<Int>> permuted;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Int> r;
    for (auto c : order) r.push_back(lattice.basis()(i, c));
    permuted.push_back(std::move(r));
  }
  const auto h = hnf(permuted, n);
  const std::size_t skip = n - coords.size();
  std::vector<std::vector<Int>> sub;
  for (std::size_t i = skip; i < n; ++i) {
    std::vector<Int> r;
    for (std::size_t j = skip; j < n; ++j) r.push_back(h.basis()(i, j));
    sub.push_back(std::move(r));
  }
  return hnf(sub, coords.size());
}

/// Floating Perron-Frobenius report. Display only; never a decision input.
struct PfReport {
  double lambda = 0.0;
  double lower = 0.0;  // Collatz-Wielandt bracket at the final iterate
  double upper = 0.0;
  std::vector<double> vector;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Power iteration on (I + P)/2 from the all-ones vector. The shift keeps the
/// iterate strictly positive and removes the oscillation of imprimitive P, so
/// min_i (Pv)_i/v_i <= rho(P) <= max_i (Pv)_i/v_i holds at every step.
inline PfReport pf_estimate(const RatMatrix& p, double tolerance = 1e-9, std::size_t max_iterations = 100'000) {
  if (!p.square()) throw InvalidArgument("pf_estimate of a non-square matrix");
  const std::size_t n = p.rows();
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (p(i, j) < 0) throw InvalidArgument("pf_estimate: matrix has a negative entry");
      a[i * n + j] = p(i, j).convert_to<double>();
    }
  PfReport rep;
  rep.vector.assign(n, 1.0);
  if (n == 0) {
    rep.converged = true;
    return rep;
  }
  std::vector<double> w(n);
  double growth = 0.0;
  for (rep.iterations = 1; rep.iterations <= max_iterations; ++rep.iterations) {
    auto& v = rep.vector;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) w[i] += a[i * n + j] * v[j];
    }
    rep.lower = std::numeric_limits<double>::infinity();
    rep.upper = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = w[i] / v[i];
      rep.lower = std::min(rep.lower, r);
      rep.upper = std::max(rep.upper, r);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = 0.5 * (v[i] + w[i]);
      norm = std::max(norm, v[i]);
    }
    growth = 2.0 * norm - 1.0;  // v had max-norm 1 before the update
    for (auto& x : v) x /= norm;
    if (rep.upper - rep.lower < tolerance) {
      rep.converged = true;
      break;
    }
  }
  if (rep.iterations > max_iterations) rep.iterations = max_iterations;
  rep.lambda = rep.converged ? 0.5 * (rep.lower + rep.upper) : std::clamp(growth, rep.lower, rep.upper);
  return rep;
}

}  // namespace abnet
