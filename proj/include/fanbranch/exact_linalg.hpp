#pragma once

// Exact linear algebra over Q and Z: dense matrices, reduced row-echelon form,
// rational and integral kernels, primitive vectors and canonical subspaces.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fanbranch {

using Integer = mpz_class;
using Rational = mpq_class;
using IntegerVector = std::vector<Integer>;
using RationalVector = std::vector<Rational>;

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix. Rational entries are kept canonical (mpq_class
/// canonicalizes after every arithmetic operation; constructors call
/// canonicalize explicitly for entries built from raw numerator/denominator).
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<T>>& rows, std::size_t cols_if_empty = 0) {
    const std::size_t cols = rows.empty() ? cols_if_empty : rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw LinalgError("ragged rows in matrix construction");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<long>> rows) {
    std::vector<std::vector<T>> tmp;
    for (const auto& r : rows) {
      std::vector<T> row;
      for (long v : r) row.emplace_back(v);
      tmp.push_back(std::move(row));
    }
    return from_rows(tmp);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<T> row_vector(std::size_t i) const {
    auto r = row(i);
    return {r.begin(), r.end()};
  }

  void append_row(std::span<const T> r) {
    if (rows_ == 0 && cols_ == 0) cols_ = r.size();
    if (r.size() != cols_) throw LinalgError("row length mismatch");
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  std::vector<T> operator*(std::span<const T> x) const {
    if (x.size() != cols_) throw LinalgError("dimension mismatch in matrix-vector product");
    std::vector<T> y(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      T acc = 0;
      for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
      y[i] = acc;
    }
    return y;
  }

  Matrix operator*(const Matrix& b) const {
    if (cols_ != b.rows_) throw LinalgError("dimension mismatch in matrix product");
    Matrix c(rows_, b.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        if ((*this)(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += (*this)(i, k) * b(k, j);
      }
    return c;
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;
using IntegerMatrix = Matrix<Integer>;

inline RationalMatrix to_rational(const IntegerMatrix& m) {
  RationalMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
  return r;
}

inline RationalVector to_rational(std::span<const Integer> v) {
  return RationalVector(v.begin(), v.end());
}

template <class T>
T dot(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw LinalgError("dimension mismatch in dot product");
  T acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <class T>
bool is_zero(std::span<const T> v) {
  return std::all_of(v.begin(), v.end(), [](const T& x) { return x == 0; });
}

inline std::string to_string(const Rational& q) { return q.get_str(); }
inline std::string to_string(const Integer& z) { return z.get_str(); }

template <class T>
std::string to_string(std::span<const T> v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i].get_str();
  os << ')';
  return os.str();
}

template <class T>
std::string to_string(const std::vector<T>& v) {
  return to_string(std::span<const T>(v));
}

struct RrefResult {
  RationalMatrix reduced;
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_cols;
};

/// Gauss-Jordan elimination. Pivot choice is positional only: the leftmost
/// column with a nonzero entry at or below the current row, topmost such row.
inline RrefResult rref_with_pivots(RationalMatrix m) {
  RrefResult out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(r, p);
    const Rational inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      const Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    out.pivot_cols.push_back(c);
    ++r;
  }
  out.rank = r;
  out.reduced = std::move(m);
  return out;
}

inline std::pair<RationalMatrix, std::size_t> rref(const RationalMatrix& m) {
  auto res = rref_with_pivots(m);
  return {std::move(res.reduced), res.rank};
}

inline std::size_t rank(const RationalMatrix& m) { return rref_with_pivots(m).rank; }
inline std::size_t rank(const IntegerMatrix& m) { return rank(to_rational(m)); }

/// Scales a nonzero rational vector to the primitive integer vector with the
/// same direction and first nonzero entry positive.
inline IntegerVector normalize_direction(std::span<const Rational> v) {
  Integer den_lcm = 1;
  for (const auto& q : v) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), q.get_den_mpz_t());
  IntegerVector out(v.size());
  Integer g = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = v[i].get_num() * (den_lcm / v[i].get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out[i].get_mpz_t());
  }
  if (g == 0) throw LinalgError("zero vector has no primitive form");
  auto first = std::find_if(out.begin(), out.end(), [](const Integer& x) { return x != 0; });
  if (*first < 0) g = -g;
  for (auto& x : out) x /= g;
  return out;
}

/// Primitive integer vector on the same ray as a nonzero rational vector.
inline IntegerVector primitive_multiple(std::span<const Rational> v) {
  auto out = normalize_direction(v);
  auto first = std::find_if(v.begin(), v.end(), [](const Rational& x) { return x != 0; });
  if (*first < 0)
    for (auto& x : out) x = -x;
  return out;
}

/// Basis of {x : m x = 0}, one primitive integer vector per free column.
inline std::vector<IntegerVector> right_nullspace(const RationalMatrix& m) {
  const auto res = rref_with_pivots(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : res.pivot_cols) is_pivot[c] = true;
  std::vector<IntegerVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    RationalVector x(m.cols());
    x[free] = 1;
    for (std::size_t i = 0; i < res.rank; ++i) x[res.pivot_cols[i]] = -res.reduced(i, free);
    basis.push_back(normalize_direction(x));
  }
  return basis;
}

inline std::vector<IntegerVector> right_nullspace(const IntegerMatrix& m) {
  return right_nullspace(to_rational(m));
}

/// Basis of {c : c m = 0}.
inline std::vector<IntegerVector> left_nullspace(const RationalMatrix& m) {
  return right_nullspace(m.transpose());
}

inline std::vector<IntegerVector> left_nullspace(const IntegerMatrix& m) {
  return left_nullspace(to_rational(m));
}

inline IntegerVector primitive(std::span<const Integer> v) {
  Integer g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g == 0) throw LinalgError("zero vector has no primitive form");
  IntegerVector out(v.begin(), v.end());
  for (auto& x : out) x /= g;
  return out;
}

inline IntegerVector primitive(const IntegerVector& v) { return primitive(std::span<const Integer>(v)); }

namespace detail {

// Row-style Hermite normal form of the rows of b (in place, zero rows dropped).
inline void hermite_rows(std::vector<IntegerVector>& b) {
  if (b.empty()) return;
  const std::size_t n = b.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < b.size(); ++c) {
    // Euclid on column c among rows r..end.
    for (;;) {
      std::size_t best = b.size();
      for (std::size_t i = r; i < b.size(); ++i)
        if (b[i][c] != 0 && (best == b.size() || abs(b[i][c]) < abs(b[best][c]))) best = i;
      if (best == b.size()) break;
      std::swap(b[r], b[best]);
      bool done = true;
      for (std::size_t i = r + 1; i < b.size(); ++i) {
        if (b[i][c] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), b[i][c].get_mpz_t(), b[r][c].get_mpz_t());
        for (std::size_t j = c; j < n; ++j) b[i][j] -= q * b[r][j];
        if (b[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (b[r][c] == 0) continue;
    if (b[r][c] < 0)
      for (auto& x : b[r]) x = -x;
    for (std::size_t i = 0; i < r; ++i) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), b[i][c].get_mpz_t(), b[r][c].get_mpz_t());
      if (q != 0)
        for (std::size_t j = c; j < n; ++j) b[i][j] -= q * b[r][j];
    }
    ++r;
  }
  b.resize(r);
}

}  // namespace detail

/// Basis of the lattice {x in Z^cols : m x = 0}. Unimodular column operations
/// bring m to column echelon form while tracking the transform U; columns of
/// U that end up over zero columns span the kernel lattice. The result is
/// returned in row Hermite normal form.
inline std::vector<IntegerVector> integer_kernel(const IntegerMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  // Work on columns: a[j] is column j of m, u[j] is column j of U.
  std::vector<IntegerVector> a(cols, IntegerVector(rows)), u(cols, IntegerVector(cols));
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < rows; ++i) a[j][i] = m(i, j);
    u[j][j] = 1;
  }
  auto axpy = [](IntegerVector& y, const Integer& q, const IntegerVector& x) {
    for (std::size_t k = 0; k < y.size(); ++k) y[k] -= q * x[k];
  };
  std::size_t c = 0;
  for (std::size_t i = 0; i < rows && c < cols; ++i) {
    for (;;) {
      std::size_t best = cols;
      for (std::size_t j = c; j < cols; ++j)
        if (a[j][i] != 0 && (best == cols || abs(a[j][i]) < abs(a[best][i]))) best = j;
      if (best == cols) break;
      std::swap(a[c], a[best]);
      std::swap(u[c], u[best]);
      bool done = true;
      for (std::size_t j = c + 1; j < cols; ++j) {
        if (a[j][i] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), a[j][i].get_mpz_t(), a[c][i].get_mpz_t());
        axpy(a[j], q, a[c]);
        axpy(u[j], q, u[c]);
        if (a[j][i] != 0) done = false;
      }
      if (done) break;
    }
    if (a[c][i] != 0) ++c;
  }
  std::vector<IntegerVector> kernel(u.begin() + static_cast<std::ptrdiff_t>(c), u.end());
  detail::hermite_rows(kernel);
  return kernel;
}

/// A linear subspace of Q^n stored by its reduced row-echelon basis, so that
/// equal subspaces have identical representations.
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(std::size_t ambient_dim) : ambient_(ambient_dim), basis_(0, ambient_dim) {}

  static Subspace zero(std::size_t n) { return Subspace(n); }
  static Subspace full(std::size_t n) { return from_reduced(RationalMatrix::identity(n), n); }

  static Subspace span(std::size_t ambient_dim, const std::vector<RationalVector>& vectors) {
    RationalMatrix m(0, ambient_dim);
    for (const auto& v : vectors) {
      if (v.size() != ambient_dim) throw LinalgError("dimension mismatch in span");
      m.append_row(v);
    }
    return from_matrix(m, ambient_dim);
  }

  static Subspace span(std::size_t ambient_dim, const std::vector<IntegerVector>& vectors) {
    std::vector<RationalVector> q;
    for (const auto& v : vectors) q.push_back(to_rational(v));
    return span(ambient_dim, q);
  }

  static Subspace from_matrix(const RationalMatrix& m, std::size_t ambient_dim) {
    if (m.rows() > 0 && m.cols() != ambient_dim) throw LinalgError("dimension mismatch in span");
    auto res = rref_with_pivots(m);
    return from_reduced(res.reduced, ambient_dim, res.rank);
  }

  std::size_t ambient_dim() const { return ambient_; }
  std::size_t dim() const { return basis_.rows(); }
  const RationalMatrix& basis() const { return basis_; }
  std::vector<RationalVector> vectors() const {
    std::vector<RationalVector> out;
    for (std::size_t i = 0; i < basis_.rows(); ++i) out.push_back(basis_.row_vector(i));
    return out;
  }

  bool is_zero() const { return dim() == 0; }
  bool is_full() const { return dim() == ambient_; }

  bool contains(std::span<const Rational> v) const {
    check_len(v.size());
    RationalMatrix m = basis_;
    m.append_row(v);
    return rank(m) == dim();
  }

  bool contains(const Subspace& other) const {
    check_same(other);
    return sum(*this, other).dim() == dim();
  }

  friend Subspace sum(const Subspace& a, const Subspace& b) {
    a.check_same(b);
    RationalMatrix m = a.basis_;
    for (std::size_t i = 0; i < b.basis_.rows(); ++i) m.append_row(b.basis_.row(i));
    return from_matrix(m, a.ambient_);
  }

  /// The orthogonal complement under the standard pairing Q^n x Q^n -> Q.
  Subspace annihilator() const {
    if (dim() == 0) return full(ambient_);
    auto ker = right_nullspace(basis_);
    return span(ambient_, ker);
  }

  friend Subspace intersect(const Subspace& a, const Subspace& b) {
    a.check_same(b);
    return sum(a.annihilator(), b.annihilator()).annihilator();
  }

  bool operator==(const Subspace& o) const { return ambient_ == o.ambient_ && basis_ == o.basis_; }

  std::string str() const {
    std::ostringstream os;
    os << "span{";
    for (std::size_t i = 0; i < dim(); ++i) os << (i ? "," : "") << to_string(basis_.row_vector(i));
    os << "}";
    return os.str();
  }

 private:
  static Subspace from_reduced(const RationalMatrix& reduced, std::size_t ambient_dim,
                               std::size_t rank_hint = static_cast<std::size_t>(-1)) {
    Subspace s(ambient_dim);
    const std::size_t r = rank_hint == static_cast<std::size_t>(-1) ? reduced.rows() : rank_hint;
    for (std::size_t i = 0; i < r; ++i) s.basis_.append_row(reduced.row(i));
    return s;
  }
  void check_len(std::size_t n) const {
    if (n != ambient_) throw LinalgError("dimension mismatch: vector of length " + std::to_string(n) +
                                         " in ambient dimension " + std::to_string(ambient_));
  }
  void check_same(const Subspace& o) const {
    if (o.ambient_ != ambient_)
      throw LinalgError("dimension mismatch: subspaces of Q^" + std::to_string(ambient_) + " and Q^" +
                        std::to_string(o.ambient_));
  }

  std::size_t ambient_ = 0;
  RationalMatrix basis_;
};

inline Subspace sum_all(std::size_t ambient_dim, const std::vector<Subspace>& parts) {
  Subspace acc = Subspace::zero(ambient_dim);
  for (const auto& p : parts) acc = sum(acc, p);
  return acc;
}

/// Rank of a small integer matrix with 64-bit fraction-free elimination.
/// Rows are divided by their content after every step; returns nullopt when
/// an intermediate value would overflow so the caller can fall back to GMP.
inline std::optional<std::size_t> small_rank(std::vector<std::vector<std::int64_t>> rows) {
  auto gcd64 = [](std::int64_t x, std::int64_t y) {
    x = x < 0 ? -x : x;
    y = y < 0 ? -y : y;
    while (y) {
      auto t = x % y;
      x = y;
      y = t;
    }
    return x;
  };
  if (rows.empty()) return 0;
  const std::size_t n = rows.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[r], rows[p]);
    const std::int64_t a = rows[r][c];
    for (std::size_t i = r + 1; i < rows.size(); ++i) {
      const std::int64_t b = rows[i][c];
      if (b == 0) continue;
      const std::int64_t g = gcd64(a, b);
      const std::int64_t fa = a / g, fb = b / g;
      std::int64_t content = 0;
      for (std::size_t j = c; j < n; ++j) {
        std::int64_t x, y, z;
        if (__builtin_mul_overflow(rows[i][j], fa, &x) || __builtin_mul_overflow(rows[r][j], fb, &y) ||
            __builtin_sub_overflow(x, y, &z))
          return std::nullopt;
        rows[i][j] = z;
        content = gcd64(content, z);
      }
      if (content > 1)
        for (std::size_t j = c; j < n; ++j) rows[i][j] /= content;
    }
    ++r;
  }
  return r;
}

}  // namespace fanbranch
