#pragma once

// Exact linear algebra over Q (GMP rationals) and a Smith normal form over Z.
// No floating point is used anywhere.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "patchwork/error.hpp"

namespace patchwork {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational parse_rational(const std::string& s) {
  Rational q;
  if (s.empty() || q.set_str(s, 10) != 0) throw InputError("malformed rational '" + s + "'");
  if (q.get_den() == 0) throw InputError("zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

inline std::string format_rational(Rational q) {
  q.canonicalize();
  return q.get_str();
}

class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static QMatrix identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static QMatrix from_rows(const std::vector<std::vector<Rational>>& rows, std::size_t cols) {
    QMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw InputError("ragged matrix rows");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }
  static QMatrix from_ints(std::size_t rows, std::size_t cols, const std::vector<long>& entries) {
    if (entries.size() != rows * cols) throw InputError("entry count does not match shape");
    QMatrix m(rows, cols);
    for (std::size_t k = 0; k < entries.size(); ++k) m.data_[k] = entries[k];
    return m;
  }
  /// Uniform integer entries in [lo, hi].
  template <class Rng>
  static QMatrix random(std::size_t rows, std::size_t cols, Rng& rng, long lo = -3, long hi = 3) {
    std::uniform_int_distribution<long> dist(lo, hi);
    QMatrix m(rows, cols);
    for (auto& x : m.data_) x = dist(rng);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Rational& x) { return x == 0; });
  }

  friend bool operator==(const QMatrix& a, const QMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend QMatrix operator*(const QMatrix& a, const QMatrix& b) {
    if (a.cols_ != b.rows_)
      throw InputError("matrix product shape mismatch: " + a.shape() + " * " + b.shape());
    QMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Rational& x = a(i, k);
        if (x == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += x * b(k, j);
      }
    return c;
  }
  friend QMatrix operator+(QMatrix a, const QMatrix& b) {
    a.require_same_shape(b);
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] += b.data_[k];
    return a;
  }
  friend QMatrix operator-(QMatrix a, const QMatrix& b) {
    a.require_same_shape(b);
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
    return a;
  }
  QMatrix operator-() const {
    QMatrix m = *this;
    for (auto& x : m.data_) x = -x;
    return m;
  }

  QMatrix transpose() const {
    QMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Rows [r0, r0 + nr) and columns [c0, c0 + nc).
  QMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    QMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }
  void set_block(std::size_t r0, std::size_t c0, const QMatrix& b) {
    for (std::size_t i = 0; i < b.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  static QMatrix hstack(const QMatrix& a, const QMatrix& b) {
    if (a.rows_ != b.rows_) throw InputError("hstack row mismatch");
    QMatrix m(a.rows_, a.cols_ + b.cols_);
    m.set_block(0, 0, a);
    m.set_block(0, a.cols_, b);
    return m;
  }
  static QMatrix vstack(const QMatrix& a, const QMatrix& b) {
    if (a.cols_ != b.cols_) throw InputError("vstack column mismatch");
    QMatrix m(a.rows_ + b.rows_, a.cols_);
    m.set_block(0, 0, a);
    m.set_block(a.rows_, 0, b);
    return m;
  }

  /// Rank by fraction-free (Bareiss) elimination on the row-scaled integer matrix.
  std::size_t rank() const {
    std::vector<std::vector<Integer>> a(rows_, std::vector<Integer>(cols_));
    for (std::size_t i = 0; i < rows_; ++i) {
      Integer l = 1;
      for (std::size_t j = 0; j < cols_; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), (*this)(i, j).get_den_mpz_t());
      for (std::size_t j = 0; j < cols_; ++j) {
        const Rational& x = (*this)(i, j);
        a[i][j] = x.get_num() * (l / x.get_den());
      }
    }
    std::size_t r = 0;
    Integer prev = 1;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
      std::size_t p = r;
      while (p < rows_ && a[p][c] == 0) ++p;
      if (p == rows_) continue;
      std::swap(a[p], a[r]);
      for (std::size_t i = r + 1; i < rows_; ++i) {
        for (std::size_t j = c + 1; j < cols_; ++j) {
          a[i][j] = a[r][c] * a[i][j] - a[i][c] * a[r][j];
          mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
        }
        a[i][c] = 0;
      }
      prev = a[r][c];
      ++r;
    }
    return r;
  }

  /// Reduced row echelon form; `pivots` receives the pivot columns.
  QMatrix rref(std::vector<std::size_t>* pivots = nullptr) const {
    QMatrix m = *this;
    std::vector<std::size_t> piv;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
      std::size_t p = r;
      while (p < rows_ && m(p, c) == 0) ++p;
      if (p == rows_) continue;
      if (p != r)
        for (std::size_t j = 0; j < cols_; ++j) std::swap(m(p, j), m(r, j));
      const Rational inv = 1 / m(r, c);
      for (std::size_t j = c; j < cols_; ++j) m(r, j) *= inv;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == r || m(i, c) == 0) continue;
        const Rational f = m(i, c);
        for (std::size_t j = c; j < cols_; ++j) m(i, j) -= f * m(r, j);
      }
      piv.push_back(c);
      ++r;
    }
    if (pivots) *pivots = std::move(piv);
    return m;
  }

  /// Basis of the null space, as the columns of a cols() x k matrix.
  QMatrix kernel() const {
    std::vector<std::size_t> piv;
    QMatrix r = rref(&piv);
    std::vector<char> is_pivot(cols_, 0);
    for (auto c : piv) is_pivot[c] = 1;
    std::vector<std::size_t> free;
    for (std::size_t c = 0; c < cols_; ++c)
      if (!is_pivot[c]) free.push_back(c);
    QMatrix k(cols_, free.size());
    for (std::size_t f = 0; f < free.size(); ++f) {
      k(free[f], f) = 1;
      for (std::size_t i = 0; i < piv.size(); ++i) k(piv[i], f) = -r(i, free[f]);
    }
    return k;
  }

  /// Basis of the column space (a subset of the original columns).
  QMatrix image_basis() const {
    std::vector<std::size_t> piv;
    rref(&piv);
    QMatrix b(rows_, piv.size());
    for (std::size_t k = 0; k < piv.size(); ++k)
      for (std::size_t i = 0; i < rows_; ++i) b(i, k) = (*this)(i, piv[k]);
    return b;
  }

  /// Some X with A X = B, if one exists. Unique when A has full column rank.
  std::optional<QMatrix> solve(const QMatrix& b) const {
    if (b.rows_ != rows_) throw InputError("solve: right-hand side row mismatch");
    std::vector<std::size_t> piv;
    QMatrix aug = hstack(*this, b).rref(&piv);
    QMatrix x(cols_, b.cols_);
    for (std::size_t i = 0; i < piv.size(); ++i) {
      if (piv[i] >= cols_) return std::nullopt;
      for (std::size_t j = 0; j < b.cols_; ++j) x(piv[i], j) = aug(i, cols_ + j);
    }
    return x;
  }

  bool is_integral() const {
    return std::all_of(data_.begin(), data_.end(), [](const Rational& x) { return x.get_den() == 1; });
  }

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void require_same_shape(const QMatrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_)
      throw InputError("matrix shape mismatch: " + shape() + " vs " + b.shape());
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

inline QMatrix block_diagonal(const QMatrix& a, const QMatrix& b) {
  QMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), a.cols(), b);
  return m;
}

/// Nonzero invariant factors (d_1 | d_2 | ...) of an integer matrix, positive.
inline std::vector<Integer> smith_invariants(const QMatrix& m) {
  if (!m.is_integral()) throw InputError("Smith normal form needs an integer matrix");
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::vector<Integer>> a(rows, std::vector<Integer>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = m(i, j).get_num();

  std::vector<Integer> diag;
  std::size_t t = 0;
  while (t < rows && t < cols) {
    // Pivot: smallest nonzero absolute value in the trailing block.
    std::size_t pr = rows, pc = cols;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j)
        if (a[i][j] != 0 && (pr == rows || abs(a[i][j]) < abs(a[pr][pc]))) {
          pr = i;
          pc = j;
        }
    if (pr == rows) break;
    std::swap(a[t], a[pr]);
    for (std::size_t i = 0; i < rows; ++i) std::swap(a[i][t], a[i][pc]);
    bool clean = false;
    while (!clean) {
      clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (a[i][t] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), a[i][t].get_mpz_t(), a[t][t].get_mpz_t());
        for (std::size_t j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
        if (a[i][t] != 0) {
          std::swap(a[i], a[t]);
          clean = false;
        }
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (a[t][j] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), a[t][j].get_mpz_t(), a[t][t].get_mpz_t());
        for (std::size_t i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
        if (a[t][j] != 0) {
          for (std::size_t i = 0; i < rows; ++i) std::swap(a[i][j], a[i][t]);
          clean = false;
        }
      }
      if (clean) {
        // Enforce divisibility of the rest of the block by the pivot.
        for (std::size_t i = t + 1; i < rows && clean; ++i)
          for (std::size_t j = t + 1; j < cols && clean; ++j)
            if (a[i][j] % a[t][t] != 0) {
              for (std::size_t k = t; k < cols; ++k) a[t][k] += a[i][k];
              clean = false;
            }
      }
    }
    diag.push_back(abs(a[t][t]));
    ++t;
  }
  return diag;
}

/// Number of generators of the cokernel of an integer matrix Z^cols -> Z^rows:
/// free rank plus the count of invariant factors different from 1.
inline std::size_t cokernel_generators(const QMatrix& m) {
  auto d = smith_invariants(m);
  std::size_t torsion = 0;
  for (const auto& x : d)
    if (x != 1) ++torsion;
  return (m.rows() - d.size()) + torsion;
}

}  // namespace patchwork
