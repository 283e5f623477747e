#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace xclab {

using Vector = std::vector<Rational>;

/// Dense row-major matrix of exact rationals. Zero-row and zero-column shapes
/// are legal and keep their other dimension.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  Matrix(std::initializer_list<std::initializer_list<Rational>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw InputError("ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix from_rows(const std::vector<Vector>& rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw InputError("ragged matrix rows");
      std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Rational> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const Rational> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  Vector row_vector(std::size_t i) const { return {row(i).begin(), row(i).end()}; }
  Vector col_vector(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  const std::vector<Rational>& entries() const { return data_; }
  std::vector<Rational>& entries() { return data_; }

  void append_row(std::span<const Rational> r) {
    if (r.size() != cols_) throw InputError("append_row: width mismatch");
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Rows selected by index, in the given order.
  Matrix select_rows(std::span<const std::size_t> idx) const {
    Matrix m(idx.size(), cols_);
    for (std::size_t k = 0; k < idx.size(); ++k)
      std::copy(row(idx[k]).begin(), row(idx[k]).end(), m.row(k).begin());
    return m;
  }

  Matrix select_cols(std::span<const std::size_t> idx) const {
    Matrix m(rows_, idx.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < idx.size(); ++k) m(i, k) = (*this)(i, idx[k]);
    return m;
  }

  /// Largest absolute entry; zero for an empty matrix.
  Rational max_abs() const {
    Rational best = 0;
    for (const auto& x : data_)
      if (abs(x) > best) best = abs(x);
    return best;
  }

  bool is_nonnegative() const {
    return std::all_of(data_.begin(), data_.end(), [](const Rational& x) { return x >= 0; });
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw InputError("matrix product: inner dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Rational& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Matrix operator*(const Rational& s, Matrix m) {
    for (auto& x : m.data_) x *= s;
    return m;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

inline Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) throw InputError("dot: length mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Frobenius inner product sum_ij A_ij * B_ij.
inline Rational frobenius(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("frobenius: shape mismatch");
  return dot(a.entries(), b.entries());
}

/// Linear-algebraic rank by fraction-free (Bareiss) elimination on the
/// integer matrix obtained by clearing each row's denominators.
inline std::size_t rank(const Matrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<Integer> a(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    Integer l = 1;
    for (const auto& x : m.row(i)) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    for (std::size_t j = 0; j < cols; ++j) {
      const Rational& x = m(i, j);
      a[i * cols + j] = x.get_num() * (l / x.get_den());
    }
  }
  auto at = [&](std::size_t i, std::size_t j) -> Integer& { return a[i * cols + j]; };

  std::size_t r = 0;
  Integer prev = 1;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && at(p, c) == 0) ++p;
    if (p == rows) continue;
    if (p != r)
      for (std::size_t j = 0; j < cols; ++j) std::swap(at(p, j), at(r, j));
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        at(i, j) = at(r, c) * at(i, j) - at(i, c) * at(r, j);
        mpz_divexact(at(i, j).get_mpz_t(), at(i, j).get_mpz_t(), prev.get_mpz_t());
      }
      at(i, c) = 0;
    }
    prev = at(r, c);
    ++r;
  }
  return r;
}

// Rational matrix text format: "rows cols" then one line per row of
// whitespace-separated "p/q" or "p" tokens.

inline void write_matrix_text(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? " " : "") << to_string(m(i, j));
    out << '\n';
  }
}

inline Matrix read_matrix_text(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw InputError("matrix text: missing header");
  std::istringstream header(line);
  long long rows = -1, cols = -1;
  std::string extra;
  if (!(header >> rows >> cols) || rows < 0 || cols < 0 || (header >> extra))
    throw InputError("matrix text: malformed header '" + line + "'");
  Matrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (cols == 0) continue;
    if (!next_line()) throw InputError("matrix text: missing row " + std::to_string(i));
    std::istringstream ls(line);
    std::string tok;
    std::size_t j = 0;
    while (ls >> tok) {
      if (j == m.cols()) throw InputError("matrix text: too many entries in row " + std::to_string(i));
      m(i, j++) = parse_rational(tok);
    }
    if (j != m.cols()) throw InputError("matrix text: too few entries in row " + std::to_string(i));
  }
  return m;
}

inline std::string matrix_to_text(const Matrix& m) {
  std::ostringstream os;
  write_matrix_text(os, m);
  return os.str();
}

inline Matrix matrix_from_text(const std::string& text) {
  std::istringstream is(text);
  return read_matrix_text(is);
}

}  // namespace xclab
