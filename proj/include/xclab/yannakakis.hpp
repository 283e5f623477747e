#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lp.hpp"
#include "matrix.hpp"
#include "polytope.hpp"

namespace xclab {

/// Claimed nonnegative factorization S = U V with inner dimension r.
struct Factorization {
  Matrix U;  // f x r
  Matrix V;  // r x v

  std::size_t inner_dim() const { return U.cols(); }
};

/// True iff U >= 0, V >= 0 and U V = S exactly.
inline bool verify_factorization(const Matrix& S, const Factorization& fac) {
  if (fac.U.cols() != fac.V.rows() || fac.U.rows() != S.rows() || fac.V.cols() != S.cols()) return false;
  if (!fac.U.is_nonnegative() || !fac.V.is_nonnegative()) return false;
  return fac.U * fac.V == S;
}

inline bool verify_factorization(const SlackMatrix& S, const Factorization& fac) {
  return verify_factorization(S.S, fac);
}

/// Q = { (x, y) : A x + U y = b, E x = f, y >= 0 }.
struct ExtendedFormulation {
  std::size_t x_dim = 0;
  std::size_t y_dim = 0;
  Matrix A, U;
  Vector b;
  Matrix E;
  Vector f;
  std::vector<std::string> row_labels;  // one per A row
  std::vector<std::string> eq_labels;   // one per E row
  std::vector<Vector> lifts;            // witness y = V^j for each vertex

  /// Facets counted as the y >= 0 rows only; equalities carry none.
  std::size_t num_ineqs() const { return y_dim; }

  LiftedSystem to_lifted_system() const {
    LiftedSystem q;
    q.x_dim = x_dim;
    q.y_dim = y_dim;
    q.B = Matrix(y_dim, x_dim);
    q.C = Matrix(y_dim, y_dim);
    q.d = Vector(y_dim);
    for (std::size_t k = 0; k < y_dim; ++k) {
      q.C(k, k) = -1;
      q.row_labels.push_back("y:" + std::to_string(k) + ">=0");
    }
    q.Be = Matrix(0, x_dim);
    q.Ce = Matrix(0, y_dim);
    for (std::size_t i = 0; i < A.rows(); ++i) {
      q.Be.append_row(A.row(i));
      q.Ce.append_row(U.row(i));
      q.de.push_back(b[i]);
      q.eq_labels.push_back(row_labels[i]);
    }
    for (std::size_t i = 0; i < E.rows(); ++i) {
      q.Be.append_row(E.row(i));
      q.Ce.append_row(Vector(y_dim));
      q.de.push_back(f[i]);
      q.eq_labels.push_back(eq_labels[i]);
    }
    return q;
  }
};

/// Builds Q from a factorization of the full slack matrix of P. P's own
/// equalities are carried over unchanged.
inline ExtendedFormulation extension_from_factorization(const Polytope& p, const Factorization& fac) {
  if (fac.U.rows() != p.num_ineqs())
    throw InputError("extension: factorization has " + std::to_string(fac.U.rows()) + " rows, polytope has " +
                     std::to_string(p.num_ineqs()) + " inequalities");
  if (fac.inner_dim() < 1) throw InputError("extension: inner dimension must be >= 1");
  if (!fac.U.is_nonnegative() || !fac.V.is_nonnegative())
    throw InputError("extension: factorization has a negative entry");
  const SlackMatrix s = slack_matrix(p);
  if (!verify_factorization(s, fac)) throw InputError("extension: U V does not reproduce the slack matrix");

  ExtendedFormulation q;
  q.x_dim = p.dim();
  q.y_dim = fac.inner_dim();
  q.A = p.A();
  q.U = fac.U;
  q.b = p.b();
  q.E = p.E();
  q.f = p.f();
  q.row_labels = p.row_labels();
  q.eq_labels = p.eq_labels();
  for (std::size_t j = 0; j < p.num_vertices(); ++j) q.lifts.push_back(fac.V.col_vector(j));
  return q;
}

struct ContractionResult {
  Factorization factorization;
  std::vector<Vector> lifts;        // y_j per vertex
  std::vector<Vector> eq_weights;   // free multipliers on Q's equalities, per P row
};

/// Recovers a factorization of P's slack matrix from an extension Q.
/// Column j is the slack d - B x_j - C y_j of a lexicographically minimal
/// lift; row i holds multipliers u_i >= 0 deriving a_i x <= b_i from Q
/// (Q's equalities take free multipliers and do not enter the product).
inline ContractionResult factorization_from_extension(const Polytope& p, const LiftedSystem& q) {
  q.validate();
  if (q.x_dim != p.dim()) throw InputError("contraction: x dimension differs from polytope dimension");
  const std::size_t r = q.num_ineqs();
  if (r < 1) throw InputError("contraction: extension has no inequalities");

  ContractionResult out;
  out.factorization.V = Matrix(r, p.num_vertices());
  for (std::size_t j = 0; j < p.num_vertices(); ++j) {
    const Vector& x = p.vertices()[j];
    auto y = lexmin_lift(q, x);
    if (!y) throw InputError("not an extension: vertex " + p.vertex_labels()[j] + " has no lift");
    for (std::size_t k = 0; k < r; ++k)
      out.factorization.V(k, j) = q.d[k] - dot(q.B.row(k), x) - dot(q.C.row(k), *y);
    out.lifts.push_back(std::move(*y));
  }

  // Row layout of the derivation system: (B | C | d) per Q row.
  const std::size_t width = q.x_dim + q.y_dim + 1;
  auto augmented = [&](const Matrix& bx, const Matrix& cy, const Vector& rhs) {
    Matrix m(bx.rows(), width);
    for (std::size_t i = 0; i < bx.rows(); ++i) {
      for (std::size_t k = 0; k < q.x_dim; ++k) m(i, k) = bx(i, k);
      for (std::size_t k = 0; k < q.y_dim; ++k) m(i, q.x_dim + k) = cy(i, k);
      m(i, width - 1) = rhs[i];
    }
    return m;
  };
  const Matrix ineq_rows = augmented(q.B, q.C, q.d);
  const Matrix eq_rows = augmented(q.Be, q.Ce, q.de);

  out.factorization.U = Matrix(p.num_ineqs(), r);
  for (std::size_t i = 0; i < p.num_ineqs(); ++i) {
    Vector target(width);
    for (std::size_t k = 0; k < q.x_dim; ++k) target[k] = p.A()(i, k);
    target[width - 1] = p.b()[i];
    auto mult = conic_combination(ineq_rows, target, eq_rows);
    if (!mult) throw InputError("inequality not derivable from extension: " + p.row_labels()[i]);
    for (std::size_t k = 0; k < r; ++k) out.factorization.U(i, k) = (*mult)[k];
    out.eq_weights.emplace_back(mult->begin() + static_cast<std::ptrdiff_t>(r), mult->end());
  }
  return out;
}

/// Slack-variable factorization S = I S.
inline Factorization slack_variable_factorization(const SlackMatrix& s) {
  return {Matrix::identity(s.rows()), s.S};
}

}  // namespace xclab
