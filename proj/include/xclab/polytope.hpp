#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "lp.hpp"
#include "matrix.hpp"
#include "rational.hpp"

namespace xclab {

/// Inequality system A x <= b together with equalities E x = f.
struct HRep {
  Matrix A;
  Vector b;
  Matrix E;
  Vector f;
  std::vector<std::string> row_labels;
  std::vector<std::string> eq_labels;

  std::size_t ambient_dim() const { return A.rows() ? A.cols() : E.cols(); }

  void validate(std::size_t dim) const {
    if (A.cols() != dim || E.cols() != dim) throw InputError("H-representation: column count differs from dimension");
    if (A.rows() != b.size() || E.rows() != f.size()) throw InputError("H-representation: right-hand side length mismatch");
    if (row_labels.size() != A.rows()) throw InputError("H-representation: row label count mismatch");
    if (eq_labels.size() != E.rows()) throw InputError("H-representation: equality label count mismatch");
  }

  bool contains(std::span<const Rational> x) const {
    for (std::size_t i = 0; i < A.rows(); ++i)
      if (dot(A.row(i), x) > b[i]) return false;
    for (std::size_t i = 0; i < E.rows(); ++i)
      if (dot(E.row(i), x) != f[i]) return false;
    return true;
  }

  LpResult maximize(std::span<const Rational> c) const { return lp_solve(A, b, E, f, c, Sense::maximize); }
};

/// Affine dimension of a finite point set (-1 for the empty set).
inline long affine_dimension(const std::vector<Vector>& points) {
  if (points.empty()) return -1;
  const std::size_t n = points.front().size();
  Matrix diffs(points.size() - 1, n);
  for (std::size_t k = 1; k < points.size(); ++k)
    for (std::size_t j = 0; j < n; ++j) diffs(k - 1, j) = points[k][j] - points[0][j];
  return static_cast<long>(rank(diffs));
}

/// A polytope carried in both descriptions. Construction checks that every
/// vertex satisfies the H-representation and that the dimension is >= 1.
class Polytope {
 public:
  Polytope(std::size_t dim, HRep h, std::vector<Vector> vertices, std::vector<std::string> vertex_labels = {})
      : dim_(dim), h_(std::move(h)), vertices_(std::move(vertices)), vertex_labels_(std::move(vertex_labels)) {
    h_.validate(dim_);
    if (vertex_labels_.empty())
      for (std::size_t j = 0; j < vertices_.size(); ++j) vertex_labels_.push_back("v" + std::to_string(j));
    if (vertex_labels_.size() != vertices_.size()) throw InputError("polytope: vertex label count mismatch");
    for (std::size_t j = 0; j < vertices_.size(); ++j) {
      if (vertices_[j].size() != dim_) throw InputError("polytope: vertex " + std::to_string(j) + " has wrong length");
      if (!h_.contains(vertices_[j]))
        throw InputError("polytope: vertex " + vertex_labels_[j] + " violates the inequality description");
    }
    if (affine_dimension(vertices_) < 1) throw InputError("polytope: dimension must be at least 1");
  }

  std::size_t dim() const { return dim_; }
  const HRep& hrep() const { return h_; }
  const Matrix& A() const { return h_.A; }
  const Vector& b() const { return h_.b; }
  const Matrix& E() const { return h_.E; }
  const Vector& f() const { return h_.f; }
  const std::vector<std::string>& row_labels() const { return h_.row_labels; }
  const std::vector<std::string>& eq_labels() const { return h_.eq_labels; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  const std::vector<std::string>& vertex_labels() const { return vertex_labels_; }
  std::size_t num_ineqs() const { return h_.A.rows(); }
  std::size_t num_vertices() const { return vertices_.size(); }
  long affine_dim() const { return affine_dimension(vertices_); }

 private:
  std::size_t dim_;
  HRep h_;
  std::vector<Vector> vertices_;
  std::vector<std::string> vertex_labels_;
};

struct SlackMatrix {
  Matrix S;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::size_t> source_rows;  // inequality index in the source polytope

  std::size_t rows() const { return S.rows(); }
  std::size_t cols() const { return S.cols(); }
};

/// Product set row_set x col_set. Either side may be empty.
struct Rectangle {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;

  bool contains(std::size_t i, std::size_t j) const {
    return std::binary_search(rows.begin(), rows.end(), i) && std::binary_search(cols.begin(), cols.end(), j);
  }
  bool empty() const { return rows.empty() || cols.empty(); }
  friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

using RowFilter = std::function<bool(const std::string& label)>;

namespace row_filters {

// Size-1 odd sets are implied by the degree equalities.
inline bool without_implied(const std::string& label) { return label.rfind("oddset1:", 0) != 0; }
inline bool odd_sets(const std::string& label) { return label.rfind("oddset:", 0) == 0; }
inline bool all_odd_sets(const std::string& label) {
  return label.rfind("oddset:", 0) == 0 || label.rfind("oddset1:", 0) == 0;
}

}  // namespace row_filters

/// S_ij = b_i - A_i x_j over the inequality rows accepted by `filter`
/// (all rows when no filter is given).
inline SlackMatrix slack_matrix(const Polytope& p, const RowFilter& filter = {}) {
  SlackMatrix out;
  for (std::size_t i = 0; i < p.num_ineqs(); ++i)
    if (!filter || filter(p.row_labels()[i])) out.source_rows.push_back(i);
  out.S = Matrix(out.source_rows.size(), p.num_vertices());
  for (std::size_t r = 0; r < out.source_rows.size(); ++r) {
    const std::size_t i = out.source_rows[r];
    out.row_labels.push_back(p.row_labels()[i]);
    for (std::size_t j = 0; j < p.num_vertices(); ++j) out.S(r, j) = p.b()[i] - dot(p.A().row(i), p.vertices()[j]);
  }
  out.col_labels = p.vertex_labels();
  return out;
}

struct VertexCheck {
  bool ok = true;
  std::optional<std::size_t> offending;
  // For each verified vertex, the sum of its tight inequality normals; this
  // objective is maximized over P exactly at that vertex.
  std::vector<Vector> witnesses;
};

/// Checks that each listed vertex is an extreme point of the H-description:
/// the rows tight at x_j (equalities included) must have full column rank.
inline VertexCheck verify_vertices(const Polytope& p) {
  VertexCheck out;
  const std::size_t n = p.dim();
  for (std::size_t j = 0; j < p.num_vertices(); ++j) {
    const Vector& x = p.vertices()[j];
    Matrix tight(0, n);
    Vector witness(n);
    for (std::size_t i = 0; i < p.num_ineqs(); ++i)
      if (dot(p.A().row(i), x) == p.b()[i]) {
        tight.append_row(p.A().row(i));
        for (std::size_t k = 0; k < n; ++k) witness[k] += p.A()(i, k);
      }
    for (std::size_t i = 0; i < p.E().rows(); ++i) tight.append_row(p.E().row(i));
    if (rank(tight) < n) {
      out.ok = false;
      out.offending = j;
      return out;
    }
    out.witnesses.push_back(std::move(witness));
  }
  return out;
}

/// The face where every row in `tight_rows` holds with equality.
inline Polytope face(const Polytope& p, const std::set<std::size_t>& tight_rows) {
  for (std::size_t i : tight_rows)
    if (i >= p.num_ineqs()) throw InputError("face: row index " + std::to_string(i) + " out of range");
  HRep h;
  h.A = Matrix(0, p.dim());
  h.E = p.E();
  h.f = p.f();
  h.eq_labels = p.eq_labels();
  for (std::size_t i = 0; i < p.num_ineqs(); ++i) {
    if (tight_rows.count(i)) {
      h.E.append_row(p.A().row(i));
      h.f.push_back(p.b()[i]);
      h.eq_labels.push_back(p.row_labels()[i]);
    } else {
      h.A.append_row(p.A().row(i));
      h.b.push_back(p.b()[i]);
      h.row_labels.push_back(p.row_labels()[i]);
    }
  }
  std::vector<Vector> verts;
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < p.num_vertices(); ++j) {
    bool keep = true;
    for (std::size_t i : tight_rows)
      if (dot(p.A().row(i), p.vertices()[j]) != p.b()[i]) {
        keep = false;
        break;
      }
    if (keep) {
      verts.push_back(p.vertices()[j]);
      labels.push_back(p.vertex_labels()[j]);
    }
  }
  if (verts.empty()) throw InputError("face: empty face");
  if (affine_dimension(verts) < 1) throw InputError("face: face is 0-dimensional");
  return Polytope(p.dim(), std::move(h), std::move(verts), std::move(labels));
}

/// A polyhedron over variables (x, y): B x + C y <= d and Be x + Ce y = de.
struct LiftedSystem {
  std::size_t x_dim = 0;
  std::size_t y_dim = 0;
  Matrix B, C;
  Vector d;
  Matrix Be, Ce;
  Vector de;
  std::vector<std::string> row_labels;
  std::vector<std::string> eq_labels;

  std::size_t num_ineqs() const { return B.rows(); }

  void validate() const {
    if (B.cols() != x_dim || C.cols() != y_dim || Be.cols() != x_dim || Ce.cols() != y_dim)
      throw InputError("lifted system: column counts inconsistent with x/y dimensions");
    if (B.rows() != C.rows() || B.rows() != d.size() || Be.rows() != Ce.rows() || Be.rows() != de.size())
      throw InputError("lifted system: row counts inconsistent");
  }

  /// [B | C] and [Be | Ce] over the joint variable vector (x, y).
  Matrix joint_ineqs() const { return hcat(B, C); }
  Matrix joint_eqs() const { return hcat(Be, Ce); }

  /// Right-hand sides of the fiber { y : C y <= d - B x, Ce y = de - Be x }.
  std::pair<Vector, Vector> fiber_rhs(std::span<const Rational> x) const {
    Vector rd(d), rde(de);
    for (std::size_t i = 0; i < B.rows(); ++i) rd[i] -= dot(B.row(i), x);
    for (std::size_t i = 0; i < Be.rows(); ++i) rde[i] -= dot(Be.row(i), x);
    return {rd, rde};
  }

  static Matrix hcat(const Matrix& l, const Matrix& r) {
    Matrix m(l.rows(), l.cols() + r.cols());
    for (std::size_t i = 0; i < l.rows(); ++i) {
      std::copy(l.row(i).begin(), l.row(i).end(), m.row(i).begin());
      std::copy(r.row(i).begin(), r.row(i).end(), m.row(i).begin() + static_cast<std::ptrdiff_t>(l.cols()));
    }
    return m;
  }
};

/// Lexicographically minimal y in the fiber over x: minimizes y_0, fixes it,
/// then y_1, and so on. Stops fixing at the first coordinate that is
/// unbounded below. Returns nullopt when the fiber is empty.
inline std::optional<Vector> lexmin_lift(const LiftedSystem& q, std::span<const Rational> x) {
  auto [rd, rde] = q.fiber_rhs(x);
  Matrix eq = q.Ce;
  auto first = lp_feasible_point(q.C, rd, eq, rde, q.y_dim);
  if (!first) return std::nullopt;
  Vector y = *first;
  for (std::size_t k = 0; k < q.y_dim; ++k) {
    Vector c(q.y_dim);
    c[k] = 1;
    auto res = lp_solve(q.C, rd, eq, rde, c, Sense::minimize);
    if (!res.optimal()) break;
    y = res.point;
    Vector unit(q.y_dim);
    unit[k] = 1;
    eq.append_row(unit);
    rde.push_back(res.point[k]);
  }
  return y;
}

struct ProjectionVerdict {
  bool pass = true;
  std::optional<std::size_t> unliftable_vertex;
  std::optional<Vector> failing_objective;
  Rational p_max, q_max;  // values at the failing objective
  std::size_t trials_run = 0;
  std::vector<Vector> lifts;
  std::string detail;
};

/// Random integer objective with entries uniform in [lo, hi].
inline Vector random_objective(std::mt19937_64& rng, std::size_t n, long lo, long hi) {
  std::uniform_int_distribution<long> dist(lo, hi);
  Vector c(n);
  for (auto& x : c) x = dist(rng);
  return c;
}

/// Checks pi_x(Q) = P: every vertex of P lifts into Q, and for `trials`
/// seeded objectives in [-1000, 1000]^n, max over P equals max over Q.
inline ProjectionVerdict lp_equal_under_projection(const Polytope& p, const LiftedSystem& q, std::size_t trials,
                                                   std::uint64_t seed) {
  q.validate();
  if (q.x_dim != p.dim()) throw InputError("projection check: x dimension differs from polytope dimension");
  ProjectionVerdict out;
  for (std::size_t j = 0; j < p.num_vertices(); ++j) {
    auto y = lexmin_lift(q, p.vertices()[j]);
    if (!y) {
      out.pass = false;
      out.unliftable_vertex = j;
      out.detail = "vertex " + p.vertex_labels()[j] + " has no lift";
      return out;
    }
    out.lifts.push_back(std::move(*y));
  }
  const Matrix qa = q.joint_ineqs(), qe = q.joint_eqs();
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    Vector c = random_objective(rng, p.dim(), -1000, 1000);
    Vector cq(c);
    cq.resize(q.x_dim + q.y_dim);
    auto rp = p.hrep().maximize(c);
    auto rq = lp_solve(qa, q.d, qe, q.de, cq, Sense::maximize);
    ++out.trials_run;
    const bool same = rp.optimal() && rq.optimal() && rp.value == rq.value;
    if (!same) {
      out.pass = false;
      out.failing_objective = c;
      if (rp.optimal()) out.p_max = rp.value;
      if (rq.optimal()) out.q_max = rq.value;
      out.detail = rq.status == LpStatus::unbounded ? "extension unbounded along objective"
                   : !rq.optimal()                  ? "extension infeasible"
                                                    : "maxima differ";
      return out;
    }
  }
  return out;
}

}  // namespace xclab
