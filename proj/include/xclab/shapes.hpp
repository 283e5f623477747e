#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "polytope.hpp"

// Small reference polytopes used by the test suite and the CLI.

namespace xclab::shapes {

/// conv{e_0, ..., e_d} in R^{d+1}: sum x = 1, x >= 0. Its slack matrix is I_{d+1}.
inline Polytope standard_simplex(std::size_t d) {
  if (d < 1) throw InputError("simplex dimension must be >= 1");
  const std::size_t n = d + 1;
  HRep h;
  h.A = Matrix(0, n);
  h.E = Matrix(0, n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector row(n);
    row[i] = -1;
    h.A.append_row(row);
    h.b.push_back(0);
    h.row_labels.push_back("nonneg:" + std::to_string(i));
  }
  h.E.append_row(Vector(n, Rational(1)));
  h.f.push_back(1);
  h.eq_labels.push_back("sum");
  std::vector<Vector> verts;
  for (std::size_t i = 0; i < n; ++i) {
    Vector v(n);
    v[i] = 1;
    verts.push_back(v);
  }
  return Polytope(n, std::move(h), std::move(verts));
}

/// conv{0, e_1, ..., e_d} in R^d: x >= 0, sum x <= 1.
inline Polytope corner_simplex(std::size_t d) {
  if (d < 1) throw InputError("simplex dimension must be >= 1");
  HRep h;
  h.A = Matrix(0, d);
  h.E = Matrix(0, d);
  for (std::size_t i = 0; i < d; ++i) {
    Vector row(d);
    row[i] = -1;
    h.A.append_row(row);
    h.b.push_back(0);
    h.row_labels.push_back("nonneg:" + std::to_string(i));
  }
  h.A.append_row(Vector(d, Rational(1)));
  h.b.push_back(1);
  h.row_labels.push_back("sum");
  std::vector<Vector> verts{Vector(d)};
  for (std::size_t i = 0; i < d; ++i) {
    Vector v(d);
    v[i] = 1;
    verts.push_back(v);
  }
  return Polytope(d, std::move(h), std::move(verts));
}

/// [0,1]^d.
inline Polytope cube(std::size_t d) {
  if (d < 1 || d > 16) throw InputError("cube dimension must be in [1, 16]");
  HRep h;
  h.A = Matrix(0, d);
  h.E = Matrix(0, d);
  for (std::size_t i = 0; i < d; ++i) {
    Vector lo(d), hi(d);
    lo[i] = -1;
    hi[i] = 1;
    h.A.append_row(lo);
    h.b.push_back(0);
    h.row_labels.push_back("lower:" + std::to_string(i));
    h.A.append_row(hi);
    h.b.push_back(1);
    h.row_labels.push_back("upper:" + std::to_string(i));
  }
  std::vector<Vector> verts;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Vector v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = (mask >> i) & 1;
    verts.push_back(v);
  }
  return Polytope(d, std::move(h), std::move(verts));
}

/// conv{+-e_i} in R^d: sum s_i x_i <= 1 for every sign vector s.
inline Polytope cross_polytope(std::size_t d) {
  if (d < 1 || d > 16) throw InputError("cross-polytope dimension must be in [1, 16]");
  HRep h;
  h.A = Matrix(0, d);
  h.E = Matrix(0, d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Vector row(d);
    std::string label = "signs:";
    for (std::size_t i = 0; i < d; ++i) {
      const bool neg = (mask >> i) & 1;
      row[i] = neg ? -1 : 1;
      label += neg ? '-' : '+';
    }
    h.A.append_row(row);
    h.b.push_back(1);
    h.row_labels.push_back(label);
  }
  std::vector<Vector> verts;
  for (std::size_t i = 0; i < d; ++i)
    for (int s : {1, -1}) {
      Vector v(d);
      v[i] = s;
      verts.push_back(v);
    }
  return Polytope(d, std::move(h), std::move(verts));
}

/// Convex polygon from counter-clockwise integer vertices; edges become the
/// inequalities.
inline Polytope polygon(const std::vector<std::pair<long, long>>& ccw) {
  const std::size_t k = ccw.size();
  if (k < 3) throw InputError("polygon needs at least 3 vertices");
  HRep h;
  h.A = Matrix(0, 2);
  h.E = Matrix(0, 2);
  std::vector<Vector> verts;
  for (std::size_t i = 0; i < k; ++i) {
    auto [x0, y0] = ccw[i];
    auto [x1, y1] = ccw[(i + 1) % k];
    // outward normal of a ccw edge is (dy, -dx)
    const long a = y1 - y0, c = x0 - x1;
    h.A.append_row(Vector{Rational(a), Rational(c)});
    h.b.push_back(Rational(a * x0 + c * y0));
    h.row_labels.push_back("edge:" + std::to_string(i));
    verts.push_back(Vector{Rational(x0), Rational(y0)});
  }
  return Polytope(2, std::move(h), std::move(verts));
}

inline Polytope square() { return polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

/// Affine image of the regular hexagon with integer vertices.
inline Polytope hexagon() { return polygon({{0, 0}, {1, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 1}}); }

}  // namespace xclab::shapes
