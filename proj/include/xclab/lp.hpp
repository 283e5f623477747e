#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "rational.hpp"

namespace xclab {

enum class Sense { maximize, minimize };

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Rational value;  // meaningful only when optimal
  Vector point;    // meaningful only when optimal

  bool optimal() const { return status == LpStatus::optimal; }
};

namespace detail {

// Dense two-phase primal simplex on { z >= 0 : T z = rhs, rhs >= 0 } with
// Bland's rule. Minimizes cost . z.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1)), basis_(rows) {}

  Rational& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
  Rational& rhs(std::size_t i) { return t_[i * (n_ + 1) + n_]; }
  Rational& cost(std::size_t j) { return t_[m_ * (n_ + 1) + j]; }
  Rational& objective() { return t_[m_ * (n_ + 1) + n_]; }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const Rational piv = at(r, c);
    for (std::size_t j = 0; j <= n_; ++j) t_[r * (n_ + 1) + j] /= piv;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const Rational f = t_[i * (n_ + 1) + c];
      if (f == 0) continue;
      for (std::size_t j = 0; j <= n_; ++j) {
        const Rational& src = t_[r * (n_ + 1) + j];
        if (src != 0) t_[i * (n_ + 1) + j] -= f * src;
      }
    }
    basis_[r] = c;
  }

  // Runs simplex iterations restricted to columns < active_cols.
  // Returns false when unbounded.
  bool run(std::size_t active_cols) {
    for (;;) {
      std::size_t enter = active_cols;
      for (std::size_t j = 0; j < active_cols; ++j)
        if (cost(j) < 0) {
          enter = j;
          break;
        }
      if (enter == active_cols) return true;
      std::size_t leave = m_;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (at(i, enter) <= 0) continue;
        Rational ratio = rhs(i) / at(i, enter);
        if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

  void remove_row(std::size_t r) {
    std::vector<Rational> next;
    next.reserve(m_ * (n_ + 1));
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      for (std::size_t j = 0; j <= n_; ++j) next.push_back(std::move(t_[i * (n_ + 1) + j]));
    }
    t_ = std::move(next);
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --m_;
  }

 private:
  std::size_t m_, n_;
  std::vector<Rational> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

/// Exact optimum of c.x over { x free : A x <= b, E x = f }.
///
/// Free variables are split as x = p - q. The standard-form columns are
/// ordered [p | q | inequality slacks | artificials]; Bland's rule picks the
/// lowest-index improving column and breaks ratio ties by lowest basic index,
/// so results are deterministic and the method terminates on degenerate input.
inline LpResult lp_solve(const Matrix& A, std::span<const Rational> b, const Matrix& E, std::span<const Rational> f,
                         std::span<const Rational> c, Sense sense) {
  const std::size_t n = c.size();
  if ((A.rows() && A.cols() != n) || (E.rows() && E.cols() != n) || A.rows() != b.size() || E.rows() != f.size())
    throw InputError("lp_solve: dimension mismatch");

  const std::size_t mi = A.rows(), me = E.rows(), m = mi + me;
  // Rows whose slack can start basic do not need an artificial.
  std::vector<bool> needs_art(m, true);
  for (std::size_t i = 0; i < mi; ++i) needs_art[i] = b[i] < 0;
  std::size_t n_art = 0;
  for (bool x : needs_art) n_art += x;

  const std::size_t col_slack = 2 * n, col_art = col_slack + mi, total = col_art + n_art;
  detail::Tableau tab(m, total);

  std::size_t next_art = col_art;
  for (std::size_t i = 0; i < m; ++i) {
    const bool ineq = i < mi;
    const auto coeffs = ineq ? A.row(i) : E.row(i - mi);
    const Rational& r = ineq ? b[i] : f[i - mi];
    const bool flip = r < 0;
    for (std::size_t j = 0; j < n; ++j) {
      const Rational v = flip ? Rational(-coeffs[j]) : coeffs[j];
      tab.at(i, j) = v;
      tab.at(i, n + j) = -v;
    }
    if (ineq) tab.at(i, col_slack + i) = flip ? -1 : 1;
    tab.rhs(i) = flip ? Rational(-r) : r;
    if (needs_art[i]) {
      tab.at(i, next_art) = 1;
      tab.basis()[i] = next_art++;
    } else {
      tab.basis()[i] = col_slack + i;
    }
  }

  // Phase 1: minimize the sum of artificials, written in reduced form.
  for (std::size_t i = 0; i < m; ++i) {
    if (!needs_art[i]) continue;
    for (std::size_t j = 0; j < col_art; ++j) tab.cost(j) -= tab.at(i, j);
    tab.objective() -= tab.rhs(i);
  }
  tab.run(total);
  if (tab.objective() != 0) return {LpStatus::infeasible, {}, {}};

  // Drive zero-level artificials out of the basis; drop redundant rows.
  for (std::size_t i = 0; i < tab.rows();) {
    if (tab.basis()[i] < col_art) {
      ++i;
      continue;
    }
    std::size_t enter = col_art;
    for (std::size_t j = 0; j < col_art; ++j)
      if (tab.at(i, j) != 0) {
        enter = j;
        break;
      }
    if (enter == col_art) {
      tab.remove_row(i);
    } else {
      tab.pivot(i, enter);
      ++i;
    }
  }

  // Phase 2 over original columns only.
  for (std::size_t j = 0; j <= total; ++j) tab.cost(j) = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const Rational cj = sense == Sense::maximize ? Rational(-c[j]) : c[j];
    tab.cost(j) = cj;
    tab.cost(n + j) = -cj;
  }
  for (std::size_t i = 0; i < tab.rows(); ++i) {
    const Rational cb = tab.cost(tab.basis()[i]);
    if (cb == 0) continue;
    for (std::size_t j = 0; j <= total; ++j) tab.cost(j) -= cb * (j == total ? tab.rhs(i) : tab.at(i, j));
  }
  if (!tab.run(col_art)) return {LpStatus::unbounded, {}, {}};

  Vector z(total);
  for (std::size_t i = 0; i < tab.rows(); ++i) z[tab.basis()[i]] = tab.rhs(i);
  Vector x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = z[j] - z[n + j];
  Rational value = dot(c, x);
  return {LpStatus::optimal, std::move(value), std::move(x)};
}

/// Feasibility form: any point of { A x <= b, E x = f }, or nullopt.
inline std::optional<Vector> lp_feasible_point(const Matrix& A, std::span<const Rational> b, const Matrix& E,
                                               std::span<const Rational> f, std::size_t n) {
  Vector zero(n);
  auto res = lp_solve(A, b, E, f, zero, Sense::minimize);
  if (!res.optimal()) return std::nullopt;
  return std::move(res.point);
}

/// Multipliers u >= 0 (one per row of `rows`) and w free (one per row of
/// `free_rows`) with u.rows + w.free_rows = target, or nullopt. The
/// multipliers are returned concatenated as (u, w).
inline std::optional<Vector> conic_combination(const Matrix& rows, std::span<const Rational> target,
                                               const Matrix& free_rows) {
  const std::size_t nu = rows.rows(), nw = free_rows.rows(), k = target.size();
  if ((nu && rows.cols() != k) || (nw && free_rows.cols() != k))
    throw InputError("conic_combination: column count mismatch");
  const std::size_t nv = nu + nw;
  Matrix neg(nu, nv);
  for (std::size_t i = 0; i < nu; ++i) neg(i, i) = -1;
  Vector zeros(nu);
  Matrix eq(k, nv);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < nu; ++i) eq(j, i) = rows(i, j);
    for (std::size_t i = 0; i < nw; ++i) eq(j, nu + i) = free_rows(i, j);
  }
  return lp_feasible_point(neg, zeros, eq, target, nv);
}

/// Multipliers u >= 0 with u.rows = target, or nullopt.
inline std::optional<Vector> conic_combination(const Matrix& rows, std::span<const Rational> target) {
  return conic_combination(rows, target, Matrix(0, target.size()));
}

}  // namespace xclab
