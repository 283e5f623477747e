#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "lp.hpp"
#include "matrix.hpp"
#include "polytope.hpp"
#include "rational.hpp"
#include "yannakakis.hpp"

namespace xclab {

// ---------------------------------------------------------------------------
// Weight matrices

/// Exact weights with a symbolic FORBIDDEN marker standing for -infinity.
/// FORBIDDEN is never a number: reading its value is an error, and it only
/// combines with a zero multiplier (to zero).
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(std::size_t rows, std::size_t cols) : values_(rows, cols), forbidden_(rows * cols, 0) {}
  explicit WeightMatrix(Matrix values) : values_(std::move(values)), forbidden_(values_.rows() * values_.cols(), 0) {}

  std::size_t rows() const { return values_.rows(); }
  std::size_t cols() const { return values_.cols(); }

  bool forbidden(std::size_t i, std::size_t j) const { return forbidden_[i * cols() + j] != 0; }
  void forbid(std::size_t i, std::size_t j) {
    forbidden_[i * cols() + j] = 1;
    values_(i, j) = 0;
  }
  void set(std::size_t i, std::size_t j, Rational v) {
    forbidden_[i * cols() + j] = 0;
    values_(i, j) = std::move(v);
  }
  const Rational& value(std::size_t i, std::size_t j) const {
    if (forbidden(i, j)) throw InputError("weight matrix: value of a FORBIDDEN cell requested");
    return values_(i, j);
  }
  std::size_t forbidden_count() const { return static_cast<std::size_t>(std::count(forbidden_.begin(), forbidden_.end(), 1)); }

  WeightMatrix transpose() const {
    WeightMatrix t(cols(), rows());
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t j = 0; j < cols(); ++j) {
        if (forbidden(i, j))
          t.forbid(j, i);
        else
          t.set(j, i, values_(i, j));
      }
    return t;
  }

 private:
  Matrix values_;
  std::vector<unsigned char> forbidden_;
};

/// <W, S> with FORBIDDEN * 0 = 0. A FORBIDDEN cell against a nonzero entry
/// is an input error.
inline Rational weight_inner_product(const WeightMatrix& w, const Matrix& s) {
  if (w.rows() != s.rows() || w.cols() != s.cols()) throw InputError("weight inner product: shape mismatch");
  Rational total = 0;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j) {
      if (w.forbidden(i, j)) {
        if (s(i, j) != 0)
          throw InputError("FORBIDDEN weight at (" + std::to_string(i) + "," + std::to_string(j) +
                           ") meets a nonzero entry");
        continue;
      }
      if (s(i, j) != 0) total += w.value(i, j) * s(i, j);
    }
  return total;
}

/// <W, R> for the 0/1 indicator of a rectangle, or nullopt when the
/// rectangle touches a FORBIDDEN cell.
inline std::optional<Rational> rectangle_weight(const WeightMatrix& w, const Rectangle& r) {
  Rational total = 0;
  for (std::size_t i : r.rows)
    for (std::size_t j : r.cols) {
      if (w.forbidden(i, j)) return std::nullopt;
      total += w.value(i, j);
    }
  return total;
}

// ---------------------------------------------------------------------------
// Support bitsets

namespace detail {

class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : words_((n + 63) / 64, 0) {}
  void set(std::size_t k) { words_[k / 64] |= std::uint64_t{1} << (k % 64); }
  bool test(std::size_t k) const { return (words_[k / 64] >> (k % 64)) & 1; }
  void and_not(const Bits& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= ~o.words_[w];
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }
  std::size_t count_and(const Bits& o) const {
    std::size_t c = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) c += static_cast<std::size_t>(__builtin_popcountll(words_[w] & o.words_[w]));
    return c;
  }
  bool none() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }
  std::size_t first() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w]) return w * 64 + static_cast<std::size_t>(__builtin_ctzll(words_[w]));
    return std::numeric_limits<std::size_t>::max();
  }
  template <class F>
  void for_each(F&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t x = words_[w];
      while (x) {
        fn(w * 64 + static_cast<std::size_t>(__builtin_ctzll(x)));
        x &= x - 1;
      }
    }
  }

 private:
  std::vector<std::uint64_t> words_;
};

struct Cell {
  std::size_t row, col;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Two support cells can share a rectangle iff the two cross cells are also
// in the support.
inline bool compatible(const Matrix& s, const Cell& a, const Cell& b) {
  return s(a.row, b.col) != 0 && s(b.row, a.col) != 0;
}

}  // namespace detail

using Cell = detail::Cell;

/// All maximal rectangles inside supp(S): one per nonempty column set that
/// is an intersection of row supports, paired with every row containing it.
inline std::vector<Rectangle> maximal_support_rectangles(const Matrix& s) {
  if (s.cols() > 63) throw InputError("maximal rectangles: at most 63 columns supported");
  std::vector<std::uint64_t> rowmask(s.rows(), 0);
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (s(i, j) != 0) rowmask[i] |= std::uint64_t{1} << j;
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::uint64_t> order;
  for (auto m : rowmask)
    if (m && seen.insert(m).second) order.push_back(m);
  for (std::size_t k = 0; k < order.size(); ++k)
    for (auto m : rowmask) {
      const std::uint64_t c = order[k] & m;
      if (c && seen.insert(c).second) order.push_back(c);
    }
  std::sort(order.begin(), order.end());
  std::vector<Rectangle> out;
  for (auto cols : order) {
    Rectangle r;
    for (std::size_t i = 0; i < s.rows(); ++i)
      if ((rowmask[i] & cols) == cols) r.rows.push_back(i);
    for (std::size_t j = 0; j < s.cols(); ++j)
      if ((cols >> j) & 1) r.cols.push_back(j);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rectangle covering

struct CoverResult {
  bool exceeded = false;
  std::size_t size = 0;  // minimum cover size when !exceeded
  std::vector<Rectangle> rectangles;
  std::size_t nodes = 0;
};

struct CoverLimits {
  std::size_t max_rows = 20;
  std::size_t max_cols = 20;
};

/// True iff every rectangle lies inside supp(S) and together they cover it.
inline bool is_support_cover(const Matrix& s, const std::vector<Rectangle>& rects) {
  std::vector<bool> hit(s.rows() * s.cols(), false);
  for (const auto& r : rects)
    for (std::size_t i : r.rows)
      for (std::size_t j : r.cols) {
        if (i >= s.rows() || j >= s.cols() || s(i, j) == 0) return false;
        hit[i * s.cols() + j] = true;
      }
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (s(i, j) != 0 && !hit[i * s.cols() + j]) return false;
  return true;
}

/// Minimum number of rectangles inside supp(S) covering supp(S), by
/// branch-and-bound set cover over maximal rectangles. `limit` caps the
/// number of search nodes; beyond it the result is flagged exceeded.
inline CoverResult rectangle_cover_exact(const Matrix& s, std::size_t limit, CoverLimits caps = {}) {
  if (s.rows() > caps.max_rows || s.cols() > caps.max_cols)
    throw InputError("exact rectangle cover: matrix exceeds " + std::to_string(caps.max_rows) + "x" +
                     std::to_string(caps.max_cols) + " cap");
  std::vector<Cell> cells;
  std::vector<std::size_t> cell_id(s.rows() * s.cols(), 0);
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (s(i, j) != 0) {
        cell_id[i * s.cols() + j] = cells.size();
        cells.push_back({i, j});
      }
  CoverResult out;
  if (cells.empty()) return out;

  const auto rects = maximal_support_rectangles(s);
  std::vector<detail::Bits> rect_bits;
  std::vector<std::vector<std::size_t>> covering(cells.size());
  for (std::size_t k = 0; k < rects.size(); ++k) {
    detail::Bits b(cells.size());
    for (std::size_t i : rects[k].rows)
      for (std::size_t j : rects[k].cols) {
        b.set(cell_id[i * s.cols() + j]);
        covering[cell_id[i * s.cols() + j]].push_back(k);
      }
    rect_bits.push_back(std::move(b));
  }
  for (auto& list : covering)
    std::stable_sort(list.begin(), list.end(),
                     [&](std::size_t a, std::size_t b) { return rect_bits[a].count() > rect_bits[b].count(); });

  // Greedy initial incumbent.
  std::vector<std::size_t> best;
  {
    detail::Bits left(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) left.set(c);
    while (!left.none()) {
      std::size_t pick = 0, gain = 0;
      for (std::size_t k = 0; k < rects.size(); ++k) {
        const std::size_t g = rect_bits[k].count_and(left);
        if (g > gain) {
          gain = g;
          pick = k;
        }
      }
      best.push_back(pick);
      left.and_not(rect_bits[pick]);
    }
  }

  // Lower bound on the remaining cover: a greedy set of uncovered cells that
  // pairwise cannot share a rectangle.
  auto packing_bound = [&](const detail::Bits& left) {
    std::vector<std::size_t> chosen;
    left.for_each([&](std::size_t c) {
      for (std::size_t d : chosen)
        if (detail::compatible(s, cells[c], cells[d])) return;
      chosen.push_back(c);
    });
    return chosen.size();
  };

  std::vector<std::size_t> current;
  bool exceeded = false;
  auto search = [&](auto&& self, const detail::Bits& left) -> void {
    if (exceeded) return;
    if (++out.nodes > limit) {
      exceeded = true;
      return;
    }
    if (left.none()) {
      if (current.size() < best.size()) best = current;
      return;
    }
    if (current.size() + packing_bound(left) >= best.size()) return;
    // Branch on the uncovered cell with the fewest covering rectangles.
    std::size_t pivot = left.first(), fewest = std::numeric_limits<std::size_t>::max();
    left.for_each([&](std::size_t c) {
      if (covering[c].size() < fewest) {
        fewest = covering[c].size();
        pivot = c;
      }
    });
    for (std::size_t k : covering[pivot]) {
      detail::Bits next = left;
      next.and_not(rect_bits[k]);
      current.push_back(k);
      self(self, next);
      current.pop_back();
      if (exceeded) return;
    }
  };
  detail::Bits all(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) all.set(c);
  search(search, all);

  out.exceeded = exceeded;
  if (!exceeded) {
    out.size = best.size();
    for (std::size_t k : best) out.rectangles.push_back(rects[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fooling sets

inline bool is_fooling_set(const Matrix& s, const std::vector<Cell>& cells) {
  for (const auto& c : cells)
    if (c.row >= s.rows() || c.col >= s.cols() || s(c.row, c.col) == 0) return false;
  for (std::size_t a = 0; a < cells.size(); ++a)
    for (std::size_t b = a + 1; b < cells.size(); ++b)
      if (cells[a] == cells[b] || detail::compatible(s, cells[a], cells[b])) return false;
  return true;
}

/// Greedy fooling set over the support cells in a seeded random order.
inline std::vector<Cell> fooling_set_greedy(const Matrix& s, std::uint64_t seed) {
  std::vector<Cell> support;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (s(i, j) != 0) support.push_back({i, j});
  std::mt19937_64 rng(seed);
  std::shuffle(support.begin(), support.end(), rng);
  std::vector<Cell> chosen;
  for (const auto& c : support) {
    bool ok = true;
    for (const auto& d : chosen)
      if (detail::compatible(s, c, d)) {
        ok = false;
        break;
      }
    if (ok) chosen.push_back(c);
  }
  return chosen;
}

// ---------------------------------------------------------------------------
// Maximum rectangle value (alpha)

struct RectangleValue {
  Rational value;
  Rectangle witness;
  bool certified = false;  // true only for exact enumeration
};

struct AlphaOptions {
  enum class Mode { exact, heuristic };
  Mode mode = Mode::exact;
  std::size_t cap = 22;  // exact mode: max size of the smaller side
  std::size_t restarts = 32;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

namespace detail {

// Best column set for fixed row weights: every non-forbidden column with a
// positive partial sum.
template <class Num>
Num best_columns_value(const std::vector<Num>& sums, const std::vector<int>& forb) {
  Num total = 0;
  for (std::size_t j = 0; j < sums.size(); ++j)
    if (forb[j] == 0 && sums[j] > 0) total += sums[j];
  return total;
}

// Exhaustive scan over row subsets in Gray-code order on the integer-scaled
// weights. Returns (best value, best row mask). Ties keep the earliest
// Gray-code position so the witness is deterministic.
template <class Num>
std::pair<Num, std::uint64_t> scan_row_subsets(const std::vector<std::vector<Num>>& w,
                                               const std::vector<std::vector<unsigned char>>& forb, std::size_t cols,
                                               std::uint64_t begin, std::uint64_t end) {
  const std::size_t f = w.size();
  std::vector<Num> sums(cols, Num(0));
  std::vector<int> fcount(cols, 0);
  auto gray = [](std::uint64_t k) { return k ^ (k >> 1); };
  std::uint64_t mask = gray(begin);
  for (std::size_t i = 0; i < f; ++i)
    if ((mask >> i) & 1)
      for (std::size_t j = 0; j < cols; ++j) {
        sums[j] += w[i][j];
        fcount[j] += forb[i][j];
      }
  Num best = best_columns_value(sums, fcount);
  std::uint64_t best_mask = mask;
  for (std::uint64_t k = begin + 1; k < end; ++k) {
    const std::size_t flip = static_cast<std::size_t>(__builtin_ctzll(k));
    mask ^= std::uint64_t{1} << flip;
    if ((mask >> flip) & 1) {
      for (std::size_t j = 0; j < cols; ++j) {
        sums[j] += w[flip][j];
        fcount[j] += forb[flip][j];
      }
    } else {
      for (std::size_t j = 0; j < cols; ++j) {
        sums[j] -= w[flip][j];
        fcount[j] -= forb[flip][j];
      }
    }
    Num v = best_columns_value(sums, fcount);
    if (v > best) {
      best = v;
      best_mask = mask;
    }
  }
  return {best, best_mask};
}

template <class Num>
std::pair<Num, std::uint64_t> parallel_scan(const std::vector<std::vector<Num>>& w,
                                            const std::vector<std::vector<unsigned char>>& forb, std::size_t cols,
                                            unsigned threads) {
  const std::uint64_t total = std::uint64_t{1} << w.size();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(total, 64))));
  if (threads == 1) return scan_row_subsets(w, forb, cols, 0, total);
  std::vector<std::pair<Num, std::uint64_t>> parts(threads);
  std::vector<std::uint64_t> gray_pos(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t b = total * t / threads, e = total * (t + 1) / threads;
    gray_pos[t] = b;
    pool.emplace_back([&, t, b, e] { parts[t] = scan_row_subsets(w, forb, cols, b, e); });
  }
  for (auto& th : pool) th.join();
  // Chunks are in Gray-code order, so the first strict maximum wins.
  auto best = parts[0];
  for (unsigned t = 1; t < threads; ++t)
    if (parts[t].first > best.first) best = parts[t];
  return best;
}

}  // namespace detail

/// Value of a rank-1 matrix x y^T against W for x, y in [0,1]; nullopt when a
/// FORBIDDEN cell receives positive mass.
inline std::optional<Rational> rank_one_value(const WeightMatrix& w, std::span<const Rational> x,
                                              std::span<const Rational> y) {
  Rational total = 0;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < w.cols(); ++j) {
      if (y[j] == 0) continue;
      if (w.forbidden(i, j)) return std::nullopt;
      total += w.value(i, j) * x[i] * y[j];
    }
  }
  return total;
}

/// alpha = max <W, R> over binary rank-1 R (the empty rectangle included,
/// so alpha >= 0). Exact mode scans every subset of the smaller side; for a
/// fixed subset the best opposite side takes exactly the indices with
/// positive partial sum. Heuristic mode alternates sides from seeded random
/// starts and returns an uncertified lower estimate.
inline RectangleValue max_rectangle_value(const WeightMatrix& w, const AlphaOptions& opt = {}) {
  const bool flip = w.rows() > w.cols();
  const WeightMatrix wt = flip ? w.transpose() : w;
  const std::size_t f = wt.rows(), v = wt.cols();

  auto finish = [&](Rectangle r, Rational value, bool certified) {
    if (flip) std::swap(r.rows, r.cols);
    return RectangleValue{std::move(value), std::move(r), certified};
  };
  auto best_cols_for = [&](const std::vector<bool>& rows_in) {
    Rectangle r;
    Rational value = 0;
    for (std::size_t i = 0; i < f; ++i)
      if (rows_in[i]) r.rows.push_back(i);
    for (std::size_t j = 0; j < v; ++j) {
      Rational sum = 0;
      bool forb = false;
      for (std::size_t i : r.rows) {
        if (wt.forbidden(i, j)) {
          forb = true;
          break;
        }
        sum += wt.value(i, j);
      }
      if (!forb && sum > 0) {
        r.cols.push_back(j);
        value += sum;
      }
    }
    if (r.cols.empty()) r.rows.clear();
    return std::make_pair(r, value);
  };

  if (opt.mode == AlphaOptions::Mode::exact) {
    if (f > opt.cap || f > 62)
      throw InputError("exact alpha: smaller side " + std::to_string(f) + " exceeds cap " + std::to_string(opt.cap) +
                       "; use heuristic mode");
    if (f == 0) return finish({}, 0, true);
    // Scale to a common denominator; use 64-bit sums when they cannot overflow.
    Integer l = 1;
    Integer maxabs = 0;
    for (std::size_t i = 0; i < f; ++i)
      for (std::size_t j = 0; j < v; ++j)
        if (!wt.forbidden(i, j)) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), wt.value(i, j).get_den_mpz_t());
    std::vector<std::vector<Integer>> scaled(f, std::vector<Integer>(v));
    std::vector<std::vector<unsigned char>> forb(f, std::vector<unsigned char>(v, 0));
    for (std::size_t i = 0; i < f; ++i)
      for (std::size_t j = 0; j < v; ++j) {
        if (wt.forbidden(i, j)) {
          forb[i][j] = 1;
          continue;
        }
        const Rational& x = wt.value(i, j);
        scaled[i][j] = x.get_num() * (l / x.get_den());
        if (abs(scaled[i][j]) > maxabs) maxabs = abs(scaled[i][j]);
      }
    Integer bound = maxabs * static_cast<unsigned long>(f) * static_cast<unsigned long>(v);
    std::uint64_t mask = 0;
    Rational value;
    if (bound < Integer("4611686018427387904")) {  // 2^62
      std::vector<std::vector<std::int64_t>> w64(f, std::vector<std::int64_t>(v, 0));
      for (std::size_t i = 0; i < f; ++i)
        for (std::size_t j = 0; j < v; ++j) w64[i][j] = scaled[i][j].get_si();
      auto [best, m] = detail::parallel_scan(w64, forb, v, opt.threads);
      mask = m;
      value = Rational(Integer(static_cast<long>(best)), l);
    } else {
      auto [best, m] = detail::parallel_scan(scaled, forb, v, opt.threads);
      mask = m;
      value = Rational(best, l);
    }
    value.canonicalize();
    std::vector<bool> rows_in(f);
    for (std::size_t i = 0; i < f; ++i) rows_in[i] = (mask >> i) & 1;
    auto [rect, rv] = best_cols_for(rows_in);
    if (value == 0) rect = {};
    return finish(rect, value, true);
  }

  // Heuristic: alternate best-columns / best-rows until stable.
  std::mt19937_64 rng(opt.seed);
  std::bernoulli_distribution coin(0.5);
  Rectangle best_rect;
  Rational best_value = 0;
  for (std::size_t t = 0; t < opt.restarts; ++t) {
    std::vector<bool> rows_in(f);
    for (std::size_t i = 0; i < f; ++i) rows_in[i] = coin(rng);
    Rational last = -1;
    for (int iter = 0; iter < 100; ++iter) {
      auto [rect, value] = best_cols_for(rows_in);
      if (value > best_value) {
        best_value = value;
        best_rect = rect;
      }
      if (value <= last) break;
      last = value;
      // best rows for these columns
      std::vector<bool> cols_in(v);
      for (std::size_t j : rect.cols) cols_in[j] = true;
      for (std::size_t i = 0; i < f; ++i) {
        Rational sum = 0;
        bool forb_hit = false;
        for (std::size_t j = 0; j < v; ++j) {
          if (!cols_in[j]) continue;
          if (wt.forbidden(i, j)) {
            forb_hit = true;
            break;
          }
          sum += wt.value(i, j);
        }
        rows_in[i] = !forb_hit && sum > 0;
      }
    }
  }
  return finish(best_rect, best_value, false);
}

// ---------------------------------------------------------------------------
// Hyperplane separation bound

/// <W, S> / (||S||_inf * alpha). Requires a certified alpha.
inline Rational hyperplane_bound(const WeightMatrix& w, const Matrix& s, const RectangleValue& alpha) {
  if (!alpha.certified) throw InputError("hyperplane bound: alpha must come from exact enumeration");
  const Rational ip = weight_inner_product(w, s);
  const Rational smax = s.max_abs();
  if (smax == 0) return 0;
  if (alpha.value <= 0) {
    if (ip > 0) throw InputError("hyperplane bound: alpha <= 0 with <W,S> > 0 (bound unbounded, invalid input)");
    return 0;
  }
  return ip / (smax * alpha.value);
}

// ---------------------------------------------------------------------------
// Heuristic nonnegative factorization

struct NmfOptions {
  std::size_t iterations = 25;
  unsigned long grid = 1024;  // denominators above this are rounded to k/grid
};

namespace detail {

// Solves min_x>=0 max_i |target_i - (M x)_i| exactly. Returns (x, residual).
inline std::pair<Vector, Rational> min_max_residual(const Matrix& m, std::span<const Rational> target) {
  const std::size_t r = m.cols(), rows = m.rows();
  Matrix a(0, r + 1);
  Vector b;
  for (std::size_t i = 0; i < rows; ++i) {
    Vector up(r + 1), down(r + 1);
    for (std::size_t k = 0; k < r; ++k) {
      up[k] = m(i, k);
      down[k] = -m(i, k);
    }
    up[r] = -1;
    down[r] = -1;
    a.append_row(up);
    b.push_back(target[i]);
    a.append_row(down);
    b.push_back(-target[i]);
  }
  for (std::size_t k = 0; k < r; ++k) {
    Vector nonneg(r + 1);
    nonneg[k] = -1;
    a.append_row(nonneg);
    b.push_back(0);
  }
  Vector c(r + 1);
  c[r] = 1;
  auto res = lp_solve(a, b, Matrix(0, r + 1), Vector{}, c, Sense::minimize);
  if (!res.optimal()) throw ComputationError("nmf: residual LP did not solve");
  Rational z = res.point[r];
  res.point.pop_back();
  return {std::move(res.point), std::move(z)};
}

inline Rational round_to_grid(const Rational& x, unsigned long grid) {
  if (x <= 0) return 0;
  if (x.get_den() <= grid) return x;
  Rational scaled = x * grid + Rational(1, 2);
  return make_rational(floor(scaled), Integer(grid));
}

// Best V for fixed U, column by column. Returns total residual.
inline Rational solve_right(const Matrix& u, const Matrix& s, Matrix& v) {
  v = Matrix(u.cols(), s.cols());
  Rational total = 0;
  for (std::size_t j = 0; j < s.cols(); ++j) {
    auto [x, z] = min_max_residual(u, s.col_vector(j));
    for (std::size_t k = 0; k < x.size(); ++k) v(k, j) = x[k];
    total += z;
  }
  return total;
}

// Column subset of S covering its support greedily; padded by cycling.
inline Matrix column_subset_start(const Matrix& s, std::size_t r) {
  std::vector<std::size_t> pick;
  std::vector<bool> covered(s.rows() * s.cols(), false);
  std::vector<bool> used(s.cols(), false);
  while (pick.size() < std::min(r, s.cols())) {
    std::size_t best = s.cols(), gain = 0;
    for (std::size_t j = 0; j < s.cols(); ++j) {
      if (used[j]) continue;
      std::size_t g = 0;
      for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t jj = 0; jj < s.cols(); ++jj)
          if (s(i, j) != 0 && s(i, jj) != 0 && !covered[i * s.cols() + jj]) ++g;
      if (best == s.cols() || g > gain) {
        best = j;
        gain = g;
      }
    }
    used[best] = true;
    pick.push_back(best);
    for (std::size_t i = 0; i < s.rows(); ++i)
      if (s(i, best) != 0)
        for (std::size_t jj = 0; jj < s.cols(); ++jj)
          if (s(i, jj) != 0) covered[i * s.cols() + jj] = true;
  }
  Matrix u(s.rows(), r);
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t i = 0; i < s.rows(); ++i) u(i, k) = pick.empty() ? Rational(0) : s(i, pick[k % pick.size()]);
  return u;
}

}  // namespace detail

/// Alternating exact min-max-residual LPs (V given U, then U given V), with
/// iterates rounded onto a bounded-denominator grid. A candidate is returned
/// only once an exact solve leaves zero residual, i.e. verify_factorization
/// holds; otherwise nullopt after `restarts` seeded restarts.
inline std::optional<Factorization> nmf_heuristic(const Matrix& s, std::size_t r, std::size_t restarts,
                                                  std::uint64_t seed, const NmfOptions& opt = {}) {
  if (r < 1) throw InputError("nmf: inner dimension must be >= 1");
  if (!s.is_nonnegative()) throw InputError("nmf: matrix has a negative entry");
  if (r < rank(s)) return std::nullopt;  // rank is a lower bound on rk+
  const Rational smax = s.max_abs();
  const long hi = std::max<long>(1, floor(smax).get_si());
  std::mt19937_64 rng(seed);
  for (std::size_t attempt = 0; attempt < restarts; ++attempt) {
    Matrix u;
    if (attempt == 0) {
      u = detail::column_subset_start(s, r);
    } else if (attempt == 1 && r >= s.rows()) {
      u = Matrix(s.rows(), r);
      for (std::size_t i = 0; i < s.rows(); ++i) u(i, i) = 1;
    } else {
      std::uniform_int_distribution<long> dist(0, hi);
      u = Matrix(s.rows(), r);
      for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t k = 0; k < r; ++k) u(i, k) = dist(rng);
    }
    Matrix v;
    Rational previous = -1;
    for (std::size_t it = 0; it < opt.iterations; ++it) {
      Rational resid = detail::solve_right(u, s, v);
      if (resid == 0) {
        Factorization fac{u, v};
        if (verify_factorization(s, fac)) return fac;
      }
      for (auto& x : v.entries()) x = detail::round_to_grid(x, opt.grid);
      Matrix ut;
      resid = detail::solve_right(v.transpose(), s.transpose(), ut);
      u = ut.transpose();
      if (resid == 0) {
        Factorization fac{u, v};
        if (verify_factorization(s, fac)) return fac;
      }
      for (auto& x : u.entries()) x = detail::round_to_grid(x, opt.grid);
      if (previous >= 0 && resid >= previous) break;
      previous = resid;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Certified intervals

struct Certificate {
  std::string method;  // rank | fooling_set | rectangle_cover | hyperplane
  Rational value;      // raw value of the bound
  long bound = 0;      // integer lower bound implied (ceil of value)
  std::variant<std::monostate, std::vector<Cell>, std::vector<Rectangle>> witness;
};

struct HyperplaneInput {
  WeightMatrix weights;
  RectangleValue alpha;
};

struct BoundConfig {
  std::uint64_t seed = 0;
  std::size_t fooling_restarts = 8;
  bool run_cover = true;
  std::size_t cover_limit = 200000;
  CoverLimits cover_caps{};
  bool search_upper = true;
  std::size_t nmf_restarts = 3;
  NmfOptions nmf{};
  std::vector<HyperplaneInput> hyperplanes;
};

struct BoundReport {
  long lower = 0;
  long upper = 0;
  std::vector<Certificate> lower_certificates;
  std::optional<Factorization> upper_witness;
  std::string upper_method;
  bool cover_exceeded = false;
};

/// Certified interval [lower, upper] for rk+(S). Lower bounds: rank, greedy
/// fooling sets, exact rectangle cover (within caps), supplied hyperplane
/// bounds. Upper bounds: support-trimmed identity factorization, then the
/// heuristic search downward while it keeps succeeding.
inline BoundReport nonnegative_rank_bounds(const Matrix& s, const BoundConfig& cfg = {}) {
  if (!s.is_nonnegative()) throw InputError("bounds: matrix has a negative entry");
  BoundReport rep;
  auto add = [&](Certificate c) {
    c.bound = ceil(c.value).get_si();
    rep.lower = std::max(rep.lower, c.bound);
    rep.lower_certificates.push_back(std::move(c));
  };
  add({"rank", Rational(static_cast<long>(rank(s))), 0, std::monostate{}});

  std::vector<Cell> best_fool;
  for (std::size_t t = 0; t < cfg.fooling_restarts; ++t) {
    auto fs = fooling_set_greedy(s, cfg.seed + t);
    if (fs.size() > best_fool.size()) best_fool = std::move(fs);
  }
  add({"fooling_set", Rational(static_cast<long>(best_fool.size())), 0, best_fool});

  if (cfg.run_cover && s.rows() <= cfg.cover_caps.max_rows && s.cols() <= cfg.cover_caps.max_cols) {
    auto cover = rectangle_cover_exact(s, cfg.cover_limit, cfg.cover_caps);
    rep.cover_exceeded = cover.exceeded;
    if (!cover.exceeded) add({"rectangle_cover", Rational(static_cast<long>(cover.size)), 0, cover.rectangles});
  }
  for (const auto& h : cfg.hyperplanes) add({"hyperplane", hyperplane_bound(h.weights, s, h.alpha), 0, std::monostate{}});

  // Upper: keep only nonzero rows (or columns), whichever side is smaller.
  std::vector<std::size_t> nz_rows, nz_cols;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (s(i, j) != 0) {
        nz_rows.push_back(i);
        break;
      }
  for (std::size_t j = 0; j < s.cols(); ++j)
    for (std::size_t i = 0; i < s.rows(); ++i)
      if (s(i, j) != 0) {
        nz_cols.push_back(j);
        break;
      }
  if (nz_rows.empty()) {
    rep.upper = 0;
    rep.upper_method = "zero";
    return rep;
  }
  Factorization trivial;
  if (nz_rows.size() <= nz_cols.size()) {
    trivial.U = Matrix(s.rows(), nz_rows.size());
    for (std::size_t k = 0; k < nz_rows.size(); ++k) trivial.U(nz_rows[k], k) = 1;
    trivial.V = s.select_rows(nz_rows);
  } else {
    trivial.U = s.select_cols(nz_cols);
    trivial.V = Matrix(nz_cols.size(), s.cols());
    for (std::size_t k = 0; k < nz_cols.size(); ++k) trivial.V(k, nz_cols[k]) = 1;
  }
  rep.upper = static_cast<long>(trivial.inner_dim());
  rep.upper_witness = std::move(trivial);
  rep.upper_method = "support_identity";

  if (cfg.search_upper) {
    for (long r = rep.upper - 1; r >= std::max(1L, rep.lower); --r) {
      auto fac = nmf_heuristic(s, static_cast<std::size_t>(r), cfg.nmf_restarts, cfg.seed, cfg.nmf);
      if (!fac) break;
      rep.upper = r;
      rep.upper_witness = std::move(fac);
      rep.upper_method = "nmf_heuristic";
    }
  }
  return rep;
}

/// Re-checks every certificate and the upper witness of a report against S.
inline bool reverify(const BoundReport& rep, const Matrix& s, const BoundConfig& cfg = {}) {
  if (rep.lower > rep.upper) return false;
  long best = 0;
  for (const auto& c : rep.lower_certificates) {
    if (c.bound != ceil(c.value).get_si()) return false;
    best = std::max(best, c.bound);
    if (c.method == "rank") {
      if (c.value != Rational(static_cast<long>(rank(s)))) return false;
    } else if (c.method == "fooling_set") {
      const auto* cells = std::get_if<std::vector<Cell>>(&c.witness);
      if (!cells || !is_fooling_set(s, *cells) || c.value != Rational(static_cast<long>(cells->size()))) return false;
    } else if (c.method == "rectangle_cover") {
      const auto* rects = std::get_if<std::vector<Rectangle>>(&c.witness);
      if (!rects || !is_support_cover(s, *rects) || c.value != Rational(static_cast<long>(rects->size()))) return false;
      auto again = rectangle_cover_exact(s, cfg.cover_limit, cfg.cover_caps);
      if (again.exceeded || again.size != rects->size()) return false;
    } else if (c.method == "hyperplane") {
      bool matched = false;
      for (const auto& h : cfg.hyperplanes)
        if (hyperplane_bound(h.weights, s, h.alpha) == c.value) matched = true;
      if (!matched) return false;
    } else {
      return false;
    }
  }
  if (best != rep.lower) return false;
  if (rep.upper_witness) {
    if (!verify_factorization(s, *rep.upper_witness)) return false;
    if (static_cast<long>(rep.upper_witness->inner_dim()) != rep.upper) return false;
  } else if (rep.upper != 0) {
    return false;
  }
  return true;
}

}  // namespace xclab
