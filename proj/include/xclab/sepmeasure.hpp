#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bounds.hpp"
#include "errors.hpp"
#include "matching.hpp"
#include "matrix.hpp"
#include "polytope.hpp"
#include "rational.hpp"

namespace xclab {

inline Integer binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

inline Integer factorial(std::size_t n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

/// Number of perfect matchings on `nodes` labelled nodes: (nodes-1)!!, and 0
/// for an odd count.
inline Integer perfect_matching_count(std::size_t nodes) {
  if (nodes % 2) return 0;
  Integer r = 1;
  for (std::size_t k = nodes; k >= 2; k -= 2) r *= static_cast<unsigned long>(k - 1);
  return r;
}

/// Parameters (n, m, k, t) with n = 3m(k-3) + 2k and t = (m+1)/2 (k-3) + 3.
struct MatchingCutInstance {
  std::size_t n = 0, m = 0, k = 0, t = 0;

  static MatchingCutInstance from_blocks(std::size_t m, std::size_t k) {
    if (k < 5 || k % 2 == 0) throw InputError("instance: k must be odd and >= 5");
    if (m < 1 || m % 2 == 0) throw InputError("instance: m must be odd and >= 1");
    MatchingCutInstance inst{3 * m * (k - 3) + 2 * k, m, k, (m + 1) / 2 * (k - 3) + 3};
    inst.validate();
    return inst;
  }

  void validate() const {
    if (k < 5 || k % 2 == 0) throw InputError("instance: k must be odd and >= 5");
    if (m < 1 || m % 2 == 0) throw InputError("instance: m must be odd and >= 1");
    if (n != 3 * m * (k - 3) + 2 * k) throw InputError("instance: n != 3m(k-3) + 2k");
    if (t != (m + 1) / 2 * (k - 3) + 3) throw InputError("instance: t != (m+1)/2 (k-3) + 3");
    if (t % 2 == 0) throw InputError("instance: t must be odd");
  }
};

inline void check_cut_params(std::size_t n, std::size_t t) {
  if (n % 2) throw InputError("cut ground: n must be even");
  if (t % 2 == 0) throw InputError("cut ground: t must be odd");
  if (t < 1 || t + 1 > n) throw InputError("cut ground: t must lie in [1, n-1]");
}

/// |Q_l| = #{(U, M) : |U| = t, |delta(U) cap M| = l}, by counting: choose U,
/// the l crossing endpoints on each side, pair them up, and perfectly match
/// what remains on each side.
inline Integer q_class_size(std::size_t n, std::size_t t, std::size_t l) {
  check_cut_params(n, t);
  if (l % 2 == 0) return 0;
  if (l > t || l > n - t) return 0;
  return binomial(n, t) * binomial(t, l) * binomial(n - t, l) * factorial(l) * perfect_matching_count(t - l) *
         perfect_matching_count(n - t - l);
}

/// All (cut, perfect matching) pairs with |U| = t, materialized. Cuts are the
/// t-subsets of {0..n-1} in lexicographic order; matchings follow
/// enumerate_perfect_matchings.
class CutMatchingGround {
 public:
  static constexpr std::size_t default_cap = 2'000'000;

  static CutMatchingGround materialize(std::size_t n, std::size_t t, std::size_t cap = default_cap) {
    check_cut_params(n, t);
    if (n > 63) throw InputError("cut ground: n too large to materialize");
    const Integer pairs = binomial(n, t) * perfect_matching_count(n);
    if (pairs > Integer(static_cast<unsigned long>(cap)))
      throw InputError("cut ground: " + pairs.get_str() + " pairs exceed the materialization cap");
    CutMatchingGround g;
    g.n_ = n;
    g.t_ = t;
    for (const auto& u : subsets_of_size(n, t)) {
      std::uint64_t mask = 0;
      for (std::size_t v : u) mask |= std::uint64_t{1} << v;
      g.cuts_.push_back(mask);
    }
    g.matchings_ = enumerate_perfect_matchings(n).matchings;
    g.fill();
    return g;
  }

  /// Rebuilds a ground from stored cut masks and matchings (e.g. a disk cache).
  static CutMatchingGround from_parts(std::size_t n, std::size_t t, std::vector<std::uint64_t> cuts,
                                      std::vector<Matching> matchings) {
    check_cut_params(n, t);
    CutMatchingGround g;
    g.n_ = n;
    g.t_ = t;
    g.cuts_ = std::move(cuts);
    g.matchings_ = std::move(matchings);
    if (Integer(static_cast<unsigned long>(g.cuts_.size())) != binomial(n, t) ||
        Integer(static_cast<unsigned long>(g.matchings_.size())) != perfect_matching_count(n))
      throw InputError("cut ground: stored parts have the wrong size");
    for (auto c : g.cuts_)
      if (static_cast<std::size_t>(__builtin_popcountll(c)) != t) throw InputError("cut ground: stored cut has wrong size");
    g.fill();
    return g;
  }

  std::size_t n() const { return n_; }
  std::size_t t() const { return t_; }
  std::size_t num_cuts() const { return cuts_.size(); }
  std::size_t num_matchings() const { return matchings_.size(); }
  const std::vector<std::uint64_t>& cuts() const { return cuts_; }
  const std::vector<Matching>& matchings() const { return matchings_; }

  bool in_cut(std::size_t cut, std::size_t node) const { return (cuts_[cut] >> node) & 1; }

  /// |delta(U) cap M|.
  std::size_t crossing(std::size_t cut, std::size_t matching) const { return crossing_[cut * matchings_.size() + matching]; }

  /// S_UM = |delta(U) cap M| - 1.
  Matrix slack() const {
    Matrix s(num_cuts(), num_matchings());
    for (std::size_t u = 0; u < num_cuts(); ++u)
      for (std::size_t m = 0; m < num_matchings(); ++m) s(u, m) = static_cast<long>(crossing(u, m)) - 1;
    return s;
  }

  Rectangle full() const {
    Rectangle r;
    for (std::size_t u = 0; u < num_cuts(); ++u) r.rows.push_back(u);
    for (std::size_t m = 0; m < num_matchings(); ++m) r.cols.push_back(m);
    return r;
  }

 private:
  void fill() {
    EdgeIndexing ix(n_);
    crossing_.assign(cuts_.size() * matchings_.size(), 0);
    for (std::size_t u = 0; u < cuts_.size(); ++u)
      for (std::size_t m = 0; m < matchings_.size(); ++m) {
        unsigned char c = 0;
        for (std::size_t e : matchings_[m]) {
          auto [a, b] = ix.endpoints(e);
          if (((cuts_[u] >> a) & 1) != ((cuts_[u] >> b) & 1)) ++c;
        }
        crossing_[u * matchings_.size() + m] = c;
      }
  }

  std::size_t n_ = 0, t_ = 0;
  std::vector<std::uint64_t> cuts_;
  std::vector<Matching> matchings_;
  std::vector<unsigned char> crossing_;
};

/// Class sizes |Q_3| and |Q_k| for the weight matrix, with the input checks
/// shared by every W-based operation.
inline std::pair<Integer, Integer> weight_class_sizes(std::size_t n, std::size_t t, std::size_t k) {
  check_cut_params(n, t);
  if (k % 2 == 0 || k <= 3) throw InputError("weight matrix: k must be odd and > 3");
  Integer q3 = q_class_size(n, t, 3), qk = q_class_size(n, t, k);
  if (q3 == 0) throw InputError("weight matrix: class Q_3 is empty");
  if (qk == 0) throw InputError("weight matrix: class Q_" + std::to_string(k) + " is empty");
  return {q3, qk};
}

/// W on U_all x M_all: FORBIDDEN on Q_1, 1/|Q_3| on Q_3,
/// -1/((k-1)|Q_k|) on Q_k, 0 elsewhere.
inline WeightMatrix weight_matrix(const CutMatchingGround& g, std::size_t k) {
  auto [q3, qk] = weight_class_sizes(g.n(), g.t(), k);
  const Rational reward = make_rational(Integer(1), q3);
  const Rational penalty = -make_rational(Integer(1), Integer(static_cast<unsigned long>(k - 1)) * qk);
  WeightMatrix w(g.num_cuts(), g.num_matchings());
  for (std::size_t u = 0; u < g.num_cuts(); ++u)
    for (std::size_t m = 0; m < g.num_matchings(); ++m) {
      const std::size_t c = g.crossing(u, m);
      if (c == 1)
        w.forbid(u, m);
      else if (c == 3)
        w.set(u, m, reward);
      else if (c == k)
        w.set(u, m, penalty);
    }
  return w;
}

/// <W, S> by class counting: Q_1 contributes 0 (zero slack against
/// FORBIDDEN), Q_3 contributes (3-1)|Q_3|/|Q_3|, Q_k contributes
/// -(k-1)|Q_k|/((k-1)|Q_k|).
inline Rational ws_inner_product_counting(std::size_t n, std::size_t t, std::size_t k) {
  auto [q3, qk] = weight_class_sizes(n, t, k);
  const Rational q3_part = Rational(2 * q3) * make_rational(Integer(1), q3);
  const Rational qk_part = Rational(Integer(static_cast<unsigned long>(k - 1)) * qk) *
                           make_rational(Integer(1), Integer(static_cast<unsigned long>(k - 1)) * qk);
  return q3_part - qk_part;
}

/// <W, S> entrywise over a materialized ground.
inline Rational ws_inner_product_materialized(const CutMatchingGround& g, std::size_t k) {
  return weight_inner_product(weight_matrix(g, k), g.slack());
}

struct WsProduct {
  Rational counting;
  std::optional<Rational> materialized;
};

inline WsProduct ws_inner_product(std::size_t n, std::size_t t, std::size_t k, bool crosscheck,
                                  std::size_t cap = CutMatchingGround::default_cap) {
  WsProduct out{ws_inner_product_counting(n, t, k), std::nullopt};
  if (crosscheck) out.materialized = ws_inner_product_materialized(CutMatchingGround::materialize(n, t, cap), k);
  return out;
}

/// Number of pairs of R in class Q_l.
inline Integer count_in_class(const Rectangle& r, const CutMatchingGround& g, std::size_t l) {
  unsigned long c = 0;
  for (std::size_t u : r.rows)
    for (std::size_t m : r.cols)
      if (g.crossing(u, m) == l) ++c;
  return Integer(c);
}

/// mu_l(R) = |R cap Q_l| / |Q_l|.
inline Rational mu(const Rectangle& r, const CutMatchingGround& g, std::size_t l) {
  const Integer q = q_class_size(g.n(), g.t(), l);
  if (q == 0) throw InputError("mu: class Q_" + std::to_string(l) + " is empty");
  return make_rational(count_in_class(r, g, l), q);
}

/// U_{e1,e2} x M_{e1,e2}: cuts crossed by both edges, matchings containing both.
inline Rectangle canonical_rectangle(std::pair<std::size_t, std::size_t> e1, std::pair<std::size_t, std::size_t> e2,
                                     const CutMatchingGround& g) {
  const std::size_t n = g.n();
  if (e1.first >= n || e1.second >= n || e2.first >= n || e2.second >= n || e1.first == e1.second ||
      e2.first == e2.second)
    throw InputError("canonical rectangle: invalid edge");
  if (e1.first == e2.first || e1.first == e2.second || e1.second == e2.first || e1.second == e2.second)
    throw InputError("canonical rectangle: edges must not share a node");
  EdgeIndexing ix(n);
  const std::size_t i1 = ix.index(e1.first, e1.second), i2 = ix.index(e2.first, e2.second);
  Rectangle r;
  for (std::size_t u = 0; u < g.num_cuts(); ++u)
    if (g.in_cut(u, e1.first) != g.in_cut(u, e1.second) && g.in_cut(u, e2.first) != g.in_cut(u, e2.second))
      r.rows.push_back(u);
  for (std::size_t m = 0; m < g.num_matchings(); ++m) {
    const auto& mt = g.matchings()[m];
    if (std::binary_search(mt.begin(), mt.end(), i1) && std::binary_search(mt.begin(), mt.end(), i2))
      r.cols.push_back(m);
  }
  return r;
}

struct RectWValue {
  bool forbidden_violation = false;  // R meets Q_1: <W, R> = -infinity
  Rational value;
};

/// <W, R> = mu_3(R) - mu_k(R)/(k-1) when R avoids Q_1.
inline RectWValue rectangle_w_value(const Rectangle& r, const CutMatchingGround& g, std::size_t k) {
  weight_class_sizes(g.n(), g.t(), k);
  if (count_in_class(r, g, 1) != 0) return {true, 0};
  return {false, mu(r, g, 3) - mu(r, g, k) / Rational(static_cast<long>(k - 1))};
}

/// Indices i whose marginal under the uniform distribution on Y leaves
/// [1/((1+eps)|X_i|), (1+eps)/|X_i|] for some value j in X_i = {0..sizes[i]-1}.
inline std::vector<std::size_t> biased_indices(const std::vector<std::vector<std::size_t>>& y,
                                               const std::vector<std::size_t>& sizes, const Rational& eps) {
  if (y.empty()) throw InputError("biased indices: Y is empty");
  if (eps < 0) throw InputError("biased indices: epsilon must be nonnegative");
  const std::size_t m = sizes.size();
  for (std::size_t s : sizes)
    if (s < 1) throw InputError("biased indices: every coordinate set needs at least one element");
  std::set<std::vector<std::size_t>> distinct;
  for (const auto& tuple : y) {
    if (tuple.size() != m) throw InputError("biased indices: tuple length differs from number of coordinates");
    for (std::size_t i = 0; i < m; ++i)
      if (tuple[i] >= sizes[i]) throw InputError("biased indices: tuple value outside its coordinate set");
    if (!distinct.insert(tuple).second) throw InputError("biased indices: Y contains a repeated tuple");
  }
  const Rational total(static_cast<long>(y.size()));
  const Rational one_plus = 1 + eps;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<long> counts(sizes[i], 0);
    for (const auto& tuple : y) ++counts[tuple[i]];
    const Rational xi(static_cast<long>(sizes[i]));
    const Rational lo = 1 / (one_plus * xi), hi = one_plus / xi;
    for (long c : counts) {
      const Rational p = Rational(c) / total;
      if (p < lo || p > hi) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

}  // namespace xclab
