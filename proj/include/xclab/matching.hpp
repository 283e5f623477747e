#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "lp.hpp"
#include "matrix.hpp"
#include "polytope.hpp"

namespace xclab {

/// Lexicographic indexing of the edges {i, j}, i < j, of the complete graph
/// K_n: (0,1), (0,2), ..., (0,n-1), (1,2), ...
class EdgeIndexing {
 public:
  explicit EdgeIndexing(std::size_t n) : n_(n) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) ends_.emplace_back(i, j);
  }

  std::size_t nodes() const { return n_; }
  std::size_t size() const { return ends_.size(); }

  std::size_t index(std::size_t i, std::size_t j) const {
    if (i == j || i >= n_ || j >= n_) throw InputError("edge index: invalid endpoints");
    if (i > j) std::swap(i, j);
    // edges before row i: sum_{a<i} (n-1-a)
    return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
  }

  std::pair<std::size_t, std::size_t> endpoints(std::size_t e) const { return ends_.at(e); }

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> ends_;
};

/// A matching as a sorted list of edge indices.
using Matching = std::vector<std::size_t>;

struct MatchingSet {
  std::size_t n = 0;
  std::vector<Matching> matchings;

  std::size_t size() const { return matchings.size(); }
};

inline std::string edge_list_label(const Matching& m) {
  std::string s = "M:";
  for (std::size_t k = 0; k < m.size(); ++k) s += (k ? "," : "") + std::to_string(m[k]);
  return s;
}

inline std::string node_set_label(const std::vector<std::size_t>& nodes) {
  std::string s;
  for (std::size_t k = 0; k < nodes.size(); ++k) s += (k ? "," : "") + std::to_string(nodes[k]);
  return s;
}

namespace detail {

inline void perfect_rec(const EdgeIndexing& ix, std::vector<bool>& used, Matching& cur, std::vector<Matching>& out) {
  const std::size_t n = ix.nodes();
  std::size_t v = 0;
  while (v < n && used[v]) ++v;
  if (v == n) {
    Matching m = cur;
    std::sort(m.begin(), m.end());
    out.push_back(std::move(m));
    return;
  }
  used[v] = true;
  for (std::size_t w = v + 1; w < n; ++w) {
    if (used[w]) continue;
    used[w] = true;
    cur.push_back(ix.index(v, w));
    perfect_rec(ix, used, cur, out);
    cur.pop_back();
    used[w] = false;
  }
  used[v] = false;
}

inline void matching_rec(const EdgeIndexing& ix, std::size_t v, std::vector<bool>& used, Matching& cur,
                         std::vector<Matching>& out) {
  const std::size_t n = ix.nodes();
  while (v < n && used[v]) ++v;
  if (v == n) {
    Matching m = cur;
    std::sort(m.begin(), m.end());
    out.push_back(std::move(m));
    return;
  }
  used[v] = true;
  matching_rec(ix, v + 1, used, cur, out);  // v stays exposed
  for (std::size_t w = v + 1; w < n; ++w) {
    if (used[w]) continue;
    used[w] = true;
    cur.push_back(ix.index(v, w));
    matching_rec(ix, v + 1, used, cur, out);
    cur.pop_back();
    used[w] = false;
  }
  used[v] = false;
}

}  // namespace detail

/// All (n-1)!! perfect matchings of K_n, sorted lexicographically by edge list.
inline MatchingSet enumerate_perfect_matchings(std::size_t n) {
  if (n < 2 || n % 2) throw InputError("perfect matchings need an even node count >= 2");
  EdgeIndexing ix(n);
  MatchingSet out{n, {}};
  std::vector<bool> used(n);
  Matching cur;
  detail::perfect_rec(ix, used, cur, out.matchings);
  std::sort(out.matchings.begin(), out.matchings.end());
  return out;
}

/// All matchings of K_n including the empty one, sorted lexicographically.
inline MatchingSet enumerate_matchings(std::size_t n) {
  if (n < 1) throw InputError("matchings need n >= 1");
  EdgeIndexing ix(n);
  MatchingSet out{n, {}};
  std::vector<bool> used(n);
  Matching cur;
  detail::matching_rec(ix, 0, used, cur, out.matchings);
  std::sort(out.matchings.begin(), out.matchings.end());
  return out;
}

inline Vector characteristic_vector(const Matching& m, std::size_t num_edges) {
  Vector x(num_edges);
  for (std::size_t e : m) x[e] = 1;
  return x;
}

/// Node subsets of {0..n-1} with the given size, as sorted lists, lexicographic.
inline std::vector<std::vector<std::size_t>> subsets_of_size(std::size_t n, std::size_t k,
                                                             std::size_t first = 0) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n - std::min(n, first)) return out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t v = start; v + (k - cur.size()) <= n; ++v) {
      cur.push_back(v);
      self(self, v + 1);
      cur.pop_back();
    }
  };
  rec(rec, first);
  return out;
}

inline std::vector<bool> membership(std::size_t n, const std::vector<std::size_t>& set) {
  std::vector<bool> in(n);
  for (std::size_t v : set) in[v] = true;
  return in;
}

namespace detail {

inline void append_nonneg(HRep& h, std::size_t num_edges) {
  for (std::size_t e = 0; e < num_edges; ++e) {
    Vector row(num_edges);
    row[e] = -1;
    h.A.append_row(row);
    h.b.push_back(0);
    h.row_labels.push_back("nonneg:" + std::to_string(e));
  }
}

// x(E(U)) <= (|U|-1)/2 for every odd U with lo <= |U| <= hi.
inline void append_inner_odd_sets(HRep& h, const EdgeIndexing& ix, std::size_t lo, std::size_t hi) {
  const std::size_t n = ix.nodes();
  for (std::size_t size = lo; size <= std::min(hi, n); size += 2) {
    for (const auto& u : subsets_of_size(n, size)) {
      Vector row(ix.size());
      for (std::size_t a = 0; a < u.size(); ++a)
        for (std::size_t c = a + 1; c < u.size(); ++c) row[ix.index(u[a], u[c])] = 1;
      h.A.append_row(row);
      h.b.push_back(make_rational(static_cast<long>(size - 1), 2));
      h.row_labels.push_back("oddset:" + node_set_label(u));
    }
  }
}

inline Polytope matching_like_polytope(std::size_t n, std::size_t max_odd) {
  EdgeIndexing ix(n);
  const std::size_t m = ix.size();
  HRep h;
  h.A = Matrix(0, m);
  h.E = Matrix(0, m);
  for (std::size_t v = 0; v < n; ++v) {
    Vector row(m);
    for (std::size_t w = 0; w < n; ++w)
      if (w != v) row[ix.index(v, w)] = 1;
    h.A.append_row(row);
    h.b.push_back(1);
    h.row_labels.push_back("degree:" + std::to_string(v));
  }
  append_inner_odd_sets(h, ix, 3, max_odd);
  append_nonneg(h, m);
  auto ms = enumerate_matchings(n);
  std::vector<Vector> verts;
  std::vector<std::string> labels;
  for (const auto& mt : ms.matchings) {
    verts.push_back(characteristic_vector(mt, m));
    labels.push_back(edge_list_label(mt));
  }
  return Polytope(m, std::move(h), std::move(verts), std::move(labels));
}

}  // namespace detail

/// P_PM(n): degree equalities, odd-set cut inequalities -x(delta(U)) <= -1
/// with one representative per complementary pair (the side avoiding node 0),
/// and nonnegativity. Pairs whose small side is a single node are labelled
/// `oddset1:v`; the rest `oddset:U`.
inline Polytope perfect_matching_polytope(std::size_t n) {
  if (n < 4 || n % 2) throw InputError("perfect matching polytope needs an even n >= 4");
  EdgeIndexing ix(n);
  const std::size_t m = ix.size();
  HRep h;
  h.A = Matrix(0, m);
  h.E = Matrix(0, m);
  for (std::size_t v = 0; v < n; ++v) {
    Vector row(m);
    for (std::size_t w = 0; w < n; ++w)
      if (w != v) row[ix.index(v, w)] = 1;
    h.E.append_row(row);
    h.f.push_back(1);
    h.eq_labels.push_back("degree:" + std::to_string(v));
  }
  auto cut_row = [&](const std::vector<std::size_t>& u) {
    const auto in = membership(n, u);
    Vector row(m);
    for (std::size_t e = 0; e < m; ++e) {
      auto [a, c] = ix.endpoints(e);
      if (in[a] != in[c]) row[e] = -1;
    }
    return row;
  };
  // Odd subsets of {1..n-1}: singletons, then the full set {1..n-1}
  // (complement of {0}), then the remaining sizes in increasing order.
  for (std::size_t v = 1; v < n; ++v) {
    h.A.append_row(cut_row({v}));
    h.b.push_back(-1);
    h.row_labels.push_back("oddset1:" + std::to_string(v));
  }
  {
    std::vector<std::size_t> rest;
    for (std::size_t v = 1; v < n; ++v) rest.push_back(v);
    h.A.append_row(cut_row(rest));
    h.b.push_back(-1);
    h.row_labels.push_back("oddset1:0");
  }
  for (std::size_t size = 3; size + 1 < n; size += 2) {
    for (const auto& u : subsets_of_size(n, size, 1)) {
      h.A.append_row(cut_row(u));
      h.b.push_back(-1);
      h.row_labels.push_back("oddset:" + node_set_label(u));
    }
  }
  detail::append_nonneg(h, m);
  auto pms = enumerate_perfect_matchings(n);
  std::vector<Vector> verts;
  std::vector<std::string> labels;
  for (const auto& mt : pms.matchings) {
    verts.push_back(characteristic_vector(mt, m));
    labels.push_back(edge_list_label(mt));
  }
  return Polytope(m, std::move(h), std::move(verts), std::move(labels));
}

/// P_M(n): degree <= 1, x(E(U)) <= (|U|-1)/2 for odd |U| >= 3, nonnegativity.
inline Polytope matching_polytope(std::size_t n) {
  if (n < 2) throw InputError("matching polytope needs n >= 2");
  return detail::matching_like_polytope(n, n);
}

/// P_M(n)'s description with odd sets restricted to 3 <= |U| <= s. The vertex
/// list holds the integral matchings only.
inline Polytope truncated_matching_relaxation(std::size_t n, std::size_t s) {
  if (n < 2) throw InputError("truncated relaxation needs n >= 2");
  if (s % 2 == 0) throw InputError("odd-set cap must be odd");
  if (s < 1 || s > n) throw InputError("odd-set cap must lie in [1, n]");
  return detail::matching_like_polytope(n, s);
}

struct FaceEmbedding {
  std::size_t n = 0;                  // nodes of the small graph; the host has 2n
  std::vector<Matching> small;        // matchings of K_n, enumeration order
  std::vector<Matching> completions;  // perfect matchings of K_2n, same order
  std::set<std::size_t> tight_rows;   // rows of perfect_matching_polytope(2n)
};

/// Restriction of a host matching on K_{2n} to the edges inside U = {0..n-1},
/// re-indexed as a matching of K_n.
inline Matching restrict_to_inner(const Matching& host, std::size_t n) {
  EdgeIndexing big(2 * n), small(n);
  Matching out;
  for (std::size_t e : host) {
    auto [a, c] = big.endpoints(e);
    if (a < n && c < n) out.push_back(small.index(a, c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Places K_n on U = {0..n-1} inside K_{2n}. Node u in U has designated
/// partner n+u. A matching M of K_n completes by pairing each exposed u with
/// n+u and then pairing the leftover outside nodes consecutively in index
/// order. The face fixes x_e = 0 on every U-to-outside edge except {u, n+u}.
inline FaceEmbedding embed_matchings_as_face(std::size_t n) {
  if (n < 2) throw InputError("face embedding needs n >= 2");
  EdgeIndexing big(2 * n), small(n);
  FaceEmbedding out;
  out.n = n;
  out.small = enumerate_matchings(n).matchings;
  for (const auto& m : out.small) {
    std::vector<bool> covered(n);
    Matching host;
    for (std::size_t e : m) {
      auto [a, c] = small.endpoints(e);
      covered[a] = covered[c] = true;
      host.push_back(big.index(a, c));
    }
    std::vector<std::size_t> leftover;
    for (std::size_t u = 0; u < n; ++u) {
      if (covered[u])
        leftover.push_back(n + u);
      else
        host.push_back(big.index(u, n + u));
    }
    for (std::size_t k = 0; k + 1 < leftover.size(); k += 2) host.push_back(big.index(leftover[k], leftover[k + 1]));
    std::sort(host.begin(), host.end());
    out.completions.push_back(std::move(host));
  }
  const Polytope pm = perfect_matching_polytope(2 * n);
  std::map<std::string, std::size_t> by_label;
  for (std::size_t i = 0; i < pm.num_ineqs(); ++i) by_label[pm.row_labels()[i]] = i;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t w = n; w < 2 * n; ++w)
      if (w != n + u) out.tight_rows.insert(by_label.at("nonneg:" + std::to_string(big.index(u, w))));
  return out;
}

struct RatioReport {
  Rational ratio = 1;
  Vector worst_objective;
  Rational k_max, p_max;
  std::size_t objectives_evaluated = 0;
};

/// max over sampled c >= 0 of max_K(c) / max_P(c). `extra_objectives` are
/// evaluated before the `trials` seeded nonzero objectives in [0, 1000]^E. max_P is
/// taken over P's vertex list, max_K by exact LP over K's description.
/// Objectives with max_P(c) = 0 are skipped.
inline RatioReport approximation_ratio(const HRep& k, const Polytope& p, std::size_t trials, std::uint64_t seed,
                                       const std::vector<Vector>& extra_objectives = {}) {
  if (k.ambient_dim() != p.dim()) throw InputError("approximation ratio: dimension mismatch");
  for (std::size_t j = 0; j < p.num_vertices(); ++j)
    if (!k.contains(p.vertices()[j]))
      throw InputError("approximation ratio: relaxation does not contain vertex " + p.vertex_labels()[j]);
  RatioReport out;
  auto consider = [&](const Vector& c) {
    Rational pmax = dot(c, p.vertices().front());
    for (const auto& v : p.vertices()) pmax = std::max(pmax, dot(c, v));
    if (pmax <= 0) return;
    auto rk = k.maximize(c);
    if (!rk.optimal()) throw InputError("approximation ratio: relaxation LP is not bounded");
    ++out.objectives_evaluated;
    Rational r = rk.value / pmax;
    if (out.worst_objective.empty() || r > out.ratio) {
      out.ratio = r;
      out.worst_objective = c;
      out.k_max = rk.value;
      out.p_max = pmax;
    }
  };
  for (const auto& c : extra_objectives) {
    if (c.size() != p.dim()) throw InputError("approximation ratio: objective length mismatch");
    consider(c);
  }
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    Vector c;
    do c = random_objective(rng, p.dim(), 0, 1000);
    while (std::all_of(c.begin(), c.end(), [](const Rational& x) { return x == 0; }));
    consider(c);
  }
  return out;
}

}  // namespace xclab
