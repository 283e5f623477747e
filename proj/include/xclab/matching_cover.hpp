#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matching.hpp"
#include "polytope.hpp"

namespace xclab {

struct MatchingCover {
  Polytope polytope;                                           // P_PM(n)
  SlackMatrix slack;                                           // odd-set rows x perfect matchings
  std::vector<std::pair<std::size_t, std::size_t>> edge_pairs;  // (e1, e2) edge indices, e1 < e2
  std::vector<Rectangle> rectangles;                           // one per edge pair
};

/// For every unordered pair of disjoint edges e1, e2: the odd sets U with
/// e1, e2 in delta(U) times the perfect matchings containing both.
inline MatchingCover canonical_matching_cover(std::size_t n) {
  if (n < 6 || n % 2) throw InputError("canonical cover: n must be even and >= 6");
  MatchingCover c{perfect_matching_polytope(n), {}, {}, {}};
  c.slack = slack_matrix(c.polytope, row_filters::odd_sets);
  const EdgeIndexing ix(n);
  const Matrix& a = c.polytope.A();
  const auto& verts = c.polytope.vertices();

  for (std::size_t e1 = 0; e1 < ix.size(); ++e1)
    for (std::size_t e2 = e1 + 1; e2 < ix.size(); ++e2) {
      auto [a1, b1] = ix.endpoints(e1);
      auto [a2, b2] = ix.endpoints(e2);
      if (a1 == a2 || a1 == b2 || b1 == a2 || b1 == b2) continue;
      Rectangle r;
      for (std::size_t i = 0; i < c.slack.rows(); ++i) {
        const std::size_t row = c.slack.source_rows[i];
        if (a(row, e1) != 0 && a(row, e2) != 0) r.rows.push_back(i);
      }
      for (std::size_t j = 0; j < verts.size(); ++j)
        if (verts[j][e1] == 1 && verts[j][e2] == 1) r.cols.push_back(j);
      c.edge_pairs.emplace_back(e1, e2);
      c.rectangles.push_back(std::move(r));
    }
  return c;
}

/// How many of `rects` contain each cell of a rows x cols grid.
inline std::vector<std::vector<std::size_t>> coverage_counts(const std::vector<Rectangle>& rects, std::size_t rows,
                                                             std::size_t cols) {
  std::vector<std::vector<std::size_t>> cnt(rows, std::vector<std::size_t>(cols, 0));
  for (const auto& r : rects)
    for (std::size_t i : r.rows)
      for (std::size_t j : r.cols) ++cnt[i][j];
  return cnt;
}

}  // namespace xclab
