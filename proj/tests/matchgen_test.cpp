#include <gtest/gtest.h>

#include <set>

#include "xclab/matching.hpp"
#include "xclab/polytope.hpp"

using namespace xclab;

namespace {

// Every edge subset of size <= n/2 whose edges are pairwise disjoint.
std::set<Matching> brute_matchings(std::size_t n, bool perfect_only) {
  EdgeIndexing ix(n);
  std::set<Matching> out;
  Matching cur;
  std::vector<int> deg(n, 0);
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (!perfect_only || cur.size() * 2 == n) out.insert(cur);
    if (cur.size() * 2 >= n) return;
    for (std::size_t e = start; e < ix.size(); ++e) {
      auto [a, b] = ix.endpoints(e);
      if (deg[a] || deg[b]) continue;
      deg[a] = deg[b] = 1;
      cur.push_back(e);
      self(self, e + 1);
      cur.pop_back();
      deg[a] = deg[b] = 0;
    }
  };
  rec(rec, 0);
  return out;
}

std::size_t double_factorial_odd(std::size_t n) {
  std::size_t r = 1;
  for (std::size_t k = n; k > 1; k -= 2) r *= k;
  return r;
}

}  // namespace

TEST(EdgeIndexing, LexicographicBijection) {
  for (std::size_t n = 2; n <= 9; ++n) {
    EdgeIndexing ix(n);
    EXPECT_EQ(ix.size(), n * (n - 1) / 2);
    std::size_t e = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++e) {
        EXPECT_EQ(ix.index(i, j), e);
        EXPECT_EQ(ix.index(j, i), e);
        EXPECT_EQ(ix.endpoints(e), std::make_pair(i, j));
      }
  }
  EXPECT_THROW(EdgeIndexing(4).index(1, 1), InputError);
  EXPECT_THROW(EdgeIndexing(4).index(1, 4), InputError);
}

TEST(Enumerate, PerfectMatchingCounts) {
  EXPECT_EQ(enumerate_perfect_matchings(2).size(), 1u);
  EXPECT_EQ(enumerate_perfect_matchings(4).size(), 3u);
  EXPECT_EQ(enumerate_perfect_matchings(6).size(), 15u);
  for (std::size_t n = 2; n <= 8; n += 2) {
    auto ms = enumerate_perfect_matchings(n);
    EXPECT_EQ(ms.size(), double_factorial_odd(n - 1));
    std::set<Matching> got(ms.matchings.begin(), ms.matchings.end());
    EXPECT_EQ(got.size(), ms.size());
    EXPECT_EQ(got, brute_matchings(n, true));
    EXPECT_TRUE(std::is_sorted(ms.matchings.begin(), ms.matchings.end()));
  }
  EXPECT_THROW(enumerate_perfect_matchings(5), InputError);
  EXPECT_THROW(enumerate_perfect_matchings(0), InputError);
}

TEST(Enumerate, MatchingCounts) {
  EXPECT_EQ(enumerate_matchings(2).size(), 2u);
  EXPECT_EQ(enumerate_matchings(3).size(), 4u);
  EXPECT_EQ(enumerate_matchings(4).size(), 10u);
  for (std::size_t n = 1; n <= 8; ++n) {
    auto ms = enumerate_matchings(n);
    std::set<Matching> got(ms.matchings.begin(), ms.matchings.end());
    EXPECT_EQ(got.size(), ms.size());
    EXPECT_EQ(got, brute_matchings(n, false)) << n;
  }
  EXPECT_TRUE(enumerate_matchings(3).matchings.front().empty());
}

TEST(Enumerate, Deterministic) {
  EXPECT_EQ(enumerate_perfect_matchings(8).matchings, enumerate_perfect_matchings(8).matchings);
  EXPECT_EQ(enumerate_matchings(6).matchings, enumerate_matchings(6).matchings);
}

TEST(PerfectMatchingPolytope, Shapes) {
  auto p4 = perfect_matching_polytope(4);
  EXPECT_EQ(p4.dim(), 6u);
  EXPECT_EQ(p4.num_vertices(), 3u);
  auto p6 = perfect_matching_polytope(6);
  EXPECT_EQ(p6.num_vertices(), 15u);
  std::size_t odd3 = 0;
  for (const auto& l : p6.row_labels()) odd3 += l.rfind("oddset:", 0) == 0;
  EXPECT_EQ(odd3, 10u);
  EXPECT_EQ(p6.E().rows(), 6u);
  EXPECT_TRUE(verify_vertices(p6).ok);
  EXPECT_THROW(perfect_matching_polytope(5), InputError);
  EXPECT_THROW(perfect_matching_polytope(2), InputError);
}

TEST(PerfectMatchingPolytope, RowsAreCutsWithUnitRhs) {
  auto p = perfect_matching_polytope(6);
  EdgeIndexing ix(6);
  for (std::size_t i = 0; i < p.num_ineqs(); ++i) {
    const auto& l = p.row_labels()[i];
    if (l.rfind("oddset:", 0) != 0) continue;
    std::vector<bool> in(6);
    for (char ch : l.substr(7))
      if (ch != ',') in[ch - '0'] = true;
    EXPECT_FALSE(in[0]);
    EXPECT_EQ(p.b()[i], -1);
    for (std::size_t e = 0; e < ix.size(); ++e) {
      auto [a, b] = ix.endpoints(e);
      EXPECT_EQ(p.A()(i, e), in[a] != in[b] ? -1 : 0);
    }
  }
}

TEST(MatchingPolytope, Shapes) {
  auto p2 = matching_polytope(2);
  EXPECT_EQ(p2.dim(), 1u);
  EXPECT_EQ(p2.num_vertices(), 2u);
  auto p3 = matching_polytope(3);
  EXPECT_EQ(p3.num_vertices(), 4u);
  bool found = false;
  for (std::size_t i = 0; i < p3.num_ineqs(); ++i)
    if (p3.row_labels()[i] == "oddset:0,1,2") {
      found = true;
      EXPECT_EQ(p3.A().row_vector(i), (Vector{1, 1, 1}));
      EXPECT_EQ(p3.b()[i], 1);
    }
  EXPECT_TRUE(found);
  EXPECT_EQ(matching_polytope(4).num_vertices(), 10u);
  EXPECT_TRUE(verify_vertices(matching_polytope(4)).ok);
  EXPECT_TRUE(verify_vertices(matching_polytope(5)).ok);
}

TEST(Truncated, FullCapMatchesMatchingPolytope) {
  for (std::size_t n = 2; n <= 6; ++n) {
    const std::size_t s = n % 2 ? n : n - 1;
    auto t = truncated_matching_relaxation(n, s);
    auto p = matching_polytope(n);
    EXPECT_EQ(t.row_labels(), p.row_labels());
    EXPECT_EQ(t.A(), p.A());
  }
  EXPECT_THROW(truncated_matching_relaxation(5, 2), InputError);
  EXPECT_THROW(truncated_matching_relaxation(3, 5), InputError);
}

TEST(Truncated, TriangleGap) {
  auto k = truncated_matching_relaxation(3, 1);
  const Vector half(3, make_rational(1, 2));
  EXPECT_TRUE(k.hrep().contains(half));
  const Vector unit(3, Rational(1));
  auto r = k.hrep().maximize(unit);
  ASSERT_TRUE(r.optimal());
  EXPECT_EQ(r.value, make_rational(3, 2));
  auto full = matching_polytope(3).hrep().maximize(unit);
  EXPECT_EQ(full.value, 1);
}

TEST(Ratio, SelfIsOne) {
  auto p = matching_polytope(4);
  auto r = approximation_ratio(p.hrep(), p, 20, 5);
  EXPECT_EQ(r.ratio, 1);
  EXPECT_EQ(r.objectives_evaluated, 20u);
}

TEST(Ratio, TriangleWithUnitObjective) {
  auto k = truncated_matching_relaxation(3, 1);
  auto p = matching_polytope(3);
  auto r = approximation_ratio(k.hrep(), p, 10, 1, {Vector(3, Rational(1))});
  EXPECT_EQ(r.ratio, make_rational(3, 2));
  EXPECT_EQ(r.worst_objective, Vector(3, Rational(1)));
}

TEST(Ratio, FullOddSetsAreExact) {
  for (std::size_t n = 3; n <= 6; ++n) {
    const std::size_t s = n % 2 ? n : n - 1;
    auto r = approximation_ratio(truncated_matching_relaxation(n, s).hrep(), matching_polytope(n), 25, n);
    EXPECT_EQ(r.ratio, 1) << n;
  }
}

TEST(Ratio, AlwaysAtLeastOne) {
  auto r = approximation_ratio(truncated_matching_relaxation(5, 1).hrep(), matching_polytope(5), 40, 2);
  EXPECT_GE(r.ratio, 1);
}

TEST(Ratio, RelaxationMustContainPolytope) {
  auto p = matching_polytope(3);
  HRep k = p.hrep();
  k.A.append_row(Vector{1, 0, 0});
  k.b.push_back(0);
  k.row_labels.push_back("cut");
  EXPECT_THROW(approximation_ratio(k, p, 5, 1), InputError);
}

TEST(FaceEmbedding, CanonicalCompletions) {
  auto emb = embed_matchings_as_face(2);
  ASSERT_EQ(emb.small.size(), 2u);
  EdgeIndexing big(4);
  // Empty matching of K_2 avoids the inner edge {0,1}.
  EXPECT_TRUE(emb.small[0].empty());
  const auto& c0 = emb.completions[0];
  EXPECT_EQ(std::count(c0.begin(), c0.end(), big.index(0, 1)), 0);
  EXPECT_EQ(c0.size(), 2u);
}

TEST(FaceEmbedding, PerfectMatchingsMapToThemselvesPlusOutside) {
  auto emb = embed_matchings_as_face(4);
  EdgeIndexing small(4), big(8);
  for (std::size_t k = 0; k < emb.small.size(); ++k) {
    if (emb.small[k].size() != 2) continue;
    EXPECT_EQ(restrict_to_inner(emb.completions[k], 4), emb.small[k]);
    for (std::size_t e : emb.completions[k]) {
      auto [a, b] = big.endpoints(e);
      EXPECT_EQ(a < 4, b < 4);  // no crossing edges
    }
  }
}

TEST(FaceEmbedding, SurjectiveAndOnFace) {
  for (std::size_t n = 2; n <= 4; ++n) {
    auto emb = embed_matchings_as_face(n);
    std::set<Matching> small(emb.small.begin(), emb.small.end());
    std::set<Matching> images;
    for (const auto& m : enumerate_perfect_matchings(2 * n).matchings) images.insert(restrict_to_inner(m, n));
    EXPECT_EQ(images, small);

    auto host = perfect_matching_polytope(2 * n);
    auto f = face(host, emb.tight_rows);
    std::set<Vector> face_verts(f.vertices().begin(), f.vertices().end());
    EdgeIndexing big(2 * n);
    std::set<Matching> seen;
    for (std::size_t k = 0; k < emb.small.size(); ++k) {
      EXPECT_EQ(restrict_to_inner(emb.completions[k], n), emb.small[k]);
      EXPECT_TRUE(face_verts.count(characteristic_vector(emb.completions[k], big.size())));
      seen.insert(emb.completions[k]);
    }
    EXPECT_EQ(seen.size(), emb.small.size());
  }
}
