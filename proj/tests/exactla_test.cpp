#include <gtest/gtest.h>

#include <random>

#include "xclab/lp.hpp"
#include "xclab/matrix.hpp"
#include "xclab/rational.hpp"

using namespace xclab;

namespace {

// Plain Gauss-Jordan over rationals; independent of the Bareiss path.
std::size_t gauss_rank(Matrix m) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      const Rational f = m(i, c) / m(r, c);
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    ++r;
  }
  return r;
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, long lo, long hi, bool fractions) {
  std::uniform_int_distribution<long> num(lo, hi), den(1, 5);
  Matrix m(rows, cols);
  for (auto& x : m.entries()) x = fractions ? make_rational(num(rng), den(rng)) : Rational(num(rng));
  return m;
}

// Brute-force 2-variable LP: best objective over pairwise intersections of
// constraint lines that satisfy every constraint.
std::optional<Rational> brute_max_2d(const Matrix& a, const Vector& b, const Vector& c) {
  std::optional<Rational> best;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = i + 1; k < a.rows(); ++k) {
      const Rational det = a(i, 0) * a(k, 1) - a(i, 1) * a(k, 0);
      if (det == 0) continue;
      Vector x{(b[i] * a(k, 1) - a(i, 1) * b[k]) / det, (a(i, 0) * b[k] - b[i] * a(k, 0)) / det};
      bool ok = true;
      for (std::size_t r = 0; r < a.rows() && ok; ++r) ok = dot(a.row(r), x) <= b[r];
      if (!ok) continue;
      const Rational v = dot(c, x);
      if (!best || v > *best) best = v;
    }
  return best;
}

}  // namespace

TEST(Rational, CanonicalFormAfterArithmetic) {
  Rational a = make_rational(6, -4);
  EXPECT_EQ(a.get_num(), -3);
  EXPECT_EQ(a.get_den(), 2);
  Rational s = a + make_rational(1, 2);
  EXPECT_EQ(s, -1);
  EXPECT_EQ(s.get_den(), 1);
  EXPECT_EQ(make_rational(2, 3) * make_rational(3, 4), make_rational(1, 2));
  EXPECT_EQ(make_rational(1, 3) / make_rational(-2, 9), make_rational(-3, 2));
}

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(parse_rational("4/6"), make_rational(2, 3));
  EXPECT_EQ(parse_rational("-7"), -7);
  EXPECT_EQ(parse_rational("+3/9"), make_rational(1, 3));
  EXPECT_EQ(to_string(make_rational(-10, 4)), "-5/2");
  EXPECT_EQ(to_string(Rational(5)), "5");
  for (const char* bad : {"", "1/0", "a", "1/-2", "1.5", "/3", "3/"}) EXPECT_THROW(parse_rational(bad), InputError) << bad;
}

TEST(Rational, CeilFloor) {
  EXPECT_EQ(ceil(make_rational(7, 2)), 4);
  EXPECT_EQ(floor(make_rational(7, 2)), 3);
  EXPECT_EQ(ceil(make_rational(-7, 2)), -3);
  EXPECT_EQ(floor(make_rational(-7, 2)), -4);
  EXPECT_EQ(ceil(Rational(5)), 5);
}

TEST(Matrix, RankExamples) {
  EXPECT_EQ(rank(Matrix::identity(3)), 3u);
  EXPECT_EQ(rank(Matrix(4, 4)), 0u);
  EXPECT_EQ(rank(Matrix{{1, 2}, {2, 4}}), 1u);
  EXPECT_EQ(rank(Matrix(0, 5)), 0u);
  EXPECT_EQ(rank(Matrix(3, 0)), 0u);
}

TEST(Matrix, RankMatchesGaussJordan) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    Matrix m = random_matrix(rng, r, c, -3, 3, t % 2);
    // Force some dependence.
    if (r > 2 && t % 3 == 0)
      for (std::size_t j = 0; j < c; ++j) m(r - 1, j) = m(0, j) * 2 - m(1, j);
    EXPECT_EQ(rank(m), gauss_rank(m));
    EXPECT_LE(rank(m), std::min(r, c));
  }
}

TEST(Matrix, RankInvariantUnderPermutationAndScaling) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    Matrix m = random_matrix(rng, 5, 4, -2, 2, true);
    std::vector<std::size_t> perm{4, 2, 0, 3, 1};
    Matrix p = m.select_rows(perm);
    for (std::size_t j = 0; j < p.cols(); ++j) p(2, j) *= make_rational(-7, 3);
    EXPECT_EQ(rank(m), rank(p));
  }
}

TEST(Matrix, MaxNormAndFrobenius) {
  Matrix a{{1, -5}, {make_rational(9, 2), 0}};
  EXPECT_EQ(a.max_abs(), 5);
  Matrix b{{2, 1}, {2, 3}};
  EXPECT_EQ(frobenius(a, b), Rational(2 - 5 + 9));
  EXPECT_THROW(frobenius(a, Matrix(2, 3)), InputError);
}

TEST(Matrix, TextRoundTrip) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    Matrix m = random_matrix(rng, rng() % 5, 1 + rng() % 5, -100, 100, true);
    EXPECT_EQ(matrix_from_text(matrix_to_text(m)), m);
  }
  Matrix empty(3, 0);
  EXPECT_EQ(matrix_from_text(matrix_to_text(empty)), empty);
  EXPECT_EQ(matrix_to_text(Matrix{{make_rational(1, 2), -3}}), "1 2\n1/2 -3\n");
}

TEST(Matrix, TextRejectsMalformed) {
  EXPECT_THROW(matrix_from_text(""), InputError);
  EXPECT_THROW(matrix_from_text("2 2\n1 2\n3\n"), InputError);
  EXPECT_THROW(matrix_from_text("1 2\n1 2 3\n"), InputError);
  EXPECT_THROW(matrix_from_text("1 1\nx\n"), InputError);
  EXPECT_THROW(matrix_from_text("-1 2\n"), InputError);
}

TEST(Lp, Examples) {
  Matrix a1{{1}};
  Vector b1{1}, c{1};
  auto r = lp_solve(a1, b1, Matrix(0, 1), {}, c, Sense::maximize);
  ASSERT_TRUE(r.optimal());
  EXPECT_EQ(r.value, 1);
  EXPECT_EQ(r.point, Vector{1});

  Matrix a2{{1}, {-1}};
  Vector b2{-1, 0};
  EXPECT_EQ(lp_solve(a2, b2, Matrix(0, 1), {}, c, Sense::maximize).status, LpStatus::infeasible);

  Matrix a3{{-1}};
  Vector b3{0};
  EXPECT_EQ(lp_solve(a3, b3, Matrix(0, 1), {}, c, Sense::maximize).status, LpStatus::unbounded);
}

TEST(Lp, DimensionMismatchIsInputError) {
  Matrix a{{1, 2}};
  Vector b{1}, c{1};
  EXPECT_THROW(lp_solve(a, b, Matrix(0, 1), {}, c, Sense::maximize), InputError);
  Vector b2{1, 2}, c2{1, 1};
  EXPECT_THROW(lp_solve(a, b2, Matrix(0, 2), {}, c2, Sense::maximize), InputError);
}

TEST(Lp, DegenerateInputs) {
  // No constraints, zero objective.
  Vector c0(3);
  auto r = lp_solve(Matrix(0, 3), {}, Matrix(0, 3), {}, c0, Sense::minimize);
  ASSERT_TRUE(r.optimal());
  EXPECT_EQ(r.value, 0);
  // Redundant equalities.
  Matrix e{{1, 1}, {2, 2}, {1, -1}};
  Vector f{2, 4, 0}, c{1, 0};
  auto r2 = lp_solve(Matrix(0, 2), {}, e, f, c, Sense::maximize);
  ASSERT_TRUE(r2.optimal());
  EXPECT_EQ(r2.point, (Vector{1, 1}));
  // Inconsistent equalities.
  Vector f2{2, 5, 0};
  EXPECT_EQ(lp_solve(Matrix(0, 2), {}, e, f2, c, Sense::maximize).status, LpStatus::infeasible);
}

TEST(Lp, HighlyDegenerateVertexTerminates) {
  // Pyramid apex at the origin with many tight constraints.
  Matrix a{{1, 1, -1}, {-1, 1, -1}, {1, -1, -1}, {-1, -1, -1}, {0, 0, 1}, {1, 0, -1}, {0, 1, -1}};
  Vector b{0, 0, 0, 0, 1, 0, 0}, c{0, 0, -1};
  auto r = lp_solve(a, b, Matrix(0, 3), {}, c, Sense::maximize);
  ASSERT_TRUE(r.optimal());
  EXPECT_EQ(r.value, 0);
}

TEST(Lp, RandomTwoDimensionalAgainstBruteForce) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<long> d(-9, 9);
  int optimal = 0;
  for (int t = 0; t < 300; ++t) {
    Matrix a{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    Vector b{10, 10, 10, 10};
    const int extra = 1 + static_cast<int>(rng() % 5);
    for (int k = 0; k < extra; ++k) {
      a.append_row(Vector{Rational(d(rng)), Rational(d(rng))});
      b.push_back(d(rng));
    }
    Vector c{Rational(d(rng)), Rational(d(rng))};
    auto expect = brute_max_2d(a, b, c);
    auto r = lp_solve(a, b, Matrix(0, 2), {}, c, Sense::maximize);
    if (!expect) {
      EXPECT_EQ(r.status, LpStatus::infeasible);
      continue;
    }
    ASSERT_TRUE(r.optimal());
    ++optimal;
    EXPECT_EQ(r.value, *expect);
    EXPECT_EQ(r.value, dot(c, r.point));
    for (std::size_t i = 0; i < a.rows(); ++i) EXPECT_LE(dot(a.row(i), r.point), b[i]);
    // Determinism.
    auto again = lp_solve(a, b, Matrix(0, 2), {}, c, Sense::maximize);
    EXPECT_EQ(again.point, r.point);
  }
  EXPECT_GT(optimal, 50);
}

TEST(Lp, MinimizeWithEqualities) {
  Matrix a{{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}};
  Vector b{0, 0, 0};
  Matrix e{{1, 1, 1}};
  Vector f{1}, c{3, 1, 2};
  auto r = lp_solve(a, b, e, f, c, Sense::minimize);
  ASSERT_TRUE(r.optimal());
  EXPECT_EQ(r.value, 1);
  EXPECT_EQ(r.point, (Vector{0, 1, 0}));
}

TEST(Conic, Examples) {
  Vector t1{3, 5};
  auto u = conic_combination(Matrix::identity(2), t1);
  ASSERT_TRUE(u);
  EXPECT_EQ(*u, (Vector{3, 5}));

  Vector t2{-1, 0};
  EXPECT_FALSE(conic_combination(Matrix{{1, 0}}, t2));

  Vector t3{2, 0};
  auto u3 = conic_combination(Matrix{{1, 1}, {1, -1}}, t3);
  ASSERT_TRUE(u3);
  EXPECT_EQ(*u3, (Vector{1, 1}));
}

TEST(Conic, RandomCombinationsAreRecovered) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 60; ++t) {
    Matrix rows = random_matrix(rng, 4, 3, -4, 4, false);
    Vector w(4);
    for (auto& x : w) x = static_cast<long>(rng() % 4);
    Vector target(3);
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t i = 0; i < 4; ++i) target[j] += w[i] * rows(i, j);
    auto u = conic_combination(rows, target);
    ASSERT_TRUE(u);
    for (std::size_t j = 0; j < 3; ++j) {
      Rational s = 0;
      for (std::size_t i = 0; i < 4; ++i) s += (*u)[i] * rows(i, j);
      EXPECT_EQ(s, target[j]);
    }
    for (const auto& x : *u) EXPECT_GE(x, 0);
  }
}

TEST(Conic, FreeRowsTakeAnySign) {
  Matrix rows{{1, 0}};
  Matrix free_rows{{0, 1}};
  Vector target{2, -3};
  auto u = conic_combination(rows, target, free_rows);
  ASSERT_TRUE(u);
  EXPECT_EQ(*u, (Vector{2, -3}));
}
