#include <gtest/gtest.h>

#include <filesystem>

#include "xclab/io.hpp"
#include "xclab/matching.hpp"
#include "xclab/shapes.hpp"

using namespace xclab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("xclab_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void expect_same_polytope(const Polytope& a, const Polytope& b) {
  EXPECT_EQ(a.dim(), b.dim());
  EXPECT_EQ(a.A(), b.A());
  EXPECT_EQ(a.b(), b.b());
  EXPECT_EQ(a.E(), b.E());
  EXPECT_EQ(a.f(), b.f());
  EXPECT_EQ(a.vertices(), b.vertices());
  EXPECT_EQ(a.row_labels(), b.row_labels());
}

}  // namespace

TEST(Files, Fnv1aIsDeterministic) {
  EXPECT_EQ(io::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(io::fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(io::fnv1a_hex("abc"), io::fnv1a_hex(std::string("abc")));
  EXPECT_NE(io::fnv1a_hex("abc"), io::fnv1a_hex("abd"));
}

TEST(Files, AtomicWriteLeavesNoTemporary) {
  auto dir = scratch_dir("atomic");
  io::write_file_atomic(dir / "out.txt", "hello\n");
  EXPECT_EQ(io::read_file(dir / "out.txt"), "hello\n");
  EXPECT_FALSE(fs::exists(dir / "out.txt.tmp"));
  io::write_file_atomic(dir / "out.txt", "again");
  EXPECT_EQ(io::read_file(dir / "out.txt"), "again");
  EXPECT_THROW(io::write_file_atomic(dir / "missing" / "x.txt", "x"), InputError);
  EXPECT_THROW(io::read_file(dir / "nope"), InputError);
}

TEST(PolytopeJson, RoundTrip) {
  for (const auto& p : {shapes::cube(3), shapes::standard_simplex(3), perfect_matching_polytope(6)}) {
    auto j = io::polytope_to_json(p);
    auto back = io::polytope_from_json(io::parse_json(j.dump(), "test"));
    expect_same_polytope(p, back);
    EXPECT_EQ(back.vertex_labels(), p.vertex_labels());
  }
}

TEST(PolytopeJson, ConstraintFileAndDefaults) {
  auto dir = scratch_dir("polyfile");
  io::write_file_atomic(dir / "ab.txt", "3 3\n-1 0 0\n0 -1 0\n1 1 1\n");
  io::write_file_atomic(dir / "tri.json",
                        R"({"dim": 2, "ineqs": {"file": "ab.txt"}, "vertices": [[0,0],["1",0],[0,"1/1"]]})");
  auto p = io::load_polytope(dir / "tri.json");
  EXPECT_EQ(p.A(), (Matrix{{-1, 0}, {0, -1}, {1, 1}}));
  EXPECT_EQ(p.b(), (Vector{0, 0, 1}));
  EXPECT_EQ(p.row_labels(), (std::vector<std::string>{"row:0", "row:1", "row:2"}));
  EXPECT_EQ(p.E().rows(), 0u);
  EXPECT_EQ(slack_matrix(p).S, slack_matrix(shapes::corner_simplex(2)).S);
}

TEST(PolytopeJson, Malformed) {
  EXPECT_THROW(io::parse_json("{", "x"), InputError);
  EXPECT_THROW(io::polytope_from_json(io::parse_json(R"({"dim": 2})", "x")), InputError);
  EXPECT_THROW(io::polytope_from_json(io::parse_json(
                   R"({"dim": 2, "ineqs": {"A": [[1]], "b": [1]}, "vertices": [[0,0]]})", "x")),
               InputError);
  EXPECT_THROW(io::rational_from_json(io::json(1.5)), InputError);
  EXPECT_THROW(io::rational_from_json(io::json("1/0")), InputError);
}

TEST(SlackText, RoundTripWithLabels) {
  auto s = slack_matrix(perfect_matching_polytope(4));
  auto back = io::slack_from_text(io::slack_to_text(s));
  EXPECT_EQ(back.S, s.S);
  EXPECT_EQ(back.row_labels, s.row_labels);
  EXPECT_EQ(back.col_labels, s.col_labels);
}

TEST(SlackText, PlainMatrixGetsIndexLabels) {
  auto s = io::slack_from_text("2 2\n1 0\n0 1/2\n");
  EXPECT_EQ(s.S, (Matrix{{1, 0}, {0, make_rational(1, 2)}}));
  EXPECT_EQ(s.row_labels, (std::vector<std::string>{"0", "1"}));
  EXPECT_EQ(s.col_labels, (std::vector<std::string>{"0", "1"}));
  EXPECT_THROW(io::slack_from_text("1 1\n1\nrows: a b\n"), InputError);
}

TEST(SlackText, LoadFromPolytopeJson) {
  auto dir = scratch_dir("slack");
  auto p = shapes::standard_simplex(3);
  io::write_file_atomic(dir / "p.json", io::polytope_to_json(p).dump());
  EXPECT_EQ(io::load_slack(dir / "p.json").S, Matrix::identity(4));
  io::write_file_atomic(dir / "s.txt", io::slack_to_text(slack_matrix(p)));
  EXPECT_EQ(io::load_slack(dir / "s.txt").S, Matrix::identity(4));
}

TEST(WeightText, RoundTripWithForbidden) {
  WeightMatrix w(Matrix{{1, make_rational(-3, 4)}, {0, 5}});
  w.forbid(1, 0);
  const auto text = io::weight_to_text(w);
  EXPECT_NE(text.find("-inf"), std::string::npos);
  auto back = io::weight_from_text(text);
  EXPECT_TRUE(back.forbidden(1, 0));
  EXPECT_EQ(back.forbidden_count(), 1u);
  EXPECT_EQ(back.value(0, 1), make_rational(-3, 4));
  EXPECT_EQ(back.value(1, 1), 5);
  EXPECT_THROW(io::weight_from_text("2 2\n1 2 3"), InputError);
  EXPECT_THROW(io::weight_from_text("1 1\n1 2"), InputError);
  EXPECT_THROW(io::weight_from_text("x"), InputError);
}

TEST(FactorizationJson, RoundTrip) {
  auto s = slack_matrix(shapes::hexagon());
  auto fac = slack_variable_factorization(s);
  auto back = io::factorization_from_json(io::parse_json(io::factorization_to_json(fac).dump(), "f"));
  EXPECT_EQ(back.U, fac.U);
  EXPECT_EQ(back.V, fac.V);
  EXPECT_TRUE(verify_factorization(s, back));
  EXPECT_THROW(io::factorization_from_json(io::parse_json(R"({"r": 2, "U": [[1,0]], "V": [[1]]})", "f")),
               InputError);
}

TEST(LiftedSystemJson, RoundTripStillProjects) {
  auto p = perfect_matching_polytope(4);
  auto s = slack_matrix(p);
  auto ext = extension_from_factorization(p, slack_variable_factorization(s));
  auto q = ext.to_lifted_system();
  auto j = io::lifted_system_to_json(q, ext.lifts);
  EXPECT_EQ(j.at("variables").size(), q.x_dim + q.y_dim);
  EXPECT_EQ(j.at("lifts").size(), p.num_vertices());
  auto back = io::lifted_system_from_json(io::parse_json(j.dump(), "q"));
  EXPECT_EQ(back.B, q.B);
  EXPECT_EQ(back.C, q.C);
  EXPECT_EQ(back.d, q.d);
  EXPECT_EQ(back.Be, q.Be);
  EXPECT_EQ(back.Ce, q.Ce);
  EXPECT_EQ(back.de, q.de);
  EXPECT_EQ(back.row_labels, q.row_labels);
  auto verdict = lp_equal_under_projection(p, back, 20, 3);
  EXPECT_TRUE(verdict.pass) << verdict.detail;
  auto out = factorization_from_extension(p, back);
  EXPECT_TRUE(verify_factorization(s, out.factorization));
}

TEST(MatchingJson, SortedEdgeLists) {
  auto ms = enumerate_perfect_matchings(6);
  auto back = io::matchings_from_json(io::parse_json(io::matchings_to_json(ms).dump(), "m"));
  EXPECT_EQ(back.n, 6u);
  EXPECT_EQ(back.matchings, ms.matchings);
  EXPECT_THROW(io::matchings_from_json(io::parse_json(R"({"n": 4, "matchings": [[5, 0]]})", "m")), InputError);
}

TEST(BoundReportJson, Fields) {
  auto rep = nonnegative_rank_bounds(Matrix::identity(3));
  auto j = io::bound_report_to_json(rep);
  EXPECT_EQ(j.at("lower"), 3);
  EXPECT_EQ(j.at("upper"), 3);
  EXPECT_TRUE(j.at("upper_witness_file").is_null());
  EXPECT_FALSE(j.at("certificates").empty());
  EXPECT_EQ(io::bound_report_to_json(rep, "w.json").at("upper_witness_file"), "w.json");
}
