#include "kstab/examples.hpp"
#include "kstab/problem.hpp"

#include <gtest/gtest.h>

using namespace kstab;

namespace {

Vec v1(Rat a) { return {a}; }
Vec v2(Rat a, Rat b) { return {a, b}; }

const char* kA1Crease = R"(# symmetric crease
[root_system]
A1
[polytope]
-1
1
[pl_function]
0 : 0
-1/2 : 1
-1/2 : -1
[options]
roof 1
[metadata]
note hand written
)";

const char* kHexagon = R"([root_system]
A2
[polytope]
1 1
-1 2
2 -1
-2 1
1 -2
-1 -1
[crease]
corner 1 1
epsilon 1/4
slope 2
symmetrize true
)";

std::string parse_message(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ProblemFile, ParsesSections) {
  auto p = parse_problem(kA1Crease);
  EXPECT_EQ(p.root_system, "A1");
  EXPECT_EQ(p.polytope, (std::vector<Vec>{v1(-1), v1(1)}));
  ASSERT_EQ(p.pieces.size(), 3u);
  EXPECT_EQ(p.pieces[1].constant, Rat(-1, 2));
  EXPECT_EQ(p.option("roof"), std::optional<std::string>("1"));
  EXPECT_EQ(p.metadata.at("note"), "hand written");
  auto h = parse_problem(kHexagon);
  ASSERT_TRUE(h.crease);
  EXPECT_EQ(h.crease->corners, (std::vector<Vec>{v2(1, 1)}));
  EXPECT_EQ(h.crease->epsilon, Rat(1, 4));
  EXPECT_EQ(h.crease->slope, 2);
}

TEST(ProblemFile, RoundTrip) {
  for (const char* text : {kA1Crease, kHexagon}) {
    auto p = parse_problem(text);
    EXPECT_EQ(parse_problem(serialize_problem(p)), p);
  }
}

TEST(ProblemFile, GeneratedRoundTrip) {
  auto a2 = build_root_system("A2");
  FamilyOptions smooth;
  smooth.smooth = true;
  std::vector<ProblemFile> generated{gen_wonderful(a2, v2(2, 1)), gen_pgln_simplex(3, 2), gen_donaldson(10).problem,
                                     gen_donaldson(20, smooth).problem, gen_pgl3_family(10, 10).problem};
  for (const auto& p : generated) EXPECT_EQ(parse_problem(serialize_problem(p)), p);
}

TEST(ProblemFile, ErrorsCarryLineAndColumn) {
  EXPECT_EQ(parse_message("[root_system]\nA1\n[polytope]\n1\n1/0x\n"), "line 5, column 1: malformed rational '1/0x'");
  EXPECT_EQ(parse_message("[root_system]\nA1\n[shape]\n"), "line 3, column 2: unknown section 'shape'");
  EXPECT_EQ(parse_message("A1\n"), "line 1, column 1: data before any section header");
  EXPECT_EQ(parse_message("[polytope]\n0 0\n1\n"), "line 3, column 1: vertex has 1 coordinates, expected 2");
  EXPECT_EQ(parse_message("[root_system]\nA1\n[polytope]\n0\n1\n[pl_function]\n0 : 0\n1 : 1 2\n"),
            "line 8, column 5: gradient length differs from earlier pieces");
  EXPECT_EQ(parse_message("[root_system]\nA1\n[polytope]\n0\n1\n[crease]\n  depth 3\n"),
            "line 7, column 3: unknown crease key 'depth'");
  EXPECT_NE(parse_message("[polytope]\n0\n1\n").find("missing [root_system]"), std::string::npos);
  EXPECT_NE(parse_message("[root_system]\nA1\n[polytope]\n0\n1\n[crease]\nepsilon 1/4\n").find("at least one corner"),
            std::string::npos);
  EXPECT_THROW(read_problem("/nonexistent/problem.txt"), ParseError);
}

TEST(Instance, BuildsChamberAndRoof) {
  auto in = build_instance(parse_problem(kA1Crease));
  EXPECT_EQ(in.chamber.vertices.size(), 2u);
  EXPECT_EQ(in.roof, 1);
  EXPECT_EQ(stability_bracket(in.rs, in.chamber, in.f), Rat(23, 192));
}

TEST(Instance, CreaseCompiledAndSymmetrized) {
  auto in = build_instance(parse_problem(kHexagon));
  EXPECT_TRUE(is_w_invariant_pl(in.rs, in.f, in.polytope));
  EXPECT_EQ(eval_pl(in.f, v2(1, 1)), Rat(1, 2));
  EXPECT_EQ(in.roof, Rat(1, 2));
}

TEST(Instance, ScaleKeepsMinusF1) {
  auto p = parse_problem(kHexagon);
  auto base = build_instance(p);
  Rat m = futaki_minus_F1(base.rs, base.chamber, base.f);
  auto big = build_instance(p, std::nullopt, Rat(3));
  EXPECT_EQ(futaki_minus_F1(big.rs, big.chamber, big.f), m);
  EXPECT_EQ(big.roof, 3 * base.roof);
  EXPECT_THROW(build_instance(p, std::nullopt, Rat(0)), ValidationError);
}

TEST(Instance, RankMismatch) {
  EXPECT_THROW(build_instance(parse_problem(kA1Crease), std::string("A2")), ValidationError);
  EXPECT_THROW(build_instance(parse_problem(kA1Crease), std::string("B2")), ValidationError);
}

TEST(Generators, Wonderful) {
  auto a1 = build_root_system("A1");
  auto a2 = build_root_system("A2");
  EXPECT_EQ(gen_wonderful(a1, v1(1)).polytope, (std::vector<Vec>{v1(-1), v1(1)}));
  auto hex = gen_wonderful(a2, v2(1, 1));
  EXPECT_EQ(hex.polytope.size(), 6u);
  EXPECT_EQ(chamber_intersect(a2, hull_and_facets(hex.polytope)).vertices.size(), 4u);
  EXPECT_EQ(gen_wonderful(a2, v2(2, 1)).polytope.size(), 6u);
  EXPECT_THROW(gen_wonderful(a2, v2(1, 0)), ValidationError);
  EXPECT_THROW(gen_wonderful(build_root_system("toric:2"), v2(1, 1)), ValidationError);
}

TEST(Generators, PglnSimplex) {
  EXPECT_EQ(gen_pgln_simplex(2).polytope, (std::vector<Vec>{v1(-1), v1(1)}));
  EXPECT_EQ(gen_pgln_simplex(2, 3).polytope, (std::vector<Vec>{v1(-3), v1(3)}));
  auto tri = gen_pgln_simplex(3);
  EXPECT_EQ(tri.polytope.size(), 3u);
  auto a2 = build_root_system("A2");
  EXPECT_TRUE(is_w_invariant(a2, hull_and_facets(tri.polytope)).invariant);
  EXPECT_NE(std::find(tri.polytope.begin(), tri.polytope.end(), v2(1, 0)), tri.polytope.end());
  EXPECT_THROW(gen_pgln_simplex(4), ValidationError);
}

TEST(Generators, Donaldson) {
  EXPECT_EQ(donaldson_r(10), Rat(2, 25));
  EXPECT_THROW(donaldson_r(2), ValidationError);
  for (int n : {10, 1000}) EXPECT_LT(donaldson_r(n), Rat(1, 12));
  auto g = gen_donaldson(10);
  EXPECT_EQ(g.polytope.vertices.size(), 9u);
  EXPECT_EQ(g.crease_corners.size(), 3u);
  EXPECT_TRUE(g.polytope.is_lattice());
  auto dz = is_delzant(g.polytope);
  EXPECT_FALSE(dz.delzant);
  FamilyOptions opt;
  opt.smooth = true;
  auto s = gen_donaldson(10, opt);
  EXPECT_TRUE(is_delzant(s.polytope).delzant);
  EXPECT_EQ(s.problem.metadata.at("smooth"), "true");
}

TEST(Generators, Pgl3Family) {
  auto a2 = build_root_system("A2");
  auto g = gen_pgl3_family(10, 10);
  EXPECT_EQ(g.polytope.vertices.size(), 18u);
  EXPECT_TRUE(is_w_invariant(a2, g.polytope).invariant);
  EXPECT_TRUE(wall_vertex_check(a2, g.polytope).ok);
  auto f = PLFunction(g.problem.pieces);
  EXPECT_TRUE(is_w_invariant_pl(a2, f, g.polytope));
  for (const Vec& c : g.crease_corners) EXPECT_EQ(c[0], c[1]);  // on the diagonal x = y
  FamilyOptions opt;
  opt.smooth = true;
  auto s = gen_pgl3_family(10, 10, opt);
  EXPECT_TRUE(is_delzant(s.polytope).delzant);
  EXPECT_TRUE(is_w_invariant(a2, s.polytope).invariant);
  EXPECT_TRUE(wall_vertex_check(a2, s.polytope).ok);
  EXPECT_THROW(gen_pgl3_family(Rat(1, 8), 10), ValidationError);
}

TEST(Scan, WonderfulFindsNothing) {
  auto res = scan_destabilizer("wonderful", default_grid("wonderful"), {});
  EXPECT_FALSE(res.best);
  EXPECT_FALSE(res.best_report);
  for (const auto& r : res.rows)
    if (r.bracket) EXPECT_GE(*r.bracket, 0);
}

TEST(Scan, DonaldsonCertificate) {
  ScanGrid grid;
  grid.s = {0};
  grid.n = {50, 100};
  grid.epsilon = {Rat(1, 32), Rat(1, 16)};
  grid.slope = {1, 4};
  auto res = scan_destabilizer("donaldson", grid, {});
  ASSERT_EQ(res.rows.size(), 8u);
  ASSERT_TRUE(res.best);
  EXPECT_LT(*res.rows[*res.best].bracket, 0);
  ASSERT_TRUE(res.best_report);
  EXPECT_EQ(res.best_report->verdict, Verdict::destabilizing);
  EXPECT_EQ(res.csv(), scan_destabilizer("donaldson", grid, {}).csv());
  EXPECT_EQ(res.csv().substr(0, res.csv().find('\n')),
            "family,s,n,epsilon,slope,scale,status,w_invariant,wall_vertex_ok,delzant,bracket,bracket_sign,minus_F1,"
            "minus_F1_approx_non_authoritative");
}

TEST(Scan, UnknownFamilyRowsAreMarked) {
  ScanGrid grid{{0}, {10}, {Rat(1, 16)}, {1}};
  auto res = scan_destabilizer("octagon", grid, {});
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_EQ(res.rows[0].status.rfind("invalid", 0), 0u);
  EXPECT_FALSE(res.best);
}
