#include "kstab/integration.hpp"
#include "kstab/polytope.hpp"
#include "kstab/root_system.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace kstab;

namespace {

Vec v1(Rat a) { return {a}; }
Vec v2(Rat a, Rat b) { return {a, b}; }

RationalPolytope hexagon(int s) {
  return hull_and_facets(weyl_orbit(build_root_system("A2"), v2(s, s)));
}

RationalPolytope segment(Rat a, Rat b) { return hull_and_facets({v1(a), v1(b)}); }

}  // namespace

TEST(Hull, UnitSquare) {
  auto p = hull_and_facets({v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1)});
  EXPECT_EQ(p.dim, 2);
  EXPECT_EQ(p.vertices.size(), 4u);
  ASSERT_EQ(p.facets.size(), 4u);
  std::set<std::pair<IntVec, Rat>> got;
  for (const Facet& f : p.facets) got.insert({f.normal, f.offset});
  std::set<std::pair<IntVec, Rat>> want{
      {{1, 0}, 0}, {{-1, 0}, -1}, {{0, 1}, 0}, {{0, -1}, -1}};
  EXPECT_EQ(got, want);
}

TEST(Hull, RedundantPointDropped) {
  auto p = hull_and_facets({v1(0), v1(1), v1(Rat(1, 2))});
  EXPECT_EQ(p.vertices, (std::vector<Vec>{v1(0), v1(1)}));
  EXPECT_EQ(p.facets.size(), 2u);
}

TEST(Hull, HexagonAndIdempotence) {
  auto p = hexagon(1);
  EXPECT_EQ(p.vertices.size(), 6u);
  EXPECT_EQ(p.facets.size(), 6u);
  auto q = hull_and_facets(p.vertices);
  EXPECT_EQ(q.vertices, p.vertices);
}

TEST(Hull, RandomIdempotenceAndFacetInvariants) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    int ambient = 2 + trial % 2;
    std::vector<Vec> pts;
    for (int i = 0; i < 9; ++i) {
      Vec v;
      for (int c = 0; c < ambient; ++c) v.emplace_back(static_cast<int>(rng() % 13) - 6, 1 + rng() % 3);
      pts.push_back(v);
    }
    auto p = hull_and_facets(pts);
    if (!p.full_dimensional()) continue;
    EXPECT_EQ(hull_and_facets(p.vertices).vertices, p.vertices);
    for (const Facet& f : p.facets) {
      Int g = 0;
      for (const Int& c : f.normal) g = gcd(g, c);
      EXPECT_EQ(g, 1);
    }
    for (const Vec& x : pts) EXPECT_TRUE(p.contains(x));
    for (const Vec& v : p.vertices) {
      int tight = 0;
      for (const Facet& f : p.facets) tight += f.slack(v) == 0;
      EXPECT_GE(tight, ambient);
    }
  }
}

TEST(Hull, DegenerateInputRecordsAffineHull) {
  auto p = hull_and_facets({v2(0, 0), v2(1, 1), v2(2, 2)});
  EXPECT_EQ(p.dim, 1);
  EXPECT_EQ(p.vertices.size(), 2u);
  EXPECT_EQ(p.directions.size(), 1u);
}

TEST(WInvariance, Examples) {
  auto a1 = build_root_system("A1");
  EXPECT_TRUE(is_w_invariant(a1, segment(-1, 1)).invariant);
  auto bad = is_w_invariant(a1, segment(-1, 2));
  EXPECT_FALSE(bad.invariant);
  ASSERT_TRUE(bad.witness_vertex);
  Vec image = a1.weyl_generators[bad.witness_generator] * *bad.witness_vertex;
  EXPECT_EQ(segment(-1, 2).find_vertex(image), -1);
  EXPECT_TRUE(is_w_invariant(build_root_system("A2"), hexagon(1)).invariant);
}

TEST(ChamberIntersect, A1) {
  auto a1 = build_root_system("A1");
  auto q = chamber_intersect(a1, segment(-3, 3));
  EXPECT_EQ(q.vertices, (std::vector<Vec>{v1(0), v1(3)}));
  for (const Facet& f : q.facets) {
    if (f.offset == 0) EXPECT_EQ(f.tag, FacetTag::wall);
    else EXPECT_EQ(f.tag, FacetTag::outer);
  }
}

TEST(ChamberIntersect, A2Hexagon) {
  auto a2 = build_root_system("A2");
  auto q = chamber_intersect(a2, hexagon(1));
  std::set<Vec> got(q.vertices.begin(), q.vertices.end());
  std::set<Vec> want{v2(0, 0), v2(Rat(3, 2), 0), v2(1, 1), v2(0, Rat(3, 2))};
  EXPECT_EQ(got, want);
  int walls = 0;
  for (const Facet& f : q.facets) {
    if (f.tag == FacetTag::wall) {
      ++walls;
      EXPECT_EQ(f.offset, 0);
    }
  }
  EXPECT_EQ(walls, 2);
}

TEST(ChamberIntersect, ToricIsIdentity) {
  auto rs = build_root_system("toric:2");
  auto p = hull_and_facets({v2(0, 0), v2(2, 0), v2(0, 1), v2(1, 1)});
  auto q = chamber_intersect(rs, p);
  EXPECT_EQ(q.vertices, p.vertices);
  for (const Facet& f : q.facets) EXPECT_EQ(f.tag, FacetTag::outer);
}

TEST(ChamberIntersect, SubsetOfPAndChamber) {
  auto a2 = build_root_system("A2");
  for (int s = 1; s <= 4; ++s) {
    auto p = hexagon(s);
    auto q = chamber_intersect(a2, p);
    for (const Vec& v : q.vertices) {
      EXPECT_TRUE(p.contains(v));
      EXPECT_TRUE(in_closed_chamber(a2, v));
    }
    // Six chambers tile the hexagon.
    MPoly one = MPoly::constant(2, 1);
    EXPECT_EQ(Rat(6) * integrate_poly(q, one), integrate_poly(p, one));
  }
  auto a1 = build_root_system("A1");
  MPoly one1 = MPoly::constant(1, 1);
  EXPECT_EQ(Rat(2) * integrate_poly(chamber_intersect(a1, segment(-5, 5)), one1), 10);
}

TEST(Delzant, Examples) {
  EXPECT_TRUE(is_delzant(hull_and_facets({v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1)})).delzant);
  auto tri = is_delzant(hull_and_facets({v2(0, 0), v2(1, 0), v2(0, 2)}));
  EXPECT_FALSE(tri.delzant);
  EXPECT_NE(std::find(tri.failing_vertices.begin(), tri.failing_vertices.end(), v2(1, 0)), tri.failing_vertices.end());
  EXPECT_TRUE(is_delzant(hull_and_facets({v2(0, 0), v2(1, 0), v2(0, 1)})).delzant);
  EXPECT_THROW(is_delzant(hull_and_facets({v2(0, 0), v2(Rat(1, 2), 0), v2(0, 1)})), ValidationError);
}

TEST(Delzant, ThreeDimensional) {
  std::vector<Vec> cube;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) cube.push_back({Rat(a), Rat(b), Rat(c)});
  EXPECT_TRUE(is_delzant(hull_and_facets(cube)).delzant);
  // Square pyramid: four edges meet at the apex.
  auto pyr = hull_and_facets({{0, 0, 0}, {2, 0, 0}, {0, 2, 0}, {2, 2, 0}, {1, 1, 1}});
  EXPECT_FALSE(is_delzant(pyr).delzant);
}

TEST(WallVertex, Examples) {
  auto a1 = build_root_system("A1");
  EXPECT_TRUE(wall_vertex_check(a1, segment(-1, 1)).ok);
  auto a2 = build_root_system("A2");
  auto tri = hull_and_facets(weyl_orbit(a2, v2(1, 0)));
  auto r = wall_vertex_check(a2, tri);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(std::find(r.witnesses.begin(), r.witnesses.end(), v2(1, 0)), r.witnesses.end());
  EXPECT_TRUE(wall_vertex_check(a2, hexagon(1)).ok);
}

TEST(Complex, Examples) {
  auto v = validate_complex({segment(-1, Rat(-1, 2)), segment(Rat(-1, 2), Rat(1, 2)), segment(Rat(1, 2), 1)});
  EXPECT_TRUE(v.valid);
  EXPECT_FALSE(v.unique_maximal);
  auto u = validate_complex({segment(0, 1)});
  EXPECT_TRUE(u.valid);
  EXPECT_TRUE(u.unique_maximal);
  auto bad = validate_complex({segment(0, 1), segment(Rat(1, 2), 2)});
  EXPECT_FALSE(bad.valid);
}

TEST(Complex, TwoDimensionalSharedEdge) {
  auto left = hull_and_facets({v2(0, 0), v2(1, 0), v2(1, 1), v2(0, 1)});
  auto right = hull_and_facets({v2(1, 0), v2(2, 0), v2(2, 1), v2(1, 1)});
  EXPECT_TRUE(validate_complex({left, right}).valid);
  // A hanging vertex: the shared segment is not a face of the taller cell.
  auto tall = hull_and_facets({v2(1, 0), v2(2, 0), v2(2, 2), v2(1, 2)});
  auto half = hull_and_facets({v2(0, 0), v2(1, 0), v2(1, 1), v2(0, 1)});
  EXPECT_FALSE(validate_complex({half, tall}).valid);
}

TEST(HJ, Chains) {
  EXPECT_EQ(hj_chain({1, 0}, {1, 2}), (std::vector<IntVec>{{1, 1}}));
  auto c3 = hj_chain({1, 0}, {1, 3});
  ASSERT_FALSE(c3.empty());
  IntVec prev{1, 0};
  auto det = [](const IntVec& u, const IntVec& w) { return u[0] * w[1] - u[1] * w[0]; };
  for (const IntVec& d : c3) {
    EXPECT_EQ(det(prev, d), 1);
    prev = d;
  }
  EXPECT_EQ(det(prev, IntVec{1, 3}), 1);
  EXPECT_TRUE(hj_chain({1, 0}, {0, 1}).empty());
}

TEST(HJ, CornerDeterminantTwo) {
  // Corner at the origin spanned by edge directions (1,0) and (1,2).
  auto p = hull_and_facets({v2(0, 0), v2(4, 0), v2(2, 4)});
  auto r = hj_smooth_corner_2d(p, v2(0, 0), Rat(1, 4));
  EXPECT_EQ(r.inserted_directions.size(), 1u);
  EXPECT_GE(r.scale, 1);
  EXPECT_EQ(r.polytope.vertices.size(), 4u);
  EXPECT_TRUE(r.polytope.is_lattice());
  // The corners created near the origin are unimodular.
  auto bad = non_delzant_vertices(r.polytope);
  Rat near = Rat(r.scale);
  for (int i : bad) {
    const Vec& v = r.polytope.vertices[i];
    EXPECT_FALSE(v[0] <= near && v[1] <= near) << to_string(v);
  }
}

TEST(HJ, CornerDeterminantThree) {
  auto p = hull_and_facets({v2(0, 0), v2(6, 0), v2(2, 6)});
  auto r = hj_smooth_corner_2d(p, v2(0, 0), Rat(1, 8));
  EXPECT_GE(r.inserted_directions.size(), 1u);
  EXPECT_EQ(r.polytope.vertices.size(), 3u + r.inserted_directions.size());
  auto bad = non_delzant_vertices(r.polytope);
  Rat near = Rat(r.scale);
  for (int i : bad) {
    const Vec& v = r.polytope.vertices[i];
    EXPECT_FALSE(v[0] <= near && v[1] <= near) << to_string(v);
  }
}

TEST(HJ, DelzantCornerUnchangedAndErrors) {
  auto sq = hull_and_facets({v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1)});
  auto r = hj_smooth_corner_2d(sq, v2(0, 0), Rat(1, 4));
  EXPECT_EQ(r.scale, 1);
  EXPECT_EQ(r.polytope.vertices, sq.vertices);
  auto p = hull_and_facets({v2(0, 0), v2(4, 0), v2(2, 4)});
  EXPECT_THROW(hj_smooth_corner_2d(p, v2(0, 0), Rat(5)), ValidationError);
}

TEST(HJ, SmoothedPolygonsAreDelzant) {
  std::mt19937 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 10; ++trial) {
    std::vector<Vec> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(v2(static_cast<int>(rng() % 9), static_cast<int>(rng() % 9)));
    auto p = hull_and_facets(pts);
    if (!p.full_dimensional()) continue;
    auto bad = non_delzant_vertices(p);
    try {
      auto r = hj_smooth_vertices(p, bad, Rat(1, 64));
      EXPECT_TRUE(is_delzant(r.polytope).delzant);
      ++checked;
    } catch (const ValidationError&) {
    }
  }
  EXPECT_GE(checked, 5);
}
