// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero on any failure.
#include "kstab/kstab.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace kstab;

namespace {

Vec v1(Rat a) { return {a}; }
Vec v2(Rat a, Rat b) { return {a, b}; }

RationalPolytope interval(Rat a, Rat b) { return hull_and_facets({v1(a), v1(b)}); }
RationalPolytope unit_square() { return hull_and_facets({v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1)}); }
RationalPolytope hexagon(const RootSystemData& a2, const Vec& p) { return hull_and_facets(weyl_orbit(a2, p)); }

PLFunction sym_a1_crease() { return PLFunction({{0, v1(0)}, {Rat(-1, 2), v1(1)}, {Rat(-1, 2), v1(-1)}}); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects failed conditions with a short note.
struct Check {
  Outcome out;
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    out.pass = false;
    out.detail += (out.detail.empty() ? "" : "; ") + what;
  }
};

RationalPolytope random_lattice_polytope(std::mt19937& rng, int dim, int points) {
  std::uniform_int_distribution<int> c(0, 4);
  while (true) {
    std::vector<Vec> pts;
    for (int i = 0; i < points; ++i) {
      Vec v;
      for (int j = 0; j < dim; ++j) v.push_back(Rat(c(rng)));
      pts.push_back(v);
    }
    auto p = hull_and_facets(pts);
    if (p.full_dimensional() && p.vertices.size() <= 12) return p;
  }
}

Outcome constant_kernel() {
  Check ck;
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> cnum(-9, 9), cden(1, 5), coord(0, 3);
  std::vector<std::pair<RootSystemData, RationalPolytope>> corpus;
  for (int r = 1; r <= 3; ++r) {
    auto rs = build_root_system("toric:" + std::to_string(r));
    for (int i = 0; i < 4; ++i) corpus.emplace_back(rs, random_lattice_polytope(rng, r, r + 3));
  }
  auto a1 = build_root_system("A1");
  for (int m = 1; m <= 4; ++m) corpus.emplace_back(a1, interval(-m, m));
  auto a2 = build_root_system("A2");
  while (corpus.size() < 24) {
    Vec p = v2(coord(rng), coord(rng)), q = v2(coord(rng), coord(rng));
    if (p == v2(0, 0) || q == v2(0, 0)) continue;
    auto pts = weyl_orbit(a2, p);
    auto more = weyl_orbit(a2, q);
    pts.insert(pts.end(), more.begin(), more.end());
    auto poly = hull_and_facets(pts);
    if (!poly.full_dimensional() || poly.vertices.size() > 12) continue;
    corpus.emplace_back(a2, poly);
  }
  int n = 0;
  for (const auto& [rs, p] : corpus) {
    ck.expect(is_w_invariant(rs, p).invariant, rs.label + " corpus polytope not W-invariant");
    auto chamber = chamber_intersect(rs, p);
    Rat c(Int(cnum(rng)), Int(cden(rng)));
    Rat b = stability_bracket(rs, chamber, PLFunction::constant(rs.rank, c));
    ck.expect(b == 0, rs.label + " instance " + std::to_string(n) + " bracket " + to_string(b));
    ++n;
  }
  ck.out.detail = std::to_string(n) + " instances" + (ck.out.detail.empty() ? "" : ": " + ck.out.detail);
  return ck.out;
}

Outcome oracle_vs_closed_form() {
  Check ck;
  auto a1 = build_root_system("A1");
  auto c1 = chamber_intersect(a1, interval(-1, 1));
  Roof r1{sym_a1_crease(), Rat(1)};
  auto o1 = oracle_futaki(a1, c1, r1.f, r1.R, default_progression(a1, c1, r1));
  Rat m1 = futaki_minus_F1(a1, c1, r1.f);
  ck.expect(m1 == Rat(23, 128), "A1 closed form " + to_string(m1));
  ck.expect(-o1.F1 == m1, "A1 oracle " + to_string(-o1.F1));

  auto t1 = build_root_system("toric:1");
  auto p2 = interval(0, 2);
  Roof r2{PLFunction({{0, v1(0)}, {-1, v1(1)}}), Rat(1)};
  auto o2 = oracle_futaki(t1, p2, r2.f, r2.R, default_progression(t1, p2, r2));
  Rat m2 = futaki_minus_F1(t1, p2, r2.f);
  ck.expect(m2 == Rat(1, 8), "toric closed form " + to_string(m2));
  ck.expect(-o2.F1 == m2, "toric oracle " + to_string(-o2.F1));
  if (ck.out.pass) ck.out.detail = "-F1 = 23/128 and 1/8 from both paths";
  return ck.out;
}

Outcome hexagon_oracle() {
  Check ck;
  auto a2 = build_root_system("A2");
  auto chamber = chamber_intersect(a2, hexagon(a2, v2(1, 1)));
  auto f = symmetrize(a2, corner_crease(chamber, v2(1, 1), Rat(1, 4)));
  Rat R = pl_max_on(chamber, f);
  auto prog = parse_progression("4:4:13");
  auto o = oracle_futaki(a2, chamber, f, R, prog);
  Rat bracket = stability_bracket(a2, chamber, f);
  Rat closed = futaki_minus_F1(a2, chamber, f);
  ck.expect(o.series.d_verified && o.series.w_verified, "fit did not verify");
  ck.expect(lattice_point_count(chamber, prog.at(prog.count - 1)) <= default_point_budget, "over budget");
  ck.expect(sign(-o.F1) == sign(bracket), "sign mismatch");
  ck.expect(-o.F1 == closed, "oracle " + to_string(-o.F1) + " vs closed form " + to_string(closed));
  if (ck.out.pass) ck.out.detail = "-F1 = " + to_string(closed) + " on k = 4..52";
  return ck.out;
}

Outcome lattice_sum_lemma() {
  Check ck;
  auto x = MPoly::variable(1, 0);
  auto a = lemma_check(interval(0, 1), x * x);
  ck.expect(a.passed() && a.top_fitted == Rat(1, 3) && a.second_fitted == Rat(1, 2), "[0,1] x^2");
  auto b = lemma_check(unit_square(), MPoly::constant(2, 1));
  ck.expect(b.passed() && b.top_fitted == 1 && b.second_fitted == 2, "unit square");
  auto a2 = build_root_system("A2");
  auto c = lemma_check(hexagon(a2, v2(1, 1)), a2.H_top);
  ck.expect(c.passed(), "hexagon H_top");
  return ck.out;
}

Outcome hilbert_cross_check() {
  Check ck;
  auto a1 = build_root_system("A1");
  auto a2 = build_root_system("A2");
  std::vector<std::pair<RootSystemData, RationalPolytope>> cases{
      {a1, interval(-1, 1)}, {a1, interval(-3, 3)}, {a2, hexagon(a2, v2(1, 1))}, {a2, hexagon(a2, v2(2, 1))}};
  for (const auto& [rs, p] : cases) {
    auto chamber = chamber_intersect(rs, p);
    auto s = fit_series(rs, chamber, std::nullopt, default_progression(rs, chamber, std::nullopt));
    auto c = chamber_data(rs, chamber);
    ck.expect(s.d_verified, rs.label + " fit not verified");
    ck.expect(s.fitted_d.coeff(rs.n) == c.volume_top, rs.label + " leading coefficient");
    ck.expect(s.fitted_d.coeff(rs.n - 1) == c.boundary_top / 2 + c.volume_sub, rs.label + " second coefficient");
  }
  return ck.out;
}

Outcome toric_reduction() {
  Check ck;
  auto t2 = build_root_system("toric:2");
  ck.expect(average_a(t2, unit_square()) == 4, "unit square a");
  std::mt19937 rng(77);
  std::uniform_int_distribution<int> g(-2, 2), c(-6, 0);
  MPoly one = MPoly::constant(2, 1);
  for (int i = 0; i < 5; ++i) {
    auto p = random_lattice_polytope(rng, 2, 6);
    PLFunction f({{0, v2(0, 0)}, {Rat(c(rng)), v2(g(rng), g(rng))}, {Rat(c(rng)), v2(g(rng), g(rng))}});
    Rat vol = integrate_poly(p, one);
    Rat a = boundary_integral(p, one, BoundarySelector::all) / vol;
    Rat tb = toric_bracket(p, f);
    ck.expect(average_a(t2, p) == a, "polygon " + std::to_string(i) + " a");
    ck.expect(stability_bracket(t2, p, f) == tb, "polygon " + std::to_string(i) + " bracket");
    ck.expect(futaki_minus_F1(t2, p, f) == tb / (2 * vol), "polygon " + std::to_string(i) + " -F1");
  }
  return ck.out;
}

std::string row_summary(const ScanRow& r) {
  std::ostringstream o;
  if (r.s != 0) o << "s=" << to_string(r.s) << " ";
  o << "n=" << r.n << " eps=" << to_string(r.epsilon) << " slope=" << to_string(r.slope)
    << " -F1~" << to_double(*r.minus_F1) << " (sign exact)";
  return o.str();
}

Outcome donaldson_certificate() {
  auto res = scan_destabilizer("donaldson", default_grid("donaldson"), {});
  std::size_t negative = 0;
  for (const auto& r : res.rows) negative += r.bracket && *r.bracket < 0;
  if (!res.best) return {false, "no negative bracket on the default grid\n" + res.csv()};
  return {true, std::to_string(negative) + "/" + std::to_string(res.rows.size()) + " rows negative, best " +
                    row_summary(res.rows[*res.best])};
}

Outcome pgl3_certificate() {
  FamilyOptions opt;
  opt.smooth = true;
  auto res = scan_destabilizer("pgl3", default_grid("pgl3"), opt);
  std::size_t good = 0;
  std::optional<std::size_t> first;
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& r = res.rows[i];
    bool ok = r.bracket && *r.bracket < 0 && r.w_invariant && r.wall_vertex_ok && r.delzant.value_or(false);
    if (ok && !first) first = i;
    good += ok;
  }
  if (!first) return {false, "no certified row on the default grid\n" + res.csv()};
  const ScanRow& best = res.rows[res.best.value_or(*first)];
  return {true, std::to_string(good) + "/" + std::to_string(res.rows.size()) +
                    " rows negative on W-invariant, wall-free, Delzant polygons, best " + row_summary(best)};
}

Outcome structural() {
  Check ck;
  ck.expect(is_delzant(unit_square()).delzant, "unit square Delzant");
  auto tri = is_delzant(hull_and_facets({v2(0, 0), v2(1, 0), v2(0, 2)}));
  ck.expect(!tri.delzant && tri.failing_vertices == std::vector<Vec>{v2(1, 0)}, "triangle fails exactly at (1,0)");
  ck.expect(is_delzant(hull_and_facets({v2(0, 0), v2(1, 0), v2(0, 1)})).delzant, "standard 2-simplex");
  ck.expect(is_delzant(hull_and_facets({{Rat(0), Rat(0), Rat(0)}, {Rat(1), Rat(0), Rat(0)}, {Rat(0), Rat(1), Rat(0)},
                                        {Rat(0), Rat(0), Rat(1)}}))
                .delzant,
            "standard 3-simplex");

  auto a1 = build_root_system("A1");
  auto a2 = build_root_system("A2");
  for (int m = 1; m <= 3; ++m) {
    auto c1 = chamber_intersect(a1, interval(-m, m));
    ck.expect(boundary_integral(c1, a1.H_top, BoundarySelector::wall) == 0, "A1 wall integral");
    auto c2 = chamber_intersect(a2, hexagon(a2, v2(m, 1)));
    ck.expect(boundary_integral(c2, a2.H_top, BoundarySelector::wall) == 0, "A2 wall integral");
  }

  auto cells = subdivision_from_pl(interval(-1, 1), sym_a1_crease()).cells;
  ck.expect(cells.size() == 3 && validate_complex(cells).valid, "three-cell interval complex");

  std::vector<std::pair<RootSystemData, RationalPolytope>> shapes{
      {a1, interval(-1, 1)}, {a2, hexagon(a2, v2(2, 1))}, {build_root_system("toric:2"), unit_square()}};
  for (const auto& [rs, p] : shapes) {
    Rat a = average_a(rs, chamber_intersect(rs, p));
    for (int n : {2, 3, 5})
      ck.expect(average_a(rs, chamber_intersect(rs, scaled(p, Rat(n)))) == a / n,
                rs.label + " a(" + std::to_string(n) + "P)");
  }
  return ck.out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 constant-function kernel", constant_kernel},
      {"2 closed form vs oracle Futaki", oracle_vs_closed_form},
      {"3 A2 hexagon oracle agreement", hexagon_oracle},
      {"4 lattice-sum lemma", lattice_sum_lemma},
      {"5 Hilbert coefficient cross-check", hilbert_cross_check},
      {"6 toric reduction", toric_reduction},
      {"7 Donaldson corner-cut certificate", donaldson_certificate},
      {"8 PGL3 hexagon certificate", pgl3_certificate},
      {"9 structural suites", structural}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << " (" << secs << " s)";
    if (!o.detail.empty()) std::cout << ": " << o.detail;
    std::cout << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
