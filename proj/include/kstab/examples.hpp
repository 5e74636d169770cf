/**
 * Example generators and parameter scans.
 *
 * Corner pattern: at a polygon vertex V with primitive edge directions
 * u_in, u_out (pointing away from V), the corner is replaced by
 *   V + u_in/4,  V + r_n (u_in + u_out),  V + u_out/4,
 * with r_n = (n-2) / (4(3n-5)). Generated polygons are rescaled by the
 * least integer N that makes them lattice polygons; crease distances and
 * roofs given in the unscaled frame are multiplied by N.
 */
#pragma once

#include "kstab/functionals.hpp"
#include "kstab/pl_function.hpp"
#include "kstab/polytope.hpp"
#include "kstab/problem.hpp"
#include "kstab/rational.hpp"
#include "kstab/root_system.hpp"

#include <cstdio>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace kstab {

inline ProblemFile gen_wonderful(const RootSystemData& rs, const Vec& point) {
  if (rs.is_toric()) throw ValidationError("gen_wonderful: needs a non-toric root system");
  if (static_cast<int>(point.size()) != rs.rank) throw ValidationError("gen_wonderful: point has the wrong dimension");
  if (!in_open_chamber(rs, point))
    throw ValidationError("gen_wonderful: (" + to_string(point, ",") + ") is not strictly inside the chamber");
  ProblemFile p;
  p.root_system = rs.label;
  p.polytope = hull_and_facets(weyl_orbit(rs, point)).vertices;
  p.metadata["family"] = "wonderful";
  p.metadata["point"] = to_string(point, ",");
  return p;
}

/// The W-invariant simplex with one vertex m·ω₁ on a chamber ray, n = 2 or 3.
inline ProblemFile gen_pgln_simplex(int n, const Rat& m = 1) {
  if (n != 2 && n != 3) throw ValidationError("gen_pgln_simplex: n must be 2 or 3");
  if (m <= 0) throw ValidationError("gen_pgln_simplex: scale must be positive");
  RootSystemData rs = build_root_system(n == 2 ? "A1" : "A2");
  Vec ray(rs.rank, Rat(0));
  ray[0] = m;
  ProblemFile p;
  p.root_system = rs.label;
  p.polytope = hull_and_facets(weyl_orbit(rs, ray)).vertices;
  p.metadata["family"] = "pgln-simplex";
  p.metadata["n"] = std::to_string(n);
  return p;
}

inline Rat donaldson_r(int n) {
  if (n < 3) throw ValidationError("corner pattern: n must be at least 3");
  return Rat(n - 2, 4 * (3 * n - 5));
}

namespace detail {

struct CutPolygon {
  RationalPolytope polygon;  ///< rational polygon after the corner pattern
  std::vector<Vec> d_points;  ///< the D corners, one per original vertex
};

inline CutPolygon corner_pattern(const RationalPolytope& p, const Rat& r) {
  const Rat quarter(1, 4);
  std::vector<Vec> pts;
  CutPolygon out;
  int m = static_cast<int>(p.vertices.size());
  for (int i = 0; i < m; ++i) {
    auto [ip, in] = p.polygon_neighbours(i);
    const Vec& v = p.vertices[i];
    Vec u_in = to_vec(edge_generator(v, p.vertices[ip]));
    Vec u_out = to_vec(edge_generator(v, p.vertices[in]));
    Vec d = v + r * (u_in + u_out);
    pts.push_back(v + quarter * u_in);
    pts.push_back(d);
    pts.push_back(v + quarter * u_out);
    out.d_points.push_back(d);
  }
  out.polygon = hull_and_facets(pts);
  if (out.polygon.vertices.size() != pts.size())
    throw ValidationError("corner pattern: cuts overlap, the polygon is too small for the pattern");
  return out;
}

}  // namespace detail

/// A generated instance with its lattice polygon and compiled crease.
struct Generated {
  ProblemFile problem;
  RationalPolytope polytope;   ///< lattice polygon (smoothed when requested)
  RationalPolytope unsmoothed;  ///< the same scale, before smoothing
  Int scale = 1;
  std::vector<Vec> crease_corners;  ///< scaled D corners that carry the crease
};

struct FamilyOptions {
  bool smooth = false;
  std::optional<Rat> delta;  ///< chosen automatically when absent
  Rat epsilon{1, 16};
  Rat slope = 1;
};

namespace detail {

struct Smoothed {
  RationalPolytope polytope;
  Int scale;
  Rat delta;
};

inline Smoothed smooth_or_scale(const RationalPolytope& q, const FamilyOptions& opt) {
  if (!opt.smooth) {
    Int n = lattice_scale(q);
    return {scaled(q, Rat(n)), n, 0};
  }
  auto bad = non_delzant_vertices(q);
  if (opt.delta) {
    auto r = hj_smooth_vertices(q, bad, *opt.delta);
    return {r.polytope, r.scale, *opt.delta};
  }
  Rat delta(1, 64);
  for (int attempt = 0; attempt < 24; ++attempt, delta /= 2) {
    try {
      auto r = hj_smooth_vertices(q, bad, delta);
      return {r.polytope, r.scale, delta};
    } catch (const ValidationError&) {
    }
  }
  throw ValidationError("smoothing: no delta down to 2^-29 avoids colliding cuts");
}

inline void fill_problem(Generated& g, const RootSystemData& rs, const FamilyOptions& opt, const PLFunction& f) {
  g.problem.root_system = rs.label;
  g.problem.polytope = g.polytope.vertices;
  g.problem.pieces = f.pieces();
  g.problem.metadata["scale"] = g.scale.str();
  g.problem.metadata["epsilon"] = to_string(opt.epsilon);
  g.problem.metadata["slope"] = to_string(opt.slope);
  g.problem.metadata["smooth"] = opt.smooth ? "true" : "false";
  g.problem.metadata["corner_frame"] = "primitive incident edge directions at every corner";
}

}  // namespace detail

/// Crease of lattice depth eps·N at each scaled D corner of the unsmoothed polygon.
inline PLFunction family_crease(const RootSystemData& rs, const Generated& g, const FamilyOptions& opt) {
  RationalPolytope chamber = chamber_intersect(rs, g.unsmoothed);
  std::optional<PLFunction> f;
  for (const Vec& c : g.crease_corners) {
    PLFunction h = corner_crease(chamber, c, opt.epsilon * Rat(g.scale), opt.slope);
    f = f ? pl_max(*f, h) : h;
  }
  return rs.is_toric() ? *f : symmetrize(rs, *f);
}

/// Geometry only: polygon, scale and crease corners.
inline Generated donaldson_geometry(int n, const FamilyOptions& opt) {
  Rat r = donaldson_r(n);
  RationalPolytope tri = hull_and_facets({{Rat(0), Rat(0)}, {Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
  auto cut = detail::corner_pattern(tri, r);
  auto sm = detail::smooth_or_scale(cut.polygon, opt);
  Generated g;
  g.polytope = sm.polytope;
  g.scale = sm.scale;
  g.unsmoothed = scaled(cut.polygon, Rat(sm.scale));
  for (const Vec& d : cut.d_points) g.crease_corners.push_back(Rat(sm.scale) * d);
  g.problem.metadata["family"] = "donaldson";
  g.problem.metadata["n"] = std::to_string(n);
  g.problem.metadata["r_n"] = to_string(r);
  g.problem.metadata["corners"] = "pattern applied at all three triangle corners";
  if (opt.smooth) g.problem.metadata["delta"] = to_string(sm.delta);
  return g;
}

inline Generated gen_donaldson(int n, const FamilyOptions& opt = {}) {
  RootSystemData rs = build_root_system("toric:2");
  Generated g = donaldson_geometry(n, opt);
  detail::fill_problem(g, rs, opt, family_crease(rs, g, opt));
  return g;
}

inline Generated pgl3_geometry(const Rat& s, int n, const FamilyOptions& opt) {
  if (s <= 0) throw ValidationError("pgl3 family: s must be positive");
  RootSystemData rs = build_root_system("A2");
  Rat r = donaldson_r(n);
  RationalPolytope hex = hull_and_facets(weyl_orbit(rs, {s, s}));
  auto cut = detail::corner_pattern(hex, r);
  if (!wall_vertex_check(rs, cut.polygon).ok)
    throw ValidationError("pgl3 family: s = " + to_string(s) + " is too small, a cut vertex lies on a wall");
  auto sm = detail::smooth_or_scale(cut.polygon, opt);
  Generated g;
  g.polytope = sm.polytope;
  g.scale = sm.scale;
  g.unsmoothed = scaled(cut.polygon, Rat(sm.scale));
  for (const Vec& d : cut.d_points)
    if (in_open_chamber(rs, d)) g.crease_corners.push_back(Rat(sm.scale) * d);
  g.problem.metadata["family"] = "pgl3";
  g.problem.metadata["s"] = to_string(s);
  g.problem.metadata["n"] = std::to_string(n);
  g.problem.metadata["r_n"] = to_string(r);
  if (opt.smooth) g.problem.metadata["delta"] = to_string(sm.delta);
  return g;
}

inline Generated gen_pgl3_family(const Rat& s, int n, const FamilyOptions& opt = {}) {
  RootSystemData rs = build_root_system("A2");
  Generated g = pgl3_geometry(s, n, opt);
  detail::fill_problem(g, rs, opt, family_crease(rs, g, opt));
  return g;
}

/// A1 interval [-m, m] with the symmetrized crease at m.
inline Generated wonderful_a1_geometry(const Rat& m) {
  if (m <= 0) throw ValidationError("wonderful family: m must be positive");
  Generated g;
  RationalPolytope seg = hull_and_facets({{-m}, {m}});
  g.scale = lattice_scale(seg);
  g.polytope = scaled(seg, Rat(g.scale));
  g.unsmoothed = g.polytope;
  g.crease_corners = {{Rat(g.scale) * m}};
  g.problem.metadata["family"] = "wonderful";
  g.problem.metadata["m"] = to_string(m);
  return g;
}

// ---------------------------------------------------------------------------
// Scans

struct ScanGrid {
  std::vector<Rat> s;
  std::vector<int> n;
  std::vector<Rat> epsilon;
  std::vector<Rat> slope;
};

inline ScanGrid default_grid(const std::string& family) {
  ScanGrid g;
  g.n = {10, 20, 50, 100};
  g.epsilon = {Rat(1, 64), Rat(1, 32), Rat(1, 16), Rat(1, 8), Rat(1, 4)};
  g.slope = {1, 4, 16};
  if (family == "pgl3") {
    g.s = {5, 10, 20};
  } else if (family == "wonderful") {
    g.s = {1, 2, 3};
    g.n = {0};
  } else {
    g.s = {0};
  }
  return g;
}

struct ScanRow {
  std::string family;
  Rat s;
  int n = 0;
  Rat epsilon, slope;
  Int scale = 1;
  std::string status = "ok";
  bool w_invariant = true, wall_vertex_ok = true;
  std::optional<bool> delzant;
  std::optional<Rat> bracket, minus_F1;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::optional<std::size_t> best;  ///< most negative −F₁ per unit slope
  std::optional<StabilityReport> best_report;

  std::string csv() const {
    std::ostringstream o;
    o << "family,s,n,epsilon,slope,scale,status,w_invariant,wall_vertex_ok,delzant,bracket,bracket_sign,minus_F1,"
         "minus_F1_approx_non_authoritative\n";
    for (const auto& r : rows) {
      o << r.family << "," << to_string(r.s) << "," << r.n << "," << to_string(r.epsilon) << "," << to_string(r.slope)
        << "," << r.scale.str() << "," << r.status << "," << (r.w_invariant ? "true" : "false") << ","
        << (r.wall_vertex_ok ? "true" : "false") << "," << (r.delzant ? (*r.delzant ? "true" : "false") : "n/a") << ",";
      if (r.bracket) {
        char approx[64];
        std::snprintf(approx, sizeof approx, "%.6g", to_double(*r.minus_F1));
        o << to_string(*r.bracket) << "," << sign(*r.bracket) << "," << to_string(*r.minus_F1) << "," << approx;
      } else {
        o << ",,,";
      }
      o << "\n";
    }
    return o.str();
  }
};

namespace detail {

struct ScanGeometry {
  RootSystemData rs;
  std::optional<Generated> gen;
  std::optional<ChamberData> chamber;
  std::string error;
  bool w_invariant = true, wall_ok = true;
  std::optional<bool> delzant;
};

inline ScanGeometry scan_geometry(const std::string& family, const Rat& s, int n, const FamilyOptions& opt) {
  ScanGeometry g;
  g.rs = build_root_system(family == "pgl3" ? "A2" : family == "wonderful" ? "A1" : "toric:2");
  try {
    if (family == "donaldson") g.gen = donaldson_geometry(n, opt);
    else if (family == "pgl3") g.gen = pgl3_geometry(s, n, opt);
    else if (family == "wonderful") g.gen = wonderful_a1_geometry(s);
    else throw ValidationError("unknown family '" + family + "'");
    g.w_invariant = is_w_invariant(g.rs, g.gen->polytope).invariant;
    g.wall_ok = g.rs.is_toric() || wall_vertex_check(g.rs, g.gen->polytope).ok;
    if (g.rs.rank == 2) g.delzant = is_delzant(g.gen->polytope).delzant;
    g.chamber = chamber_data(g.rs, chamber_intersect(g.rs, g.gen->polytope));
  } catch (const ValidationError& e) {
    g.error = e.what();
  }
  return g;
}

template <class T, class F>
std::vector<T> run_parallel(std::size_t count, F job) {
  std::vector<T> out(count);
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t base = 0; base < count; base += threads) {
    std::vector<std::future<T>> fs;
    for (std::size_t i = base; i < std::min(count, base + threads); ++i)
      fs.push_back(std::async(threads == 1 ? std::launch::deferred : std::launch::async, job, i));
    for (std::size_t j = 0; j < fs.size(); ++j) out[base + j] = fs[j].get();
  }
  return out;
}

}  // namespace detail

/**
 * Evaluates the bracket on every grid point. Rows come out in grid order
 * (s, n, epsilon, slope) whatever the thread count.
 */
inline ScanResult scan_destabilizer(const std::string& family, const ScanGrid& grid, FamilyOptions opt) {
  std::vector<std::pair<Rat, int>> shapes;
  for (const Rat& s : grid.s)
    for (int n : grid.n) shapes.emplace_back(s, n);
  auto geoms = detail::run_parallel<detail::ScanGeometry>(
      shapes.size(), [&](std::size_t i) { return detail::scan_geometry(family, shapes[i].first, shapes[i].second, opt); });

  struct Job {
    std::size_t shape;
    Rat eps, slope;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < shapes.size(); ++i)
    for (const Rat& e : grid.epsilon)
      for (const Rat& sl : grid.slope) jobs.push_back({i, e, sl});

  ScanResult res;
  res.rows = detail::run_parallel<ScanRow>(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    const auto& g = geoms[job.shape];
    ScanRow row;
    row.family = family;
    row.s = shapes[job.shape].first;
    row.n = shapes[job.shape].second;
    row.epsilon = job.eps;
    row.slope = job.slope;
    row.w_invariant = g.w_invariant;
    row.wall_vertex_ok = g.wall_ok;
    row.delzant = g.delzant;
    if (!g.error.empty()) {
      row.status = "invalid: " + g.error;
      return row;
    }
    row.scale = g.gen->scale;
    try {
      FamilyOptions o = opt;
      o.epsilon = job.eps;
      o.slope = job.slope;
      PLFunction f = family_crease(g.rs, *g.gen, o);
      WeightedIntegrals w = weighted_integrals(*g.chamber, f);
      row.bracket = bracket_from(*g.chamber, w);
      row.minus_F1 = *row.bracket / (2 * g.chamber->volume_top);
    } catch (const ValidationError& e) {
      row.status = std::string("invalid: ") + e.what();
    }
    return row;
  });
  for (auto& row : res.rows)
    for (char& c : row.status)
      if (c == ',' || c == '\n') c = ';';

  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& r = res.rows[i];
    if (!r.bracket || *r.bracket >= 0) continue;
    if (!res.best || *r.minus_F1 / r.slope < *res.rows[*res.best].minus_F1 / res.rows[*res.best].slope) res.best = i;
  }
  if (res.best) {
    const ScanRow& r = res.rows[*res.best];
    std::size_t shape = 0;
    while (!(shapes[shape].first == r.s && shapes[shape].second == r.n)) ++shape;
    const auto& g = geoms[shape];
    FamilyOptions o = opt;
    o.epsilon = r.epsilon;
    o.slope = r.slope;
    res.best_report = csc_verdict(g.rs, g.gen->polytope, family_crease(g.rs, *g.gen, o));
  }
  return res;
}

}  // namespace kstab
