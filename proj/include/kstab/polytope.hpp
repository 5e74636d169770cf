/**
 * Exact rational polytopes of ambient dimension <= 3.
 *
 * Facets are stored as inequalities normal·x >= offset with a primitive
 * integer normal pointing into the polytope. Full-dimensional polygons keep
 * their vertices in counterclockwise order starting at the lexicographically
 * smallest vertex; in every other case vertices are sorted lexicographically.
 */
#pragma once

#include "kstab/linalg.hpp"
#include "kstab/rational.hpp"
#include "kstab/root_system.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace kstab {

enum class FacetTag { outer, wall, crease };

inline const char* to_string(FacetTag t) {
  switch (t) {
    case FacetTag::outer: return "outer";
    case FacetTag::wall: return "wall";
    case FacetTag::crease: return "crease";
  }
  return "?";
}

struct Facet {
  IntVec normal;  ///< primitive, inward
  Rat offset;     ///< normal·x >= offset on the polytope
  FacetTag tag = FacetTag::outer;
  std::vector<int> vertices;  ///< indices of the vertices lying on the facet

  Rat slack(const Vec& x) const { return dot(to_vec(normal), x) - offset; }
};

/// Inequality a·x >= b used for clipping; the tag is given to any facet it creates.
struct HalfSpace {
  Vec a;
  Rat b;
  FacetTag tag = FacetTag::crease;
};

struct Face {
  int dim = 0;
  std::vector<int> vertices;  ///< sorted indices into the polytope's vertex list
};

class RationalPolytope {
 public:
  int ambient = 0;
  int dim = -1;  ///< -1 for the empty polytope
  std::vector<Vec> vertices;
  std::vector<Facet> facets;  ///< empty unless full-dimensional
  /// Affine hull: anchor + span(directions); directions are empty for a point.
  Vec anchor;
  std::vector<Vec> directions;

  bool empty() const { return dim < 0; }
  bool full_dimensional() const { return dim == ambient && ambient > 0; }

  bool contains(const Vec& x) const {
    if (!full_dimensional()) throw std::logic_error("contains: requires a full-dimensional polytope");
    for (const Facet& f : facets)
      if (f.slack(x) < 0) return false;
    return true;
  }

  std::vector<HalfSpace> halfspaces() const {
    std::vector<HalfSpace> hs;
    for (const Facet& f : facets) hs.push_back({to_vec(f.normal), f.offset, f.tag});
    return hs;
  }

  /// Index of a vertex equal to x, or -1.
  int find_vertex(const Vec& x) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i] == x) return static_cast<int>(i);
    return -1;
  }

  /// Counterclockwise neighbours (previous, next) of vertex i in a polygon.
  std::pair<int, int> polygon_neighbours(int i) const {
    if (ambient != 2 || dim != 2) throw std::logic_error("polygon_neighbours: not a polygon");
    int m = static_cast<int>(vertices.size());
    return {(i + m - 1) % m, (i + 1) % m};
  }

  bool is_lattice() const {
    for (const Vec& v : vertices)
      if (!is_lattice_point(v)) return false;
    return true;
  }
};

namespace detail {

inline Rat cross2(const Vec& o, const Vec& a, const Vec& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

inline Vec cross3(const Vec& u, const Vec& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

inline std::vector<Vec> unique_sorted(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

/// Andrew's monotone chain; strictly convex ccw output starting at the lex-min point.
inline std::vector<Vec> hull2(std::vector<Vec> pts) {
  pts = unique_sorted(std::move(pts));
  if (pts.size() < 3) return pts;
  std::vector<Vec> h(2 * pts.size());
  std::size_t k = 0;
  for (const Vec& p : pts) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

inline Facet make_facet(const Vec& normal_rat, const Vec& on_plane, const Vec& interior) {
  IntVec n = primitive(normal_rat);
  Vec nv = to_vec(n);
  Rat off = dot(nv, on_plane);
  if (dot(nv, interior) < off) {
    for (Int& z : n) z = -z;
    off = -off;
  }
  Facet f;
  f.normal = std::move(n);
  f.offset = off;
  return f;
}

inline Vec centroid(const std::vector<Vec>& pts) {
  Vec c(pts[0].size(), Rat(0));
  for (const Vec& p : pts) c = c + p;
  return Rat(1, static_cast<long>(pts.size())) * c;
}

inline void attach_facet_vertices(RationalPolytope& p) {
  for (Facet& f : p.facets) {
    f.vertices.clear();
    for (std::size_t i = 0; i < p.vertices.size(); ++i)
      if (f.slack(p.vertices[i]) == 0) f.vertices.push_back(static_cast<int>(i));
  }
  std::sort(p.facets.begin(), p.facets.end(), [](const Facet& a, const Facet& b) {
    return std::tie(a.normal, a.offset) < std::tie(b.normal, b.offset);
  });
}

inline RationalPolytope full_hull(int ambient, const std::vector<Vec>& pts) {
  RationalPolytope p;
  p.ambient = ambient;
  p.dim = ambient;
  p.anchor = pts[0];
  for (int i = 0; i < ambient; ++i) {
    Vec e(ambient, Rat(0));
    e[i] = 1;
    p.directions.push_back(e);
  }
  if (ambient == 1) {
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end());
    p.vertices = {*lo, *hi};
    Facet a;
    a.normal = {Int(1)};
    a.offset = (*lo)[0];
    Facet b;
    b.normal = {Int(-1)};
    b.offset = -(*hi)[0];
    p.facets = {a, b};
  } else if (ambient == 2) {
    p.vertices = hull2(pts);
    Vec c = centroid(p.vertices);
    int m = static_cast<int>(p.vertices.size());
    for (int i = 0; i < m; ++i) {
      const Vec& u = p.vertices[i];
      const Vec& v = p.vertices[(i + 1) % m];
      Vec normal{-(v[1] - u[1]), v[0] - u[0]};
      p.facets.push_back(make_facet(normal, u, c));
    }
  } else if (ambient == 3) {
    auto uniq = unique_sorted(pts);
    Vec c = centroid(uniq);
    std::map<std::pair<IntVec, Rat>, Facet> found;
    std::size_t m = uniq.size();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k) {
          Vec nrm = cross3(uniq[j] - uniq[i], uniq[k] - uniq[i]);
          if (nrm[0] == 0 && nrm[1] == 0 && nrm[2] == 0) continue;
          Facet f = make_facet(nrm, uniq[i], c);
          if (found.count({f.normal, f.offset})) continue;
          bool supporting = true;
          for (const Vec& q : uniq)
            if (f.slack(q) < 0) {
              supporting = false;
              break;
            }
          if (supporting) found.emplace(std::make_pair(f.normal, f.offset), f);
        }
    for (auto& [key, f] : found) p.facets.push_back(f);
    for (const Vec& q : uniq) {
      std::vector<Vec> tight;
      for (const Facet& f : p.facets)
        if (f.slack(q) == 0) tight.push_back(to_vec(f.normal));
      if (rank(tight) == 3) p.vertices.push_back(q);
    }
  } else {
    throw std::invalid_argument("hull: ambient dimension must be 1..3");
  }
  attach_facet_vertices(p);
  return p;
}

}  // namespace detail

/**
 * Convex hull with facet enumeration. Degenerate input yields a
 * lower-dimensional polytope (vertices plus affine hull, no facets).
 */
inline RationalPolytope hull_and_facets(const std::vector<Vec>& points) {
  RationalPolytope p;
  if (points.empty()) return p;
  int ambient = static_cast<int>(points[0].size());
  if (ambient < 1 || ambient > 3) throw std::invalid_argument("hull_and_facets: ambient dimension must be 1..3");
  for (const Vec& q : points)
    if (static_cast<int>(q.size()) != ambient) throw std::invalid_argument("hull_and_facets: mixed dimensions");
  auto pts = detail::unique_sorted(points);
  std::vector<Vec> diffs;
  for (std::size_t i = 1; i < pts.size(); ++i) diffs.push_back(pts[i] - pts[0]);
  int k = rank(diffs);
  if (k == ambient) return detail::full_hull(ambient, pts);

  // Lower-dimensional: chart the affine hull and take the hull there.
  p.ambient = ambient;
  p.dim = k;
  p.anchor = pts[0];
  for (const Vec& d : diffs) {
    auto trial = p.directions;
    trial.push_back(d);
    if (rank(trial) > static_cast<int>(p.directions.size())) p.directions = trial;
    if (static_cast<int>(p.directions.size()) == k) break;
  }
  if (k == 0) {
    p.vertices = {pts[0]};
    return p;
  }
  RatMatrix basis(ambient, k);
  for (int i = 0; i < ambient; ++i)
    for (int j = 0; j < k; ++j) basis(i, j) = p.directions[j][i];
  std::vector<Vec> chart;
  for (const Vec& q : pts) chart.push_back(*solve(basis, q - p.anchor));
  auto sub = detail::full_hull(k, chart);
  for (const Vec& c : sub.vertices) p.vertices.push_back(p.anchor + basis * c);
  p.vertices = detail::unique_sorted(p.vertices);
  return p;
}

/**
 * Polytope {x : a·x >= b for all half-spaces}, which must be bounded.
 * Vertices come from exact enumeration of constraint subsets.
 */
inline RationalPolytope from_halfspaces(int ambient, const std::vector<HalfSpace>& hs) {
  std::vector<Vec> pts;
  int m = static_cast<int>(hs.size());
  std::vector<int> idx(ambient);
  // Enumerate all ambient-sized subsets.
  std::vector<bool> mask(m, false);
  std::fill(mask.begin(), mask.begin() + std::min(ambient, m), true);
  if (m >= ambient) do {
      RatMatrix a(ambient, ambient);
      Vec b(ambient);
      int r = 0;
      for (int i = 0; i < m; ++i)
        if (mask[i]) {
          for (int j = 0; j < ambient; ++j) a(r, j) = hs[i].a[j];
          b[r] = hs[i].b;
          ++r;
        }
      if (determinant(a) == 0) continue;
      Vec x = *solve(a, b);
      bool feasible = true;
      for (const HalfSpace& h : hs)
        if (dot(h.a, x) < h.b) {
          feasible = false;
          break;
        }
      if (feasible) pts.push_back(std::move(x));
    } while (std::prev_permutation(mask.begin(), mask.end()));
  return hull_and_facets(pts);
}

namespace detail {

/// Sutherland–Hodgman clip of a ccw polygon by a·x >= b.
inline std::vector<Vec> clip_polygon(const std::vector<Vec>& poly, const HalfSpace& h) {
  std::vector<Vec> out;
  std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& p = poly[i];
    const Vec& q = poly[(i + 1) % m];
    Rat sp = dot(h.a, p) - h.b, sq = dot(h.a, q) - h.b;
    if (sp >= 0) out.push_back(p);
    if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) {
      Rat t = sp / (sp - sq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

/// Primitive normal and matching offset of a half-space a·x >= b.
inline std::pair<IntVec, Rat> normalized(const HalfSpace& h) {
  IntVec n = primitive(h.a);
  for (std::size_t i = 0; i < h.a.size(); ++i)
    if (h.a[i] != 0) return {n, h.b * (Rat(n[i]) / h.a[i])};
  throw std::invalid_argument("normalized: zero half-space normal");
}

/// Re-tags facets of q: wall cuts first, then facets of the source, then the remaining cuts.
inline void retag(RationalPolytope& q, const RationalPolytope& source, const std::vector<HalfSpace>& cuts) {
  std::vector<std::pair<std::pair<IntVec, Rat>, FacetTag>> keyed;
  for (const HalfSpace& h : cuts) keyed.emplace_back(normalized(h), h.tag);
  for (Facet& f : q.facets) {
    auto key = std::make_pair(f.normal, f.offset);
    auto match = [&](FacetTag only, bool any) -> bool {
      for (const auto& [k, tag] : keyed)
        if ((any || tag == only) && k == key) {
          f.tag = tag;
          return true;
        }
      return false;
    };
    if (match(FacetTag::wall, false)) continue;
    bool inherited = false;
    for (const Facet& s : source.facets)
      if (s.normal == f.normal && s.offset == f.offset) {
        f.tag = s.tag;
        inherited = true;
        break;
      }
    if (inherited) continue;
    if (!match(FacetTag::crease, true)) f.tag = FacetTag::crease;
  }
}

}  // namespace detail

/**
 * P ∩ {a·x >= b}. Facets of P keep their tags; new facets take the tag of
 * the half-space that created them (wall tags take precedence).
 */
inline RationalPolytope clip(const RationalPolytope& p, const std::vector<HalfSpace>& cuts) {
  if (!p.full_dimensional()) throw std::invalid_argument("clip: requires a full-dimensional polytope");
  RationalPolytope q;
  if (p.ambient == 2) {
    std::vector<Vec> poly = p.vertices;
    for (const HalfSpace& h : cuts) {
      poly = detail::clip_polygon(poly, h);
      if (poly.empty()) break;
    }
    q = hull_and_facets(poly);
  } else {
    auto hs = p.halfspaces();
    hs.insert(hs.end(), cuts.begin(), cuts.end());
    q = from_halfspaces(p.ambient, hs);
  }
  if (q.full_dimensional()) detail::retag(q, p, cuts);
  return q;
}

inline RationalPolytope scaled(const RationalPolytope& p, const Rat& factor) {
  std::vector<Vec> pts;
  for (const Vec& v : p.vertices) pts.push_back(factor * v);
  RationalPolytope q = hull_and_facets(pts);
  if (q.full_dimensional())
    for (Facet& f : q.facets)
      for (const Facet& s : p.facets)
        if (s.normal == f.normal) f.tag = s.tag;
  return q;
}

/// Affine dimension of a set of points.
inline int affine_rank(const std::vector<Vec>& pts) {
  if (pts.empty()) return -1;
  std::vector<Vec> diffs;
  for (std::size_t i = 1; i < pts.size(); ++i) diffs.push_back(pts[i] - pts[0]);
  return rank(diffs);
}

/// All nonempty faces (including P itself) of a full-dimensional polytope.
inline std::vector<Face> face_lattice(const RationalPolytope& p) {
  if (!p.full_dimensional()) throw std::invalid_argument("face_lattice: requires a full-dimensional polytope");
  std::set<std::vector<int>> sets;
  std::vector<std::vector<int>> frontier;
  for (const Facet& f : p.facets)
    if (sets.insert(f.vertices).second) frontier.push_back(f.vertices);
  std::vector<std::vector<int>> all(frontier);
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (const auto& a : frontier)
      for (const Facet& f : p.facets) {
        std::vector<int> inter;
        std::set_intersection(a.begin(), a.end(), f.vertices.begin(), f.vertices.end(), std::back_inserter(inter));
        if (!inter.empty() && sets.insert(inter).second) {
          next.push_back(inter);
          all.push_back(inter);
        }
      }
    frontier = std::move(next);
  }
  std::vector<Face> faces;
  std::vector<int> everything(p.vertices.size());
  for (std::size_t i = 0; i < everything.size(); ++i) everything[i] = static_cast<int>(i);
  faces.push_back({p.dim, everything});
  for (const auto& s : all) {
    std::vector<Vec> pts;
    for (int i : s) pts.push_back(p.vertices[i]);
    faces.push_back({affine_rank(pts), s});
  }
  std::sort(faces.begin(), faces.end(), [](const Face& a, const Face& b) {
    return std::tie(a.dim, a.vertices) < std::tie(b.dim, b.vertices);
  });
  return faces;
}

/// Neighbouring vertices along edges, for each vertex.
inline std::vector<std::vector<int>> vertex_edges(const RationalPolytope& p) {
  std::vector<std::vector<int>> adj(p.vertices.size());
  int m = static_cast<int>(p.vertices.size());
  if (p.ambient == 1 || p.ambient == 2) {
    if (m == 2) {
      adj[0] = {1};
      adj[1] = {0};
      return adj;
    }
    for (int i = 0; i < m; ++i) {
      auto [a, b] = p.polygon_neighbours(i);
      adj[i] = {a, b};
    }
    return adj;
  }
  for (const Face& f : face_lattice(p))
    if (f.dim == 1) {
      adj[f.vertices[0]].push_back(f.vertices[1]);
      adj[f.vertices[1]].push_back(f.vertices[0]);
    }
  return adj;
}

// ---------------------------------------------------------------------------
// W-invariance and chamber geometry

struct InvarianceResult {
  bool invariant = true;
  std::optional<Vec> witness_vertex;
  int witness_generator = -1;
};

inline InvarianceResult is_w_invariant(const RootSystemData& rs, const RationalPolytope& p) {
  if (p.ambient != rs.rank) throw std::invalid_argument("is_w_invariant: dimension mismatch");
  std::set<Vec> verts(p.vertices.begin(), p.vertices.end());
  for (std::size_t g = 0; g < rs.weyl_generators.size(); ++g)
    for (const Vec& v : p.vertices)
      if (!verts.count(rs.weyl_generators[g] * v)) return {false, v, static_cast<int>(g)};
  return {};
}

/**
 * P⁺ = P ∩ Λ_R⁺ with facets tagged wall or outer. Vertices may be
 * non-lattice rationals.
 */
inline RationalPolytope chamber_intersect(const RootSystemData& rs, const RationalPolytope& p) {
  if (p.ambient != rs.rank) throw std::invalid_argument("chamber_intersect: dimension mismatch");
  if (!p.full_dimensional()) throw ValidationError("chamber_intersect: P must be full-dimensional");
  std::vector<HalfSpace> walls;
  for (const Vec& w : rs.wall_normals) walls.push_back({w, Rat(0), FacetTag::wall});
  RationalPolytope q = clip(p, walls);
  if (!q.full_dimensional()) throw ValidationError("chamber_intersect: P meets the positive chamber in a degenerate set");
  return q;
}

struct WallVertexResult {
  bool ok = true;
  std::vector<Vec> witnesses;
};

inline WallVertexResult wall_vertex_check(const RootSystemData& rs, const RationalPolytope& p) {
  WallVertexResult r;
  for (const Vec& v : p.vertices)
    for (const Vec& w : rs.wall_normals)
      if (dot(w, v) == 0) {
        r.ok = false;
        r.witnesses.push_back(v);
        break;
      }
  return r;
}

// ---------------------------------------------------------------------------
// Delzant test

struct DelzantResult {
  bool delzant = true;
  std::vector<Vec> failing_vertices;
};

/// Primitive integer direction of the edge from u toward v.
inline IntVec edge_generator(const Vec& u, const Vec& v) { return primitive(v - u); }

inline DelzantResult is_delzant(const RationalPolytope& p) {
  if (!p.full_dimensional()) throw ValidationError("is_delzant: polytope must be full-dimensional");
  std::vector<std::string> bad;
  for (const Vec& v : p.vertices)
    if (!is_lattice_point(v)) bad.push_back("(" + to_string(v, ",") + ")");
  if (!bad.empty()) {
    std::string msg = "is_delzant: non-lattice vertices";
    for (const auto& s : bad) msg += " " + s;
    throw ValidationError(msg);
  }
  DelzantResult r;
  auto adj = vertex_edges(p);
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    bool ok = static_cast<int>(adj[i].size()) == p.dim;
    if (ok) {
      RatMatrix m(p.dim, p.dim);
      for (int e = 0; e < p.dim; ++e) {
        IntVec g = edge_generator(p.vertices[i], p.vertices[adj[i][e]]);
        for (int j = 0; j < p.dim; ++j) m(j, e) = g[j];
      }
      ok = is_unimodular(m);
    }
    if (!ok) {
      r.delzant = false;
      r.failing_vertices.push_back(p.vertices[i]);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Complexes of polytopes

struct PolyComplex {
  std::vector<RationalPolytope> cells;
  /// Index of the active affine piece per cell, when produced from a PL function.
  std::vector<int> active_piece;
};

/// True when q (a subset of p) is a face of p.
inline bool is_face_of(const RationalPolytope& q, const RationalPolytope& p) {
  if (q.empty()) return true;
  std::vector<const Facet*> tight;
  for (const Facet& f : p.facets) {
    bool all = true;
    for (const Vec& v : q.vertices)
      if (f.slack(v) != 0) {
        all = false;
        break;
      }
    if (all) tight.push_back(&f);
  }
  std::set<Vec> face_vertices;
  for (const Vec& v : p.vertices) {
    bool on = true;
    for (const Facet* f : tight)
      if (f->slack(v) != 0) {
        on = false;
        break;
      }
    if (on) face_vertices.insert(v);
  }
  return face_vertices == std::set<Vec>(q.vertices.begin(), q.vertices.end());
}

inline RationalPolytope intersection(const RationalPolytope& a, const RationalPolytope& b) {
  auto hs = a.halfspaces();
  auto hb = b.halfspaces();
  hs.insert(hs.end(), hb.begin(), hb.end());
  return from_halfspaces(a.ambient, hs);
}

struct ComplexVerdict {
  bool valid = true;
  bool unique_maximal = false;
  std::string message;
};

inline ComplexVerdict validate_complex(const std::vector<RationalPolytope>& cells) {
  ComplexVerdict v;
  if (cells.empty()) {
    v.valid = false;
    v.message = "empty complex";
    return v;
  }
  int ambient = cells[0].ambient;
  for (const auto& c : cells) {
    if (c.ambient != ambient) throw ValidationError("validate_complex: cells differ in ambient dimension");
    if (!c.full_dimensional()) throw ValidationError("validate_complex: cells must be full-dimensional");
  }
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      RationalPolytope q = intersection(cells[i], cells[j]);
      if (q.full_dimensional()) {
        v.valid = false;
        v.message = "cells " + std::to_string(i) + " and " + std::to_string(j) + " have overlapping interiors";
        return v;
      }
      if (!is_face_of(q, cells[i]) || !is_face_of(q, cells[j])) {
        v.valid = false;
        v.message = "intersection of cells " + std::to_string(i) + " and " + std::to_string(j) + " is not a face of both";
        return v;
      }
    }
  // All cells are full-dimensional with disjoint interiors, so each one is maximal.
  v.unique_maximal = cells.size() == 1;
  return v;
}

// ---------------------------------------------------------------------------
// Hirzebruch–Jung corner smoothing (dimension 2)

/**
 * Primitive directions d_1..d_s strictly inside cone(a, b) (det(a, b) > 0)
 * such that consecutive pairs in a, d_1, ..., d_s, b have determinant 1.
 * Greedy HJ step: the next ray is the unimodular partner of the current one
 * that lies in the cone and is closest to b.
 */
inline std::vector<IntVec> hj_chain(const IntVec& a, const IntVec& b) {
  auto det = [](const IntVec& u, const IntVec& v) { return u[0] * v[1] - u[1] * v[0]; };
  if (det(a, b) <= 0) throw std::invalid_argument("hj_chain: cone must be positively oriented");
  std::vector<IntVec> chain;
  IntVec cur = a;
  while (det(cur, b) > 1) {
    // Extended Euclid for w with det(cur, w) = cur0*w1 - cur1*w0 = 1.
    Int g, s, t;
    {
      Int r0 = cur[0], r1 = -cur[1], s0 = 1, s1 = 0, t0 = 0, t1 = 1;
      while (r1 != 0) {
        Int q = r0 / r1;
        Int tmp = r0 - q * r1;
        r0 = r1;
        r1 = tmp;
        tmp = s0 - q * s1;
        s0 = s1;
        s1 = tmp;
        tmp = t0 - q * t1;
        t0 = t1;
        t1 = tmp;
      }
      g = r0;
      s = s0;
      t = t0;
      if (g < 0) {
        g = -g;
        s = -s;
        t = -t;
      }
    }
    // cur0*s + (-cur1)*t = 1  =>  w = (t, s)
    IntVec w{t, s};
    Int m = det(cur, b);
    Int dwb = det(w, b);
    // smallest j with det(w + j cur, b) = dwb + j m >= 0
    Rat jr = Rat(-dwb, m);
    Int j = ceil_div(jr);
    IntVec next{w[0] + j * cur[0], w[1] + j * cur[1]};
    chain.push_back(next);
    cur = next;
  }
  return chain;
}

struct SmoothingResult {
  RationalPolytope polytope;  ///< lattice polytope (after rescale)
  Int scale = 1;              ///< integer factor applied to the input
  std::vector<IntVec> inserted_directions;
};

namespace detail {

/**
 * Replaces the listed polygon vertices by HJ chains whose inserted edges all
 * have lattice length delta. Result is rational (no rescale).
 */
inline std::pair<std::vector<Vec>, std::vector<IntVec>> smooth_vertices(const RationalPolytope& p,
                                                                        const std::vector<int>& which,
                                                                        const Rat& delta) {
  if (p.ambient != 2 || !p.full_dimensional()) throw ValidationError("HJ smoothing needs a full-dimensional polygon");
  if (delta <= 0) throw ValidationError("HJ smoothing: delta must be positive");
  int m = static_cast<int>(p.vertices.size());
  std::vector<std::vector<Vec>> replacement(m);
  std::vector<Rat> cut_before(m, Rat(0)), cut_after(m, Rat(0));  // lattice lengths eaten from incident edges
  std::vector<IntVec> inserted;
  std::set<int> targets(which.begin(), which.end());
  for (int i = 0; i < m; ++i) {
    const Vec& v = p.vertices[i];
    replacement[i] = {v};
    if (!targets.count(i)) continue;
    auto [ip, in] = p.polygon_neighbours(i);
    IntVec a = edge_generator(p.vertices[ip], v);  // incoming
    IntVec b = edge_generator(v, p.vertices[in]);  // outgoing
    auto chain = hj_chain(a, b);
    if (chain.empty()) continue;
    // v - t0 a + delta Σ d_j = v + t1 b
    Vec sum{Rat(0), Rat(0)};
    for (const IntVec& d : chain) sum = sum + delta * to_vec(d);
    RatMatrix sys(2, 2);
    sys(0, 0) = a[0];
    sys(1, 0) = a[1];
    sys(0, 1) = b[0];
    sys(1, 1) = b[1];
    Vec t = *solve(sys, sum);  // sum = t0 a + t1 b
    Vec start = v - t[0] * to_vec(a);
    std::vector<Vec> pts{start};
    for (const IntVec& d : chain) pts.push_back(pts.back() + delta * to_vec(d));
    replacement[i] = pts;
    cut_before[i] = t[0];
    cut_after[i] = t[1];
    inserted.insert(inserted.end(), chain.begin(), chain.end());
  }
  // Collision check: cuts on each edge must leave a positive remainder.
  for (int i = 0; i < m; ++i) {
    int j = (i + 1) % m;
    IntVec g = edge_generator(p.vertices[i], p.vertices[j]);
    Vec diff = p.vertices[j] - p.vertices[i];
    Rat len = 0;
    for (int c = 0; c < 2; ++c)
      if (g[c] != 0) {
        len = diff[c] / Rat(g[c]);
        break;
      }
    if (cut_after[i] + cut_before[j] >= len)
      throw ValidationError("HJ smoothing: delta too large, cuts collide on edge " + std::to_string(i));
  }
  std::vector<Vec> out;
  for (const auto& r : replacement) out.insert(out.end(), r.begin(), r.end());
  return {out, inserted};
}

}  // namespace detail

/// Smallest positive integer N with N·P a lattice polytope.
inline Int lattice_scale(const RationalPolytope& p) {
  Int l = 1;
  for (const Vec& v : p.vertices) l = lcm(l, denominator_lcm(v));
  return l;
}

/// Indices of polygon vertices failing the Delzant determinant test (vertices may be rational).
inline std::vector<int> non_delzant_vertices(const RationalPolytope& p) {
  std::vector<int> out;
  int m = static_cast<int>(p.vertices.size());
  for (int i = 0; i < m; ++i) {
    auto [ip, in] = p.polygon_neighbours(i);
    IntVec a = edge_generator(p.vertices[ip], p.vertices[i]);
    IntVec b = edge_generator(p.vertices[i], p.vertices[in]);
    if (boost::multiprecision::abs(a[0] * b[1] - a[1] * b[0]) != 1) out.push_back(i);
  }
  return out;
}

/**
 * Smooths the listed corners of a (rational) polygon at scale delta, then
 * rescales by the least integer making every vertex a lattice point.
 */
inline SmoothingResult hj_smooth_vertices(const RationalPolytope& p, const std::vector<int>& which, const Rat& delta) {
  auto [pts, inserted] = detail::smooth_vertices(p, which, delta);
  RationalPolytope rat = hull_and_facets(pts);
  if (static_cast<int>(rat.vertices.size()) != static_cast<int>(pts.size()))
    throw ValidationError("HJ smoothing: a cut degenerated (delta too large)");
  SmoothingResult r;
  r.scale = lattice_scale(rat);
  r.polytope = scaled(rat, Rat(r.scale));
  r.inserted_directions = std::move(inserted);
  return r;
}

/**
 * Replaces a non-Delzant corner v of a 2-D lattice polygon by its HJ
 * resolution at scale delta. A Delzant corner is returned unchanged.
 */
inline SmoothingResult hj_smooth_corner_2d(const RationalPolytope& p, const Vec& v, const Rat& delta) {
  if (p.ambient != 2 || !p.full_dimensional()) throw ValidationError("hj_smooth_corner_2d: need a full-dimensional polygon");
  if (!p.is_lattice()) throw ValidationError("hj_smooth_corner_2d: polygon must be a lattice polygon");
  int i = p.find_vertex(v);
  if (i < 0) throw ValidationError("hj_smooth_corner_2d: point is not a vertex");
  auto bad = non_delzant_vertices(p);
  if (std::find(bad.begin(), bad.end(), i) == bad.end()) return {p, 1, {}};
  return hj_smooth_vertices(p, {i}, delta);
}

}  // namespace kstab
