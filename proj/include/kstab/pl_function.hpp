/**
 * Convex piecewise-linear functions f = max of affine pieces, the
 * subdivisions they induce, corner creases and the lifted polytope
 * {(t, x) : x ∈ P, 0 <= t <= R - f(x)}.
 */
#pragma once

#include "kstab/linalg.hpp"
#include "kstab/polytope.hpp"
#include "kstab/rational.hpp"
#include "kstab/root_system.hpp"

#include <algorithm>
#include <compare>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace kstab {

struct AffinePiece {
  Rat constant;
  Vec gradient;

  Rat operator()(const Vec& x) const { return constant + dot(gradient, x); }
  bool is_zero() const {
    if (constant != 0) return false;
    for (const Rat& g : gradient)
      if (g != 0) return false;
    return true;
  }
  std::weak_ordering operator<=>(const AffinePiece& o) const {
    if (auto c = gradient <=> o.gradient; c != 0) return c;
    if (constant < o.constant) return std::weak_ordering::less;
    return constant == o.constant ? std::weak_ordering::equivalent : std::weak_ordering::greater;
  }
  bool operator==(const AffinePiece& o) const = default;
};

class PLFunction {
 public:
  PLFunction() = default;
  explicit PLFunction(std::vector<AffinePiece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw ValidationError("PL function needs at least one piece");
    std::size_t r = pieces_[0].gradient.size();
    for (const auto& p : pieces_)
      if (p.gradient.size() != r) throw ValidationError("PL function pieces differ in dimension");
  }

  static PLFunction constant(int r, const Rat& c) { return PLFunction({{c, Vec(r, Rat(0))}}); }

  int dim() const { return pieces_.empty() ? 0 : static_cast<int>(pieces_[0].gradient.size()); }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }

  /// lcm of all coefficient denominators.
  Int denominator_bound() const {
    Int l = 1;
    for (const auto& p : pieces_) {
      l = lcm(l, denom(p.constant));
      l = lcm(l, denominator_lcm(p.gradient));
    }
    return l;
  }

  std::string to_string() const {
    std::string s = "max(";
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (i) s += ", ";
      s += kstab::to_string(pieces_[i].constant) + " + (" + kstab::to_string(pieces_[i].gradient, ",") + ")·x";
    }
    return s + ")";
  }

 private:
  std::vector<AffinePiece> pieces_;
};

inline Rat eval_pl(const PLFunction& f, const Vec& x) {
  const auto& ps = f.pieces();
  Rat best = ps.at(0)(x);
  for (std::size_t i = 1; i < ps.size(); ++i) best = std::max(best, ps[i](x));
  return best;
}

/// Pointwise max of two PL functions, with duplicate pieces removed.
inline PLFunction pl_max(const PLFunction& f, const PLFunction& g) {
  std::set<AffinePiece> all(f.pieces().begin(), f.pieces().end());
  all.insert(g.pieces().begin(), g.pieces().end());
  return PLFunction({all.begin(), all.end()});
}

/// ℓ ∘ w for the linear map w.
inline AffinePiece compose(const AffinePiece& l, const RatMatrix& w) { return {l.constant, w.transpose() * l.gradient}; }

inline PLFunction symmetrize(const RootSystemData& rs, const PLFunction& f) {
  if (f.dim() != rs.rank) throw std::invalid_argument("symmetrize: dimension mismatch");
  std::set<AffinePiece> all;
  for (const RatMatrix& w : weyl_group(rs))
    for (const AffinePiece& l : f.pieces()) all.insert(compose(l, w));
  return PLFunction({all.begin(), all.end()});
}

/**
 * Cells where a single piece attains the max. Pieces equal to an earlier
 * piece, or active only on a lower-dimensional set, produce no cell.
 */
inline PolyComplex subdivision_from_pl(const RationalPolytope& p, const PLFunction& f) {
  if (!p.full_dimensional()) throw ValidationError("subdivision_from_pl: P must be full-dimensional");
  if (f.dim() != p.ambient) throw std::invalid_argument("subdivision_from_pl: dimension mismatch");
  PolyComplex out;
  const auto& ps = f.pieces();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    bool duplicate = false;
    for (std::size_t j = 0; j < i; ++j)
      if (ps[j] == ps[i]) duplicate = true;
    if (duplicate) continue;
    std::vector<HalfSpace> cuts;
    bool dominated = false;
    for (std::size_t j = 0; j < ps.size(); ++j) {
      if (j == i || ps[j] == ps[i]) continue;
      Vec a = ps[i].gradient - ps[j].gradient;
      Rat b = ps[j].constant - ps[i].constant;
      bool zero = std::all_of(a.begin(), a.end(), [](const Rat& c) { return c == 0; });
      if (zero) {
        // Parallel pieces: ps[i] is either everywhere above or everywhere below.
        if (b > 0) dominated = true;
        continue;
      }
      cuts.push_back({a, b, FacetTag::crease});
    }
    if (dominated) continue;
    RationalPolytope cell = clip(p, cuts);
    if (!cell.full_dimensional()) continue;
    out.cells.push_back(std::move(cell));
    out.active_piece.push_back(static_cast<int>(i));
  }
  return out;
}

namespace detail {

/// Vertices of the common refinement of the subdivisions of f and g on P.
inline std::vector<Vec> refinement_vertices(const RationalPolytope& p, const PLFunction& f, const PLFunction& g) {
  std::set<Vec> pts;
  auto cf = subdivision_from_pl(p, f);
  auto cg = subdivision_from_pl(p, g);
  for (const auto& a : cf.cells)
    for (const auto& b : cg.cells) {
      RationalPolytope q = clip(a, b.halfspaces());
      if (q.empty()) continue;
      pts.insert(q.vertices.begin(), q.vertices.end());
    }
  return {pts.begin(), pts.end()};
}

}  // namespace detail

/// Exact equality of two convex PL functions on P.
inline bool pl_equal_on(const RationalPolytope& p, const PLFunction& f, const PLFunction& g) {
  for (const Vec& v : detail::refinement_vertices(p, f, g))
    if (eval_pl(f, v) != eval_pl(g, v)) return false;
  return true;
}

inline bool is_w_invariant_pl(const RootSystemData& rs, const PLFunction& f, const RationalPolytope& p) {
  if (rs.is_toric()) return true;
  for (const RatMatrix& w : rs.weyl_generators) {
    std::vector<AffinePiece> moved;
    for (const AffinePiece& l : f.pieces()) moved.push_back(compose(l, w));
    if (!pl_equal_on(p, f, PLFunction(moved))) return false;
  }
  return true;
}

/**
 * max(0, ℓ) with ℓ vanishing on the chord that cuts off the corner at
 * lattice distance eps, and ℓ(corner) = eps·slope. The chord meets each
 * incident edge at the same lattice length eps/m from the corner, where m
 * is the common pairing of the primitive chord normal with the edges.
 */
inline PLFunction corner_crease(const RationalPolytope& p, const Vec& corner, const Rat& eps, const Rat& slope = 1) {
  if (!p.full_dimensional()) throw ValidationError("corner_crease: polytope must be full-dimensional");
  if (eps <= 0) throw ValidationError("corner_crease: eps must be positive");
  if (slope <= 0) throw ValidationError("corner_crease: slope must be positive");
  int ci = p.find_vertex(corner);
  if (ci < 0) throw ValidationError("corner_crease: (" + to_string(corner, ",") + ") is not a vertex");
  for (const Facet& f : p.facets)
    if (f.tag == FacetTag::wall && f.slack(corner) == 0)
      throw ValidationError("corner_crease: corner (" + to_string(corner, ",") + ") lies on a wall");
  auto adj = vertex_edges(p)[ci];
  int r = p.ambient;
  if (static_cast<int>(adj.size()) != r) throw ValidationError("corner_crease: corner is not a simple vertex");
  RatMatrix e(r, r);
  Vec rhs(r, Rat(-1));
  for (int i = 0; i < r; ++i) {
    IntVec u = edge_generator(corner, p.vertices[adj[i]]);
    for (int j = 0; j < r; ++j) e(i, j) = u[j];
  }
  Vec nu_rat = *solve(e, rhs);  // ν·u_i = -1
  IntVec nu = primitive(nu_rat);
  Vec nu_v = to_vec(nu);
  AffinePiece l{-slope * (dot(nu_v, corner) - eps), slope * nu_v};
  for (std::size_t i = 0; i < p.vertices.size(); ++i)
    if (static_cast<int>(i) != ci && l(p.vertices[i]) >= 0)
      throw ValidationError("corner_crease: eps = " + to_string(eps) + " too large, chord reaches vertex (" +
                            to_string(p.vertices[i], ",") + ")");
  return PLFunction({{Rat(0), Vec(r, Rat(0))}, l});
}

struct LiftedPolytope {
  RationalPolytope base;
  PLFunction function;
  Rat roof;
  RationalPolytope polytope;  ///< coordinates (t, x)
  Int scale = 1;              ///< least N with N·polytope a lattice polytope
};

/// Maximum of f over P, attained at a vertex of its subdivision.
inline Rat pl_max_on(const RationalPolytope& p, const PLFunction& f) {
  Rat best = eval_pl(f, p.vertices.at(0));
  for (const auto& cell : subdivision_from_pl(p, f).cells)
    for (const Vec& v : cell.vertices) best = std::max(best, eval_pl(f, v));
  return best;
}

inline LiftedPolytope build_test_polytope(const RationalPolytope& p, const PLFunction& f, const Rat& roof) {
  if (p.ambient + 1 > 3) throw ValidationError("build_test_polytope: lifted polytope would exceed dimension 3");
  Rat top = pl_max_on(p, f);
  if (roof < top) throw ValidationError("build_test_polytope: R = " + to_string(roof) + " is below max f = " + to_string(top));
  LiftedPolytope out{p, f, roof, {}, 1};
  std::vector<Vec> pts;
  for (const auto& cell : subdivision_from_pl(p, f).cells)
    for (const Vec& v : cell.vertices) {
      Vec lo{Rat(0)}, hi{roof - eval_pl(f, v)};
      lo.insert(lo.end(), v.begin(), v.end());
      hi.insert(hi.end(), v.begin(), v.end());
      pts.push_back(lo);
      pts.push_back(hi);
    }
  out.polytope = hull_and_facets(pts);
  out.scale = lattice_scale(out.polytope);
  return out;
}

}  // namespace kstab
