/**
 * Exact integration of polynomials over rational polytopes.
 *
 * dμ is Lebesgue measure in lattice coordinates. On a face F, dσ is the
 * Euclidean measure normalized by the lattice Λ ∩ R·F, so a fundamental
 * cell of that lattice has volume 1; no square roots ever appear.
 */
#pragma once

#include "kstab/linalg.hpp"
#include "kstab/polynomial.hpp"
#include "kstab/polytope.hpp"
#include "kstab/rational.hpp"

#include <stdexcept>
#include <vector>

namespace kstab {

using Simplex = std::vector<Vec>;

struct SimplexDecomposition {
  std::vector<Simplex> simplices;
  Vec pulled_from;
};

namespace detail {

inline std::vector<Simplex> pull_face(const RationalPolytope& p, const std::vector<Face>& lattice,
                                      const Face& face, int preferred) {
  if (face.dim == 0) return {{p.vertices[face.vertices[0]]}};
  int apex = face.vertices[0];
  if (preferred >= 0 && std::binary_search(face.vertices.begin(), face.vertices.end(), preferred)) apex = preferred;
  if (face.dim == 1) return {{p.vertices[face.vertices[0]], p.vertices[face.vertices[1]]}};
  std::vector<Simplex> out;
  for (const Face& g : lattice) {
    if (g.dim != face.dim - 1) continue;
    if (!std::includes(face.vertices.begin(), face.vertices.end(), g.vertices.begin(), g.vertices.end())) continue;
    if (std::binary_search(g.vertices.begin(), g.vertices.end(), apex)) continue;
    for (Simplex s : pull_face(p, lattice, g, -1)) {
      s.insert(s.begin(), p.vertices[apex]);
      out.push_back(std::move(s));
    }
  }
  return out;
}

inline Rat factorial(int n) {
  Rat f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// ∫ over the standard k-simplex of a polynomial in k variables.
inline Rat integrate_standard_simplex(const MPoly& g) {
  int k = g.nvars();
  Rat total = 0;
  for (const auto& [e, c] : g.terms()) {
    Rat num = 1;
    int deg = 0;
    for (int a : e) {
      num *= factorial(a);
      deg += a;
    }
    total += c * num / factorial(k + deg);
  }
  return total;
}

}  // namespace detail

/**
 * Pulling triangulation of a full-dimensional polytope. The apex is the
 * lexicographically smallest vertex unless another vertex index is given.
 */
inline SimplexDecomposition triangulate(const RationalPolytope& p, int pull_vertex = -1) {
  if (!p.full_dimensional()) throw std::invalid_argument("triangulate: polytope must be full-dimensional");
  SimplexDecomposition d;
  int apex = 0;
  if (pull_vertex >= 0) {
    apex = pull_vertex;
  } else {
    for (std::size_t i = 1; i < p.vertices.size(); ++i)
      if (p.vertices[i] < p.vertices[apex]) apex = static_cast<int>(i);
  }
  d.pulled_from = p.vertices[apex];
  int m = static_cast<int>(p.vertices.size());
  if (p.ambient == 1) {
    d.simplices.push_back({p.vertices[0], p.vertices[1]});
  } else if (p.ambient == 2) {
    for (int j = 1; j + 1 < m; ++j)
      d.simplices.push_back({p.vertices[apex], p.vertices[(apex + j) % m], p.vertices[(apex + j + 1) % m]});
  } else {
    auto lattice = face_lattice(p);
    d.simplices = detail::pull_face(p, lattice, lattice.back(), apex);
  }
  return d;
}

/// ∫_S g dμ over a full-dimensional simplex S (k+1 points in R^k).
inline Rat integrate_simplex(const Simplex& s, const MPoly& g) {
  int k = static_cast<int>(s.size()) - 1;
  if (k < 1 || static_cast<int>(s[0].size()) != k) throw std::invalid_argument("integrate_simplex: not a full simplex");
  std::vector<Vec> jac(k, Vec(k));
  RatMatrix j(k, k);
  for (int col = 0; col < k; ++col)
    for (int row = 0; row < k; ++row) {
      jac[row][col] = s[col + 1][row] - s[0][row];
      j(row, col) = jac[row][col];
    }
  Rat det = abs(determinant(j));
  if (det == 0) return 0;
  return det * detail::integrate_standard_simplex(g.affine_substitute(jac, s[0]));
}

/// ∫_P g dμ.
inline Rat integrate_poly(const RationalPolytope& p, const MPoly& g, int pull_vertex = -1) {
  if (g.nvars() != p.ambient) throw std::invalid_argument("integrate_poly: variable count differs from dimension");
  if (g.is_zero()) return 0;
  Rat total = 0;
  for (const Simplex& s : triangulate(p, pull_vertex).simplices) total += integrate_simplex(s, g);
  return total;
}

/**
 * ∫_F g dσ for the face spanned by the given points. The face is charted by
 * an integral point of its affine hull and a basis of Λ ∩ R·F.
 */
inline Rat face_integral(const std::vector<Vec>& face_points, const MPoly& g) {
  if (face_points.empty()) throw std::invalid_argument("face_integral: empty face");
  int r = static_cast<int>(face_points[0].size());
  std::vector<Vec> diffs;
  for (std::size_t i = 1; i < face_points.size(); ++i) diffs.push_back(face_points[i] - face_points[0]);
  int k = rank(diffs);
  if (k == 0) return g.eval(face_points[0]);
  auto anchor = lattice_point_on_affine_hull(face_points[0], diffs);
  if (!anchor) throw ValidationError("face_integral: the affine hull of the face contains no lattice point");
  auto basis = saturated_lattice_basis(diffs, r);
  Vec p = to_vec(*anchor);
  RatMatrix b(r, k);
  std::vector<Vec> jac(r, Vec(k));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < k; ++j) {
      b(i, j) = basis[j][i];
      jac[i][j] = basis[j][i];
    }
  std::vector<Vec> chart;
  for (const Vec& v : face_points) chart.push_back(*solve(b, v - p));
  RationalPolytope local = hull_and_facets(chart);
  return integrate_poly(local, g.affine_substitute(jac, p));
}

enum class BoundarySelector { outer, wall, all };

inline const char* to_string(BoundarySelector s) {
  switch (s) {
    case BoundarySelector::outer: return "outer";
    case BoundarySelector::wall: return "wall";
    case BoundarySelector::all: return "all";
  }
  return "?";
}

inline std::vector<Vec> facet_points(const RationalPolytope& p, const Facet& f) {
  std::vector<Vec> pts;
  for (int i : f.vertices) pts.push_back(p.vertices[i]);
  return pts;
}

/// Σ over facets matching the selector of ∫_F g dσ. Crease facets are
/// interior to a subdivision and never count.
inline Rat boundary_integral(const RationalPolytope& p, const MPoly& g, BoundarySelector sel) {
  Rat total = 0;
  if (g.is_zero()) return total;
  for (const Facet& f : p.facets) {
    if (f.tag == FacetTag::crease) continue;
    bool take = sel == BoundarySelector::all || (sel == BoundarySelector::outer) == (f.tag == FacetTag::outer);
    if (take) total += face_integral(facet_points(p, f), g);
  }
  return total;
}

}  // namespace kstab
