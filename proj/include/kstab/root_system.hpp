/**
 * Root systems of type A (and the trivial "toric" case) in fundamental-weight
 * coordinates of the simply connected group.
 *
 * In these coordinates the closed positive chamber is the nonnegative
 * orthant, the simple reflection s_i acts by λ ↦ λ - λ_i α_i with α_i the
 * i-th row of the Cartan matrix, and the positive coroot α_ij (i < j) pairs
 * with λ as λ_i + ... + λ_{j-1}.
 */
#pragma once

#include "kstab/linalg.hpp"
#include "kstab/polynomial.hpp"
#include "kstab/rational.hpp"

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace kstab {

struct RootSystemData {
  std::string label;
  int rank = 0;
  /// Positive coroots as linear forms on the weight lattice.
  std::vector<Vec> positive_coroots;
  /// ⟨ρ, α∨⟩ for each positive coroot.
  std::vector<Rat> rho_pairings;
  /// Simple reflections in lattice coordinates.
  std::vector<RatMatrix> weyl_generators;
  /// Λ_R⁺ = {x : w·x >= 0 for every wall normal w}.
  std::vector<Vec> wall_normals;
  MPoly h;      ///< Weyl dimension polynomial
  MPoly H;      ///< h²
  MPoly H_top;  ///< H_d
  MPoly H_sub;  ///< H_{d-1}
  int d = 0;    ///< degree of H
  int n = 0;    ///< rank + d (complex dimension of the compactification)

  bool is_toric() const { return positive_coroots.empty(); }
};

namespace detail {

inline RootSystemData build_type_a(int rank, std::string label) {
  RootSystemData rs;
  rs.label = std::move(label);
  rs.rank = rank;
  for (int i = 0; i < rank; ++i) {
    Vec w(rank, Rat(0));
    w[i] = 1;
    rs.wall_normals.push_back(w);
  }
  // Cartan matrix of A_rank.
  auto cartan = [rank](int i, int j) -> int {
    if (i == j) return 2;
    return (i - j == 1 || j - i == 1) ? -1 : 0;
  };
  for (int i = 0; i < rank; ++i) {
    RatMatrix s = RatMatrix::identity(rank);
    // s_i(λ)_j = λ_j - λ_i * cartan(i, j)
    for (int j = 0; j < rank; ++j) s(j, i) -= cartan(i, j);
    rs.weyl_generators.push_back(s);
  }
  rs.h = MPoly::constant(rank, 1);
  for (int i = 0; i < rank; ++i)
    for (int j = i + 1; j <= rank; ++j) {
      Vec form(rank, Rat(0));
      for (int l = i; l < j; ++l) form[l] = 1;
      Rat rho = j - i;
      rs.positive_coroots.push_back(form);
      rs.rho_pairings.push_back(rho);
      rs.h = rs.h * MPoly::affine(rho / rho, (1 / rho) * form);
    }
  return rs;
}

inline void finish(RootSystemData& rs) {
  rs.H = rs.h * rs.h;
  rs.d = rs.H.total_degree();
  rs.H_top = rs.H.homogeneous_part(rs.d);
  rs.H_sub = rs.d >= 1 ? rs.H.homogeneous_part(rs.d - 1) : MPoly(rs.rank);
  rs.n = rs.rank + rs.d;
}

}  // namespace detail

/// Labels: "toric:r" (r = 1..3), "A1", "A2", "A3".
inline RootSystemData build_root_system(const std::string& label) {
  RootSystemData rs;
  if (label.rfind("toric:", 0) == 0 || label.rfind("Trivial(", 0) == 0) {
    std::string digits = label.substr(label[0] == 't' ? 6 : 8);
    if (!digits.empty() && digits.back() == ')') digits.pop_back();
    int r = 0;
    try {
      r = std::stoi(digits);
    } catch (const std::exception&) {
      throw ValidationError("unsupported root system label '" + label + "'");
    }
    if (r < 1 || r > 3) throw ValidationError("toric rank must be 1..3 in '" + label + "'");
    rs.label = "toric:" + std::to_string(r);
    rs.rank = r;
    rs.h = MPoly::constant(r, 1);
  } else if (label == "A1" || label == "A2" || label == "A3") {
    rs = detail::build_type_a(label[1] - '0', label);
  } else {
    throw ValidationError("unsupported root system label '" + label + "'");
  }
  detail::finish(rs);
  return rs;
}

/// All elements of W, generated by closure of the simple reflections. Identity first.
inline std::vector<RatMatrix> weyl_group(const RootSystemData& rs) {
  std::vector<RatMatrix> elems{RatMatrix::identity(rs.rank)};
  std::set<RatMatrix> seen(elems.begin(), elems.end());
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (const RatMatrix& g : rs.weyl_generators) {
      RatMatrix p = g * elems[i];
      if (seen.insert(p).second) elems.push_back(p);
    }
  return elems;
}

/// Orbit of a point under W, sorted lexicographically.
inline std::vector<Vec> weyl_orbit(const RootSystemData& rs, const Vec& point) {
  if (static_cast<int>(point.size()) != rs.rank) throw std::invalid_argument("weyl_orbit: point dimension mismatch");
  std::set<Vec> orbit{point};
  std::vector<Vec> frontier{point};
  while (!frontier.empty()) {
    Vec p = frontier.back();
    frontier.pop_back();
    for (const RatMatrix& g : rs.weyl_generators) {
      Vec q = g * p;
      if (orbit.insert(q).second) frontier.push_back(q);
    }
  }
  return {orbit.begin(), orbit.end()};
}

inline bool in_closed_chamber(const RootSystemData& rs, const Vec& x) {
  for (const Vec& w : rs.wall_normals)
    if (dot(w, x) < 0) return false;
  return true;
}

inline bool in_open_chamber(const RootSystemData& rs, const Vec& x) {
  for (const Vec& w : rs.wall_normals)
    if (dot(w, x) <= 0) return false;
  return true;
}

/// H(λ) = dim End E_λ for λ in the closed positive chamber.
inline Rat multiplicity_at(const RootSystemData& rs, const Vec& lambda) {
  if (static_cast<int>(lambda.size()) != rs.rank) throw std::invalid_argument("multiplicity_at: dimension mismatch");
  if (!in_closed_chamber(rs, lambda)) throw ValidationError("multiplicity_at: point outside the closed chamber");
  return rs.H.eval(lambda);
}

}  // namespace kstab
