/**
 * Closed-form stability quantities on P⁺ = P ∩ (positive chamber).
 *
 *   a       = (∫_∂ H_top dσ + 2∫ H_sub dμ) / ∫ H_top dμ
 *   bracket = ∫_∂ f H_top dσ + 2∫ f H_sub dμ − a ∫ f H_top dμ
 *   −F₁     = bracket / (2 ∫ H_top dμ)
 *
 * ∂ means the outer facets of P⁺ (those lying in ∂P) unless another
 * boundary selector is requested.
 */
#pragma once

#include "kstab/integration.hpp"
#include "kstab/pl_function.hpp"
#include "kstab/polytope.hpp"
#include "kstab/rational.hpp"
#include "kstab/root_system.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace kstab {

/// The f-independent integrals of an instance, computed once.
struct ChamberData {
  RootSystemData rs;
  RationalPolytope chamber;  ///< P⁺
  Rat volume_top;            ///< C = ∫ H_top dμ
  Rat volume_sub;            ///< ∫ H_sub dμ
  Rat boundary_top;          ///< ∫_∂ H_top dσ
  Rat a;
  BoundarySelector boundary = BoundarySelector::outer;
};

inline ChamberData chamber_data(const RootSystemData& rs, const RationalPolytope& chamber,
                                BoundarySelector boundary = BoundarySelector::outer) {
  ChamberData c{rs, chamber, 0, 0, 0, 0, boundary};
  c.volume_top = integrate_poly(chamber, rs.H_top);
  if (c.volume_top <= 0) throw ValidationError("average_a: ∫ H_top dμ vanishes on this polytope");
  c.volume_sub = integrate_poly(chamber, rs.H_sub);
  c.boundary_top = boundary_integral(chamber, rs.H_top, boundary);
  c.a = (c.boundary_top + 2 * c.volume_sub) / c.volume_top;
  return c;
}

inline Rat average_a(const RootSystemData& rs, const RationalPolytope& chamber) { return chamber_data(rs, chamber).a; }

/// The three f-weighted integrals entering the bracket.
struct WeightedIntegrals {
  Rat top;       ///< ∫ f H_top dμ
  Rat sub;       ///< ∫ f H_sub dμ
  Rat boundary;  ///< ∫_∂ f H_top dσ
};

inline WeightedIntegrals weighted_integrals(const ChamberData& c, const PLFunction& f) {
  WeightedIntegrals w{0, 0, 0};
  PolyComplex cx = subdivision_from_pl(c.chamber, f);
  for (std::size_t i = 0; i < cx.cells.size(); ++i) {
    const AffinePiece& l = f.pieces()[cx.active_piece[i]];
    if (l.is_zero()) continue;
    const RationalPolytope& cell = cx.cells[i];
    MPoly lp = MPoly::affine(l.constant, l.gradient);
    MPoly ft = lp * c.rs.H_top;
    w.top += integrate_poly(cell, ft);
    if (!c.rs.H_sub.is_zero()) w.sub += integrate_poly(cell, lp * c.rs.H_sub);
    w.boundary += boundary_integral(cell, ft, c.boundary);
  }
  return w;
}

inline Rat bracket_from(const ChamberData& c, const WeightedIntegrals& w) { return w.boundary + 2 * w.sub - c.a * w.top; }

inline Rat stability_bracket(const ChamberData& c, const PLFunction& f) { return bracket_from(c, weighted_integrals(c, f)); }

inline Rat stability_bracket(const RootSystemData& rs, const RationalPolytope& chamber, const PLFunction& f) {
  return stability_bracket(chamber_data(rs, chamber), f);
}

inline Rat futaki_minus_F1(const ChamberData& c, const PLFunction& f) { return stability_bracket(c, f) / (2 * c.volume_top); }

inline Rat futaki_minus_F1(const RootSystemData& rs, const RationalPolytope& chamber, const PLFunction& f) {
  return futaki_minus_F1(chamber_data(rs, chamber), f);
}

/// Toric bracket ∫_∂P f dσ − a ∫_P f dμ with a = |∂P|/|P|, computed without H.
inline Rat toric_bracket(const RationalPolytope& p, const PLFunction& f) {
  int r = p.ambient;
  MPoly one = MPoly::constant(r, 1);
  Rat a = boundary_integral(p, one, BoundarySelector::all) / integrate_poly(p, one);
  Rat bd = 0, vol = 0;
  PolyComplex cx = subdivision_from_pl(p, f);
  for (std::size_t i = 0; i < cx.cells.size(); ++i) {
    const AffinePiece& l = f.pieces()[cx.active_piece[i]];
    MPoly lp = MPoly::affine(l.constant, l.gradient);
    vol += integrate_poly(cx.cells[i], lp);
    for (const Facet& fc : cx.cells[i].facets)
      if (fc.tag != FacetTag::crease) bd += face_integral(facet_points(cx.cells[i], fc), lp);
  }
  return bd - a * vol;
}

struct ABCD {
  Rat A, B, C, D;
  Rat ad_minus_bc_over_c2;
};

inline ABCD abcd_from(const ChamberData& c, const WeightedIntegrals& w, const Rat& roof) {
  ABCD r;
  r.C = c.volume_top;
  r.D = c.boundary_top / 2 + c.volume_sub;
  r.A = roof * r.C - w.top;
  r.B = roof * r.D - (w.boundary / 2 + w.sub);
  r.ad_minus_bc_over_c2 = (r.A * r.D - r.B * r.C) / (r.C * r.C);
  return r;
}

inline ABCD abcd_coefficients(const RootSystemData& rs, const RationalPolytope& chamber, const PLFunction& f,
                              const Rat& roof) {
  ChamberData c = chamber_data(rs, chamber);
  Rat top = pl_max_on(chamber, f);
  if (roof < top) throw ValidationError("abcd: R = " + to_string(roof) + " is below max f = " + to_string(top));
  return abcd_from(c, weighted_integrals(c, f), roof);
}

struct DensitySample {
  Vec point;
  int sign;
};

struct DensityScan {
  std::vector<DensitySample> samples;
  Rat fraction_negative;
  std::vector<DensitySample> outer_vertices;  ///< vertices of P⁺ off the walls
};

/// Sign of 2·H_sub − a·H_top on the grid (step·Z)^r ∩ P⁺ and at the outer vertices.
inline DensityScan density_sign_scan(const ChamberData& c, const Rat& step) {
  if (step <= 0) throw ValidationError("density: grid step must be positive");
  const RationalPolytope& p = c.chamber;
  int r = p.ambient;
  MPoly density = Rat(2) * c.rs.H_sub - c.a * c.rs.H_top;
  Vec lo = p.vertices[0], hi = p.vertices[0];
  for (const Vec& v : p.vertices)
    for (int i = 0; i < r; ++i) {
      lo[i] = std::min(lo[i], v[i]);
      hi[i] = std::max(hi[i], v[i]);
    }
  std::vector<Int> from(r), to(r);
  for (int i = 0; i < r; ++i) {
    from[i] = ceil_div(lo[i] / step);
    to[i] = floor_div(hi[i] / step);
  }
  DensityScan out;
  std::vector<Int> idx = from;
  std::size_t negative = 0;
  while (true) {
    Vec x(r);
    for (int i = 0; i < r; ++i) x[i] = step * Rat(idx[i]);
    if (p.contains(x)) {
      int s = sign(density.eval(x));
      out.samples.push_back({x, s});
      negative += s < 0;
    }
    int k = r - 1;
    while (k >= 0 && idx[k] == to[k]) {
      idx[k] = from[k];
      --k;
    }
    if (k < 0) break;
    ++idx[k];
  }
  out.fraction_negative = out.samples.empty() ? Rat(0) : Rat(static_cast<long>(negative)) / Rat(static_cast<long>(out.samples.size()));
  for (const Vec& v : p.vertices)
    if (in_open_chamber(c.rs, v))
      out.outer_vertices.push_back({v, sign(density.eval(v))});
  return out;
}

enum class Verdict { destabilizing, non_negative, zero };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::destabilizing: return "destabilizing";
    case Verdict::non_negative: return "non-negative";
    case Verdict::zero: return "zero";
  }
  return "?";
}

inline Verdict verdict_of(const Rat& bracket) {
  if (bracket < 0) return Verdict::destabilizing;
  return bracket == 0 ? Verdict::zero : Verdict::non_negative;
}

struct StabilityReport {
  std::string root_system;
  int rank = 0;
  Rat a;
  Rat volume_top;
  Rat bracket;
  Rat minus_F1;
  Rat mabuchi_coeff;  ///< multiply by (2π)^rank for the Mabuchi linear part
  Rat roof;
  ABCD abcd;
  Verdict verdict = Verdict::zero;
  std::vector<std::string> notes;

  std::string serialize() const {
    std::ostringstream o;
    o << "report:\n";
    o << "  root_system: " << root_system << "\n";
    o << "  a: " << to_string(a) << "\n";
    o << "  integral_H_top: " << to_string(volume_top) << "\n";
    o << "  bracket: " << to_string(bracket) << "\n";
    o << "  minus_F1: " << to_string(minus_F1) << "\n";
    o << "  mabuchi_linear_part: " << to_string(mabuchi_coeff) << " × (2π)^" << rank << "\n";
    o << "  abcd:\n";
    o << "    R: " << to_string(roof) << "\n";
    o << "    A: " << to_string(abcd.A) << "\n";
    o << "    B: " << to_string(abcd.B) << "\n";
    o << "    C: " << to_string(abcd.C) << "\n";
    o << "    D: " << to_string(abcd.D) << "\n";
    o << "    (AD-BC)/C^2: " << to_string(abcd.ad_minus_bc_over_c2) << "\n";
    o << "  notes:\n";
    for (const auto& n : notes) o << "    - " << n << "\n";
    o << "VERDICT: " << to_string(verdict) << "\n";
    return o.str();
  }
};

/**
 * Full report for a W-invariant polytope P and W-invariant convex PL f.
 * Without an explicit roof, R = max f on P⁺.
 */
inline StabilityReport csc_verdict(const RootSystemData& rs, const RationalPolytope& p, const PLFunction& f,
                                   std::optional<Rat> roof = std::nullopt,
                                   BoundarySelector boundary = BoundarySelector::outer) {
  auto inv = is_w_invariant(rs, p);
  if (!inv.invariant)
    throw ValidationError("P is not W-invariant: vertex (" + to_string(*inv.witness_vertex, ",") +
                          ") is moved off the vertex set by generator " + std::to_string(inv.witness_generator));
  if (!is_w_invariant_pl(rs, f, p)) throw ValidationError("f is not W-invariant on P");
  ChamberData c = chamber_data(rs, chamber_intersect(rs, p), boundary);
  WeightedIntegrals w = weighted_integrals(c, f);
  StabilityReport rep;
  rep.root_system = rs.label;
  rep.rank = rs.rank;
  rep.a = c.a;
  rep.volume_top = c.volume_top;
  rep.bracket = bracket_from(c, w);
  rep.minus_F1 = rep.bracket / (2 * c.volume_top);
  rep.mabuchi_coeff = rep.bracket;
  Rat top = pl_max_on(c.chamber, f);
  rep.roof = roof.value_or(top);
  if (rep.roof < top) throw ValidationError("R = " + to_string(rep.roof) + " is below max f = " + to_string(top));
  rep.abcd = abcd_from(c, w, rep.roof);
  rep.verdict = verdict_of(rep.bracket);
  rep.notes.push_back(std::string("boundary integrals run over the ") + to_string(boundary) + " facets of P+");
  rep.notes.push_back("the test function is piecewise linear; it stands in for a smooth convex function by approximation");
  if (rep.verdict == Verdict::destabilizing)
    rep.notes.push_back("bracket < 0: the Mabuchi functional is unbounded below on invariant metrics, so no constant "
                        "scalar curvature Kahler metric exists in this class");
  return rep;
}

}  // namespace kstab
