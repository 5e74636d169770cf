/**
 * Lattice-point oracle. Everything here is computed by enumerating
 * λ ∈ kP⁺ ∩ Z^r and fitting polynomials in k, independently of the
 * integration module.
 *
 *   d_k = Σ H(λ)
 *   w_k = Σ H(λ) (kR − k f(λ/k))
 *   w_k / (k d_k) = F₀ + F₁/k + O(1/k²)
 */
#pragma once

#include "kstab/integration.hpp"
#include "kstab/pl_function.hpp"
#include "kstab/polynomial.hpp"
#include "kstab/polytope.hpp"
#include "kstab/rational.hpp"
#include "kstab/root_system.hpp"

#include <algorithm>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace kstab {

inline constexpr long long default_point_budget = 10'000'000;

/// Roof weight kR − k·f(λ/k).
struct Roof {
  PLFunction f;
  Rat R;
};

namespace detail {

/// Integer-coefficient copy of a polynomial: value = Σ c_e x^e / denominator.
struct IntPoly {
  std::vector<std::pair<std::vector<int>, Int>> terms;
  Int denominator = 1;
  int max_exp = 0;

  explicit IntPoly(const MPoly& g) {
    for (const auto& [e, c] : g.terms()) denominator = lcm(denominator, denom(c));
    for (const auto& [e, c] : g.terms()) {
      terms.emplace_back(e, numer(c) * (denominator / denom(c)));
      for (int a : e) max_exp = std::max(max_exp, a);
    }
  }

  /// Numerator of g(x) for integer x; powers[i][a] = x_i^a.
  Int eval(const std::vector<std::vector<Int>>& powers) const {
    Int s = 0;
    for (const auto& [e, c] : terms) {
      Int t = c;
      for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i]) t *= powers[i][e[i]];
      s += t;
    }
    return s;
  }
};

/// Range of x_last (inclusive) with normal·x >= k·offset for every facet, given the other coordinates.
inline bool last_coordinate_range(const RationalPolytope& p, const Int& k, const std::vector<Int>& prefix, Int& lo,
                                  Int& hi) {
  int r = p.ambient;
  bool have_lo = false, have_hi = false;
  for (const Facet& f : p.facets) {
    Rat rest = k * f.offset;
    for (int i = 0; i + 1 < r; ++i) rest -= Rat(f.normal[i] * prefix[i]);
    const Int& c = f.normal[r - 1];
    if (c == 0) {
      if (rest > 0) return false;
      continue;
    }
    Rat bound = rest / Rat(c);
    if (c > 0) {
      Int b = ceil_div(bound);
      if (!have_lo || b > lo) lo = b;
      have_lo = true;
    } else {
      Int b = floor_div(bound);
      if (!have_hi || b < hi) hi = b;
      have_hi = true;
    }
  }
  return have_lo && have_hi && lo <= hi;
}

/// Calls visit(prefix, lo, hi) for every nonempty column of kP ∩ Z^r.
template <class Visit>
void for_each_column(const RationalPolytope& p, const Int& k, Visit visit) {
  int r = p.ambient;
  std::vector<Int> from(r), to(r);
  for (int i = 0; i < r; ++i) {
    Rat lo = p.vertices[0][i], hi = lo;
    for (const Vec& v : p.vertices) {
      lo = std::min(lo, v[i]);
      hi = std::max(hi, v[i]);
    }
    from[i] = ceil_div(k * lo);
    to[i] = floor_div(k * hi);
  }
  std::vector<Int> prefix(from.begin(), from.end() - 1);
  if (r > 1)
    for (int i = 0; i + 1 < r; ++i)
      if (from[i] > to[i]) return;
  while (true) {
    Int lo, hi;
    if (last_coordinate_range(p, k, prefix, lo, hi)) visit(prefix, lo, hi);
    int i = r - 2;
    while (i >= 0 && prefix[i] == to[i]) {
      prefix[i] = from[i];
      --i;
    }
    if (i < 0) break;
    ++prefix[i];
  }
}

}  // namespace detail

/// |kP ∩ Z^r|, counted column by column.
inline Int lattice_point_count(const RationalPolytope& p, const Int& k) {
  Int n = 0;
  detail::for_each_column(p, k, [&](const std::vector<Int>&, const Int& lo, const Int& hi) { n += hi - lo + 1; });
  return n;
}

/// Least k-step making every summand of w_k integral: covers f, R and the vertices of every linearity cell.
inline Int required_step(const RationalPolytope& chamber, const std::optional<Roof>& roof) {
  Int step = lattice_scale(chamber);
  if (roof) {
    step = lcm(step, roof->f.denominator_bound());
    step = lcm(step, denom(roof->R));
    for (const auto& cell : subdivision_from_pl(chamber, roof->f).cells) step = lcm(step, lattice_scale(cell));
  }
  return step;
}

/**
 * Σ over λ ∈ kP ∩ Z^r of g(λ), multiplied by kR − k·f(λ/k) when a roof is
 * given. Refuses when the point count exceeds the budget.
 */
inline Rat weighted_lattice_sum(const RationalPolytope& p, const Int& k, const MPoly& g,
                                const std::optional<Roof>& roof = std::nullopt,
                                long long budget = default_point_budget) {
  if (!p.full_dimensional()) throw ValidationError("lattice sum: polytope must be full-dimensional");
  if (k <= 0) throw ValidationError("lattice sum: k must be positive");
  if (g.nvars() != p.ambient) throw std::invalid_argument("lattice sum: weight has the wrong number of variables");
  if (roof) {
    Int step = required_step(p, roof);
    if (k % step != 0)
      throw ValidationError("lattice sum: k = " + k.str() + " is not a multiple of the required step " + step.str());
  }
  Int count = lattice_point_count(p, k);
  if (count > budget)
    throw BudgetError("lattice sum: " + count.str() + " lattice points at k = " + k.str() + " exceed the budget of " +
                      std::to_string(budget));
  int r = p.ambient;
  detail::IntPoly ig(g);
  // Roof in integers: scale·(kR − max_i(k c_i + g_i·λ)).
  Int scale = 1;
  std::vector<Int> consts;
  std::vector<std::vector<Int>> grads;
  Int kR = 0;
  if (roof) {
    scale = lcm(roof->f.denominator_bound(), denom(roof->R));
    for (const auto& piece : roof->f.pieces()) {
      consts.push_back(numer(piece.constant * scale * k));
      std::vector<Int> gr;
      for (const Rat& c : piece.gradient) gr.push_back(numer(c * scale));
      grads.push_back(gr);
    }
    kR = numer(roof->R * scale * k);
  }
  Int total = 0;
  std::vector<std::vector<Int>> powers(r, std::vector<Int>(ig.max_exp + 1, Int(1)));
  detail::for_each_column(p, k, [&](const std::vector<Int>& prefix, const Int& lo, const Int& hi) {
    for (int i = 0; i + 1 < r; ++i)
      for (int a = 1; a <= ig.max_exp; ++a) powers[i][a] = powers[i][a - 1] * prefix[i];
    for (Int x = lo; x <= hi; ++x) {
      for (int a = 1; a <= ig.max_exp; ++a) powers[r - 1][a] = powers[r - 1][a - 1] * x;
      Int v = ig.eval(powers);
      if (roof) {
        if (v == 0) continue;
        Int best;
        for (std::size_t j = 0; j < consts.size(); ++j) {
          Int s = consts[j];
          for (int i = 0; i + 1 < r; ++i) s += grads[j][i] * prefix[i];
          s += grads[j][r - 1] * x;
          if (j == 0 || s > best) best = s;
        }
        v *= kR - best;
      }
      total += v;
    }
  });
  return Rat(total) / Rat(ig.denominator * scale);
}

struct Progression {
  Int start = 1;
  Int step = 1;
  int count = 0;

  Int at(int i) const { return start + step * i; }
};

/// Parses "start:step:count".
inline Progression parse_progression(const std::string& text) {
  Progression p;
  auto a = text.find(':');
  auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos) throw ParseError("progression must be start:step:count, got '" + text + "'");
  try {
    p.start = Int(text.substr(0, a));
    p.step = Int(text.substr(a + 1, b - a - 1));
    p.count = std::stoi(text.substr(b + 1));
  } catch (const std::exception&) {
    throw ParseError("progression must be start:step:count, got '" + text + "'");
  }
  if (p.start <= 0 || p.step <= 0 || p.count <= 0) throw ParseError("progression entries must be positive");
  return p;
}

struct LatticeSumSeries {
  Progression progression;
  std::vector<Sample> d_values;
  std::vector<Sample> w_values;
  UPoly fitted_d;
  std::optional<UPoly> fitted_w;
  bool d_verified = false;
  bool w_verified = true;
  int retries = 0;

  std::string serialize() const {
    std::ostringstream o;
    o << "series:\n";
    o << "  progression: " << progression.start.str() << ":" << progression.step.str() << ":" << progression.count << "\n";
    o << "  d_k:";
    for (const auto& s : d_values) o << " " << to_string(s.value);
    o << "\n  fitted_d: " << fitted_d.to_string() << "\n";
    o << "  d_verified: " << (d_verified ? "true" : "false") << "\n";
    if (fitted_w) {
      o << "  w_k:";
      for (const auto& s : w_values) o << " " << to_string(s.value);
      o << "\n  fitted_w: " << fitted_w->to_string() << "\n";
      o << "  w_verified: " << (w_verified ? "true" : "false") << "\n";
    }
    if (d_verified && w_verified) o << "  verified_from_k: " << progression.start.str() << "\n";
    o << "  retries: " << retries << "\n";
    return o.str();
  }
};

namespace detail {

template <class F>
std::vector<Rat> parallel_samples(int count, F compute) {
  std::vector<Rat> out(count);
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads == 1 || count == 1) {
    for (int i = 0; i < count; ++i) out[i] = compute(i);
    return out;
  }
  for (int base = 0; base < count; base += static_cast<int>(threads)) {
    std::vector<std::future<Rat>> jobs;
    for (int i = base; i < std::min(count, base + static_cast<int>(threads)); ++i)
      jobs.push_back(std::async(std::launch::async, compute, i));
    for (std::size_t j = 0; j < jobs.size(); ++j) out[base + j] = jobs[j].get();
  }
  return out;
}

}  // namespace detail

/**
 * Samples d_k (and w_k when a roof is given) along the progression and
 * fits polynomials of degree n and n+1, verifying on the extra samples.
 * On a mismatch the progression start moves past the sampled range and
 * the fit is retried.
 */
inline LatticeSumSeries fit_series(const RootSystemData& rs, const RationalPolytope& chamber,
                                   const std::optional<Roof>& roof, Progression prog, int max_retries = 2,
                                   long long budget = default_point_budget) {
  int n = rs.n;
  int need = roof ? n + 4 : n + 3;
  if (prog.count < need)
    throw ValidationError("fit_series: need at least " + std::to_string(need) + " samples, progression has " +
                          std::to_string(prog.count));
  Int step = required_step(chamber, roof);
  if (prog.start % step != 0 || prog.step % step != 0)
    throw ValidationError("fit_series: progression must consist of multiples of " + step.str());
  for (int attempt = 0;; ++attempt) {
    LatticeSumSeries s;
    s.progression = prog;
    s.retries = attempt;
    Int largest = lattice_point_count(chamber, prog.at(prog.count - 1));
    if (largest > budget)
      throw BudgetError("fit_series: " + largest.str() + " lattice points at the largest k exceed the budget of " +
                        std::to_string(budget));
    auto d = detail::parallel_samples(prog.count, [&](int i) { return weighted_lattice_sum(chamber, prog.at(i), rs.H, std::nullopt, budget); });
    for (int i = 0; i < prog.count; ++i) s.d_values.push_back({Rat(prog.at(i)), d[i]});
    auto fd = interpolate_univariate(s.d_values, n);
    s.fitted_d = fd.poly;
    s.d_verified = fd.extra_consistent;
    if (roof) {
      auto w = detail::parallel_samples(prog.count, [&](int i) { return weighted_lattice_sum(chamber, prog.at(i), rs.H, roof, budget); });
      for (int i = 0; i < prog.count; ++i) s.w_values.push_back({Rat(prog.at(i)), w[i]});
      auto fw = interpolate_univariate(s.w_values, n + 1);
      s.fitted_w = fw.poly;
      s.w_verified = fw.extra_consistent;
    }
    if ((s.d_verified && s.w_verified) || attempt >= max_retries) {
      if (!s.d_verified || !s.w_verified)
        throw ValidationError("fit_series: extra samples disagree with the fitted polynomial after " +
                              std::to_string(attempt) + " retries (quasi-polynomial behaviour or wrong degree)");
      return s;
    }
    prog.start = prog.at(prog.count);
  }
}

struct OracleFutaki {
  LatticeSumSeries series;
  Rat F0;
  Rat F1;
};

/// F₀ and F₁ of w_k / (k d_k) from the fitted polynomials.
inline OracleFutaki oracle_futaki(const RootSystemData& rs, const RationalPolytope& chamber, const PLFunction& f,
                                  const Rat& R, const Progression& prog, long long budget = default_point_budget) {
  Rat top = pl_max_on(chamber, f);
  if (R < top) throw ValidationError("oracle: R = " + to_string(R) + " is below max f = " + to_string(top));
  OracleFutaki o{fit_series(rs, chamber, Roof{f, R}, prog, 2, budget), 0, 0};
  int n = rs.n;
  const UPoly& d = o.series.fitted_d;
  const UPoly& w = *o.series.fitted_w;
  if (d.coeff(n) == 0) throw ValidationError("oracle: fitted d_k has vanishing leading coefficient");
  o.F0 = w.coeff(n + 1) / d.coeff(n);
  o.F1 = (w.coeff(n) - o.F0 * d.coeff(n - 1)) / d.coeff(n);
  return o;
}

/// Default progression for an instance: multiples of the required step, enough samples for w.
inline Progression default_progression(const RootSystemData& rs, const RationalPolytope& chamber,
                                       const std::optional<Roof>& roof) {
  Int step = required_step(chamber, roof);
  return {step, step, rs.n + 5};
}

struct LemmaReport {
  UPoly fitted;
  bool verified = false;
  Rat top_fitted, top_exact;
  Rat second_fitted, second_exact;

  bool passed() const { return verified && top_fitted == top_exact && second_fitted == second_exact; }

  std::string serialize() const {
    std::ostringstream o;
    o << "lemma:\n";
    o << "  fitted: " << fitted.to_string() << "\n";
    o << "  verified: " << (verified ? "true" : "false") << "\n";
    o << "  top: " << to_string(top_fitted) << " exact " << to_string(top_exact) << "\n";
    o << "  second: " << to_string(second_fitted) << " exact " << to_string(second_exact) << "\n";
    o << "  result: " << (passed() ? "pass" : "fail") << "\n";
    return o.str();
  }
};

/**
 * For a lattice polytope P and homogeneous g of degree d, fits Σ_{kP} g and
 * compares the top two coefficients with ∫_P g dμ and ½∫_∂P g dσ.
 */
inline LemmaReport lemma_check(const RationalPolytope& p, const MPoly& g, long long budget = default_point_budget) {
  if (!p.full_dimensional()) throw ValidationError("lemma_check: polytope must be full-dimensional");
  if (!p.is_lattice()) throw ValidationError("lemma_check: polytope must have lattice vertices");
  int d = g.total_degree();
  if (g.homogeneous_part(d) != g) throw ValidationError("lemma_check: weight must be homogeneous");
  int deg = p.ambient + d;
  int count = deg + 3;
  std::vector<Sample> samples;
  auto vals = detail::parallel_samples(count, [&](int i) { return weighted_lattice_sum(p, Int(i + 1), g, std::nullopt, budget); });
  for (int i = 0; i < count; ++i) samples.push_back({Rat(i + 1), vals[i]});
  auto fit = interpolate_univariate(samples, deg);
  LemmaReport r;
  r.fitted = fit.poly;
  r.verified = fit.extra_consistent;
  r.top_fitted = fit.poly.coeff(deg);
  r.second_fitted = fit.poly.coeff(deg - 1);
  r.top_exact = integrate_poly(p, g);
  r.second_exact = boundary_integral(p, g, BoundarySelector::all) / 2;
  return r;
}

}  // namespace kstab
