/**
 * Multivariate and univariate polynomials with rational coefficients.
 */
#pragma once

#include "kstab/rational.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kstab {

using Exponent = std::vector<int>;

/**
 * Polynomial in a fixed number of variables. Terms are keyed by dense
 * exponent vectors; zero coefficients are never stored.
 */
class MPoly {
 public:
  MPoly() = default;
  explicit MPoly(int nvars) : nvars_(nvars) {}

  static MPoly constant(int nvars, const Rat& c) {
    MPoly p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
  }

  static MPoly variable(int nvars, int index) {
    MPoly p(nvars);
    Exponent e(nvars, 0);
    e.at(index) = 1;
    p.add_term(e, 1);
    return p;
  }

  /// c + g·x
  static MPoly affine(const Rat& c, const Vec& gradient) {
    int n = static_cast<int>(gradient.size());
    MPoly p = constant(n, c);
    for (int i = 0; i < n; ++i) p += gradient[i] * variable(n, i);
    return p;
  }

  int nvars() const { return nvars_; }
  const std::map<Exponent, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Exponent& e, const Rat& c) {
    if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("MPoly: exponent length mismatch");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Rat coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rat(0) : it->second;
  }

  int total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, degree_of(e));
    return d;
  }

  MPoly& operator+=(const MPoly& q) {
    check_compatible(q);
    for (const auto& [e, c] : q.terms_) add_term(e, c);
    return *this;
  }

  MPoly& operator-=(const MPoly& q) {
    check_compatible(q);
    for (const auto& [e, c] : q.terms_) add_term(e, -c);
    return *this;
  }

  friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
  friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }

  friend MPoly operator*(const MPoly& a, const MPoly& b) {
    a.check_compatible(b);
    MPoly r(a.nvars_);
    Exponent e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, ca * cb);
      }
    return r;
  }

  friend MPoly operator*(const Rat& s, const MPoly& p) {
    MPoly r(p.nvars_);
    if (s == 0) return r;
    for (const auto& [e, c] : p.terms_) r.terms_.emplace(e, s * c);
    return r;
  }

  friend bool operator==(const MPoly& a, const MPoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  Rat eval(const Vec& x) const {
    if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("MPoly::eval: point dimension mismatch");
    // Powers are cached per variable; degrees here stay small.
    std::vector<std::vector<Rat>> powers(nvars_);
    int deg = std::max(total_degree(), 0);
    for (int i = 0; i < nvars_; ++i) {
      powers[i].resize(deg + 1);
      powers[i][0] = 1;
      for (int k = 1; k <= deg; ++k) powers[i][k] = powers[i][k - 1] * x[i];
    }
    Rat s = 0;
    for (const auto& [e, c] : terms_) {
      Rat t = c;
      for (int i = 0; i < nvars_; ++i)
        if (e[i]) t *= powers[i][e[i]];
      s += t;
    }
    return s;
  }

  /// Sum of the terms of total degree exactly d.
  MPoly homogeneous_part(int d) const {
    if (d < 0) throw std::invalid_argument("homogeneous_part: negative degree");
    MPoly r(nvars_);
    for (const auto& [e, c] : terms_)
      if (degree_of(e) == d) r.terms_.emplace(e, c);
    return r;
  }

  MPoly pow(int k) const {
    MPoly r = constant(nvars_, 1);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  /**
   * Composition p(M y + b) for a rational matrix M (nvars rows, m columns)
   * and offset b; the result is a polynomial in m variables.
   */
  MPoly affine_substitute(const std::vector<Vec>& matrix, const Vec& offset) const {
    if (static_cast<int>(matrix.size()) != nvars_ || static_cast<int>(offset.size()) != nvars_)
      throw std::invalid_argument("affine_substitute: map does not match variable count");
    int m = matrix.empty() ? 0 : static_cast<int>(matrix[0].size());
    for (const Vec& row : matrix)
      if (static_cast<int>(row.size()) != m) throw std::invalid_argument("affine_substitute: ragged matrix");
    std::vector<MPoly> images;
    images.reserve(nvars_);
    for (int i = 0; i < nvars_; ++i) images.push_back(affine(offset[i], matrix[i]));
    return compose(images, m);
  }

  /// Substitutes variable i by images[i] (all polynomials in m variables).
  MPoly compose(const std::vector<MPoly>& images, int m) const {
    if (static_cast<int>(images.size()) != nvars_) throw std::invalid_argument("compose: wrong number of images");
    int deg = std::max(total_degree(), 0);
    std::vector<std::vector<MPoly>> powers(nvars_);
    for (int i = 0; i < nvars_; ++i) {
      if (images[i].nvars() != m) throw std::invalid_argument("compose: image variable count mismatch");
      powers[i].push_back(constant(m, 1));
      for (int k = 1; k <= deg; ++k) powers[i].push_back(powers[i].back() * images[i]);
    }
    MPoly r(m);
    for (const auto& [e, c] : terms_) {
      MPoly t = constant(m, c);
      for (int i = 0; i < nvars_; ++i)
        if (e[i]) t = t * powers[i][e[i]];
      r += t;
    }
    return r;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    static const char* names[] = {"x", "y", "z", "w"};
    std::string s;
    // Highest degree first reads more naturally.
    std::vector<std::pair<Exponent, Rat>> sorted(terms_.begin(), terms_.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      return degree_of(a.first) > degree_of(b.first);
    });
    for (const auto& [e, c] : sorted) {
      Rat mag = abs(c);
      if (s.empty()) {
        if (c < 0) s += "-";
      } else {
        s += c < 0 ? " - " : " + ";
      }
      bool is_const = degree_of(e) == 0;
      std::string mono;
      for (int i = 0; i < nvars_; ++i) {
        if (!e[i]) continue;
        if (!mono.empty()) mono += "*";
        mono += nvars_ <= 4 ? names[i] : ("x" + std::to_string(i));
        if (e[i] > 1) mono += "^" + std::to_string(e[i]);
      }
      if (is_const || mag != 1) {
        s += kstab::to_string(mag);
        if (!is_const) s += "*";
      }
      s += mono;
    }
    return s;
  }

 private:
  static int degree_of(const Exponent& e) {
    int d = 0;
    for (int k : e) d += k;
    return d;
  }

  void check_compatible(const MPoly& q) const {
    if (q.nvars_ != nvars_) throw std::invalid_argument("MPoly: variable-count mismatch");
  }

  int nvars_ = 0;
  std::map<Exponent, Rat> terms_;
};

/// Dense univariate polynomial, coefficients in increasing degree.
struct UPoly {
  std::vector<Rat> coeffs;

  int degree() const {
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
      if (coeffs[i] != 0) return i;
    return -1;
  }

  Rat coeff(int i) const { return i >= 0 && i < static_cast<int>(coeffs.size()) ? coeffs[i] : Rat(0); }

  Rat eval(const Rat& k) const {
    Rat s = 0;
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) s = s * k + coeffs[i];
    return s;
  }

  friend bool operator==(const UPoly& a, const UPoly& b) {
    int d = std::max(a.degree(), b.degree());
    for (int i = 0; i <= d; ++i)
      if (a.coeff(i) != b.coeff(i)) return false;
    return true;
  }

  std::string to_string(const char* var = "k") const {
    std::string s;
    for (int i = degree(); i >= 0; --i) {
      const Rat& c = coeffs[i];
      if (c == 0) continue;
      if (s.empty()) {
        if (c < 0) s += "-";
      } else {
        s += c < 0 ? " - " : " + ";
      }
      Rat mag = abs(c);
      if (i == 0 || mag != 1) s += kstab::to_string(mag) + (i ? "*" : "");
      if (i >= 1) s += var;
      if (i > 1) s += "^" + std::to_string(i);
    }
    return s.empty() ? "0" : s;
  }
};

struct Sample {
  Rat k;
  Rat value;
};

struct Interpolation {
  UPoly poly;
  /// True when every sample beyond the first degree+1 lies on poly.
  bool extra_consistent = true;
  /// Index of the first sample that failed verification, if any.
  std::optional<std::size_t> first_mismatch;
};

/**
 * Exact polynomial of degree <= degree through the first degree+1 samples
 * (Newton divided differences), then checks the remaining samples.
 */
inline Interpolation interpolate_univariate(const std::vector<Sample>& samples, int degree) {
  if (degree < 0) throw std::invalid_argument("interpolate_univariate: negative degree");
  std::size_t need = static_cast<std::size_t>(degree) + 1;
  if (samples.size() < need) throw std::invalid_argument("interpolate_univariate: too few samples");
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j)
      if (samples[i].k == samples[j].k) throw std::invalid_argument("interpolate_univariate: duplicate abscissae");

  std::vector<Rat> dd(need);
  for (std::size_t i = 0; i < need; ++i) dd[i] = samples[i].value;
  for (std::size_t level = 1; level < need; ++level)
    for (std::size_t i = need - 1; i >= level; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / (samples[i].k - samples[i - level].k);
      if (i == level) break;
    }

  // Expand the Newton form into monomial coefficients.
  std::vector<Rat> poly{dd[need - 1]};
  for (std::size_t step = need - 1; step-- > 0;) {
    const Rat& xk = samples[step].k;
    std::vector<Rat> next(poly.size() + 1, Rat(0));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= xk * poly[i];
    }
    next[0] += dd[step];
    poly = std::move(next);
  }

  Interpolation out;
  out.poly.coeffs = std::move(poly);
  for (std::size_t i = need; i < samples.size(); ++i)
    if (out.poly.eval(samples[i].k) != samples[i].value) {
      out.extra_consistent = false;
      out.first_mismatch = i;
      break;
    }
  return out;
}

}  // namespace kstab
