/**
 * Small exact linear algebra: determinants, ranks and solves over Q by
 * fraction-free elimination, plus integer lattice helpers (kernel bases,
 * integral points on affine subspaces).
 */
#pragma once

#include "kstab/rational.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace kstab {

/// Row-major dense rational matrix.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows, Vec(cols, Rat(0))) {}
  explicit RatMatrix(std::vector<Vec> rows) : rows_(static_cast<int>(rows.size())), data_(std::move(rows)) {
    cols_ = data_.empty() ? 0 : static_cast<int>(data_[0].size());
    for (const Vec& r : data_)
      if (static_cast<int>(r.size()) != cols_) throw std::invalid_argument("RatMatrix: ragged rows");
  }

  static RatMatrix identity(int n) {
    RatMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rat& operator()(int i, int j) { return data_[i][j]; }
  const Rat& operator()(int i, int j) const { return data_[i][j]; }
  const Vec& row(int i) const { return data_[i]; }
  const std::vector<Vec>& data() const { return data_; }

  Vec operator*(const Vec& v) const {
    if (static_cast<int>(v.size()) != cols_) throw std::invalid_argument("RatMatrix * Vec: size mismatch");
    Vec r(rows_);
    for (int i = 0; i < rows_; ++i) r[i] = dot(data_[i], v);
    return r;
  }

  friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("RatMatrix product: size mismatch");
    RatMatrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (int j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }

  friend bool operator==(const RatMatrix& a, const RatMatrix& b) { return a.data_ == b.data_; }
  friend bool operator<(const RatMatrix& a, const RatMatrix& b) { return a.data_ < b.data_; }

  RatMatrix transpose() const {
    RatMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = data_[i][j];
    return t;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Vec> data_;
};

namespace detail {

/// Clears denominators row by row; the returned factor f satisfies det(int) = f * det(original).
inline std::vector<IntVec> integerize_rows(const std::vector<Vec>& rows, Int* factor) {
  std::vector<IntVec> out;
  Int f = 1;
  for (const Vec& r : rows) {
    Int l = denominator_lcm(r);
    IntVec ir(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) ir[j] = numer(r[j] * l);
    out.push_back(std::move(ir));
    f *= l;
  }
  if (factor) *factor = f;
  return out;
}

/**
 * Bareiss fraction-free elimination in place. Returns the rank; when the
 * matrix is square and full rank, *det_out receives the determinant.
 */
inline int bareiss(std::vector<IntVec>& a, Int* det_out) {
  int n = static_cast<int>(a.size());
  int m = n ? static_cast<int>(a[0].size()) : 0;
  Int prev = 1;
  int sign = 1;
  int rank = 0;
  for (int col = 0; col < m && rank < n; ++col) {
    int piv = -1;
    for (int i = rank; i < n; ++i)
      if (a[i][col] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank) {
      std::swap(a[piv], a[rank]);
      sign = -sign;
    }
    for (int i = rank + 1; i < n; ++i) {
      for (int j = col + 1; j < m; ++j) a[i][j] = (a[rank][col] * a[i][j] - a[i][col] * a[rank][j]) / prev;
      a[i][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  if (det_out) {
    if (n == m && rank == n)
      *det_out = sign * a[n - 1][n - 1];
    else
      *det_out = 0;
  }
  return rank;
}

}  // namespace detail

inline Rat determinant(const RatMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant: matrix not square");
  if (m.rows() == 0) return 1;
  Int factor;
  auto a = detail::integerize_rows(m.data(), &factor);
  Int det;
  detail::bareiss(a, &det);
  return Rat(det, factor);
}

inline int rank(const std::vector<Vec>& rows) {
  if (rows.empty()) return 0;
  auto a = detail::integerize_rows(rows, nullptr);
  return detail::bareiss(a, nullptr);
}

inline bool is_unimodular(const RatMatrix& m) { return abs(determinant(m)) == 1; }

/**
 * Solves A x = b. Returns nullopt when the system is inconsistent; when the
 * solution is not unique, free variables are set to zero.
 */
inline std::optional<Vec> solve(const RatMatrix& a, const Vec& b) {
  int n = a.rows(), m = a.cols();
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("solve: right-hand side size mismatch");
  std::vector<Vec> aug(n, Vec(m + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) aug[i][j] = a(i, j);
    aug[i][m] = b[i];
  }
  // Fraction-free forward elimination on the integerized augmented matrix.
  auto ia = detail::integerize_rows(aug, nullptr);
  std::vector<int> pivot_cols;
  Int prev = 1;
  int r = 0;
  for (int col = 0; col < m && r < n; ++col) {
    int piv = -1;
    for (int i = r; i < n; ++i)
      if (ia[i][col] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(ia[piv], ia[r]);
    for (int i = r + 1; i < n; ++i) {
      for (int j = col + 1; j <= m; ++j) ia[i][j] = (ia[r][col] * ia[i][j] - ia[i][col] * ia[r][j]) / prev;
      ia[i][col] = 0;
    }
    prev = ia[r][col];
    pivot_cols.push_back(col);
    ++r;
  }
  for (int i = r; i < n; ++i)
    if (ia[i][m] != 0) return std::nullopt;
  Vec x(m, Rat(0));
  for (int i = r - 1; i >= 0; --i) {
    int c = pivot_cols[i];
    Rat s = Rat(ia[i][m]);
    for (int j = c + 1; j < m; ++j) s -= Rat(ia[i][j]) * x[j];
    x[c] = s / Rat(ia[i][c]);
  }
  return x;
}

inline std::optional<RatMatrix> inverse(const RatMatrix& a) {
  int n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("inverse: matrix not square");
  if (determinant(a) == 0) return std::nullopt;
  RatMatrix inv(n, n);
  for (int j = 0; j < n; ++j) {
    Vec e(n, Rat(0));
    e[j] = 1;
    Vec col = *solve(a, e);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

/// Basis of the rational null space {x : A x = 0} (rows of A given).
inline std::vector<Vec> nullspace(const std::vector<Vec>& rows, int ncols) {
  int n = static_cast<int>(rows.size());
  std::vector<Vec> a = rows;
  std::vector<int> pivots;
  int r = 0;
  for (int col = 0; col < ncols && r < n; ++col) {
    int piv = -1;
    for (int i = r; i < n; ++i)
      if (a[i][col] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[piv], a[r]);
    Rat inv = 1 / a[r][col];
    for (int j = 0; j < ncols; ++j) a[r][j] *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == r || a[i][col] == 0) continue;
      Rat f = a[i][col];
      for (int j = 0; j < ncols; ++j) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(col);
    ++r;
  }
  std::vector<Vec> basis;
  for (int free = 0; free < ncols; ++free) {
    if (std::find(pivots.begin(), pivots.end(), free) != pivots.end()) continue;
    Vec v(ncols, Rat(0));
    v[free] = 1;
    for (int i = 0; i < r; ++i) v[pivots[i]] = -a[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

/**
 * Column-style Hermite reduction of an integer matrix M (m x n): returns a
 * unimodular U (n x n, as columns) with M U = [L | 0], L lower-echelon of
 * width rank(M). The trailing n - rank columns of U span ker(M) ∩ Z^n.
 */
struct HermiteColumns {
  std::vector<IntVec> m_times_u;  // rows of M U
  std::vector<IntVec> u_cols;     // columns of U
  int rank = 0;
};

inline HermiteColumns hermite_columns(const std::vector<IntVec>& m, int ncols) {
  HermiteColumns h;
  h.m_times_u = m;
  h.u_cols.assign(ncols, IntVec(ncols, Int(0)));
  for (int j = 0; j < ncols; ++j) h.u_cols[j][j] = 1;
  auto& a = h.m_times_u;
  int rows = static_cast<int>(a.size());
  auto col_op = [&](int dst, int src, const Int& f) {  // col[dst] -= f * col[src]
    for (int i = 0; i < rows; ++i) a[i][dst] -= f * a[i][src];
    for (int i = 0; i < ncols; ++i) h.u_cols[dst][i] -= f * h.u_cols[src][i];
  };
  auto col_swap = [&](int x, int y) {
    for (int i = 0; i < rows; ++i) std::swap(a[i][x], a[i][y]);
    std::swap(h.u_cols[x], h.u_cols[y]);
  };
  int piv_col = 0;
  for (int i = 0; i < rows && piv_col < ncols; ++i) {
    // Euclid across columns piv_col.. until only one nonzero entry in row i remains.
    while (true) {
      int best = -1;
      for (int j = piv_col; j < ncols; ++j)
        if (a[i][j] != 0 && (best < 0 || boost::multiprecision::abs(a[i][j]) < boost::multiprecision::abs(a[i][best])))
          best = j;
      if (best < 0) break;
      bool done = true;
      for (int j = piv_col; j < ncols; ++j) {
        if (j == best || a[i][j] == 0) continue;
        Int q = a[i][j] / a[i][best];
        col_op(j, best, q);
        if (a[i][j] != 0) done = false;
      }
      if (done) {
        col_swap(piv_col, best);
        ++piv_col;
        break;
      }
    }
  }
  h.rank = piv_col;
  return h;
}

/// Basis of the lattice Z^n ∩ span(generators) (generators rational).
inline std::vector<IntVec> saturated_lattice_basis(const std::vector<Vec>& generators, int n) {
  if (generators.empty()) return {};
  // span = ker of the rows orthogonal to it.
  auto complement = nullspace(generators, n);
  std::vector<IntVec> m;
  for (const Vec& c : complement) m.push_back(primitive(c));
  if (m.empty()) {
    std::vector<IntVec> basis;
    for (int i = 0; i < n; ++i) {
      IntVec e(n, Int(0));
      e[i] = 1;
      basis.push_back(e);
    }
    return basis;
  }
  auto h = hermite_columns(m, n);
  return std::vector<IntVec>(h.u_cols.begin() + h.rank, h.u_cols.end());
}

/**
 * Some integer point on the affine subspace anchor + span(directions), or
 * nullopt if none exists.
 */
inline std::optional<IntVec> lattice_point_on_affine_hull(const Vec& anchor, const std::vector<Vec>& directions) {
  int n = static_cast<int>(anchor.size());
  std::vector<Vec> complement = directions.empty() ? std::vector<Vec>{} : nullspace(directions, n);
  if (directions.empty()) {
    if (!is_lattice_point(anchor)) return std::nullopt;
    IntVec p(n);
    for (int i = 0; i < n; ++i) p[i] = numer(anchor[i]);
    return p;
  }
  if (complement.empty()) return IntVec(n, Int(0));
  std::vector<IntVec> m;
  for (const Vec& c : complement) m.push_back(primitive(c));
  // Need integer x with M x = M anchor.
  Vec rhs(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    rhs[i] = dot(to_vec(m[i]), anchor);
    if (!is_integer(rhs[i])) return std::nullopt;
  }
  auto h = hermite_columns(m, n);
  // M U = [L | 0]; solve L y = rhs by forward substitution over pivot rows.
  IntVec y(n, Int(0));
  int col = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    Rat s = rhs[i];
    for (int j = 0; j < col; ++j) s -= Rat(h.m_times_u[i][j] * y[j]);
    if (col < h.rank && h.m_times_u[i][col] != 0) {
      Rat q = s / Rat(h.m_times_u[i][col]);
      if (!is_integer(q)) return std::nullopt;
      y[col] = numer(q);
      ++col;
    } else if (s != 0) {
      return std::nullopt;
    }
  }
  IntVec x(n, Int(0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) x[i] += h.u_cols[j][i] * y[j];
  return x;
}

}  // namespace kstab
