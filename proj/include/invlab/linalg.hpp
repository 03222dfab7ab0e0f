#pragma once

#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "invlab/errors.hpp"
#include "invlab/field.hpp"
#include "invlab/rng.hpp"

namespace invlab {

using Felt = std::uint64_t;

/// Dense matrix over a prime field, row-major. Zero-row matrices are allowed
/// and represent an empty equation system; zero-column matrices are not.
/// Column indices in all public result sets are 1-based.
class Mat {
 public:
  Mat(std::size_t rows, std::size_t cols, PrimeField field)
      : rows_(rows), cols_(cols), field_(field), e_(rows * cols, 0) {
    if (cols_ < 1) throw SizeMismatch("matrix must have at least one column");
  }

  static Mat from_rows(const PrimeField& field,
                       const std::vector<std::vector<Felt>>& rows) {
    if (rows.empty()) throw SizeMismatch("from_rows needs at least one row; use Mat(0, cols, f) for empty systems");
    Mat m(rows.size(), rows[0].size(), field);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw SizeMismatch("ragged rows");
      for (std::size_t j = 0; j < m.cols_; ++j) {
        if (!field.canonical(rows[i][j])) throw DomainError("entry not canonical");
        m.at(i, j) = rows[i][j];
      }
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const PrimeField& field() const { return field_; }

  Felt& at(std::size_t r, std::size_t c) { return e_[r * cols_ + c]; }
  Felt at(std::size_t r, std::size_t c) const { return e_[r * cols_ + c]; }

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_, cols_;
  PrimeField field_;
  std::vector<Felt> e_;
};

/// Matrix-vector product A x over the field.
inline std::vector<Felt> mat_vec(const Mat& a, const std::vector<Felt>& x) {
  if (x.size() != a.cols()) throw SizeMismatch("vector length != cols");
  const PrimeField& f = a.field();
  std::vector<Felt> out(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Felt acc = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      acc = f.add(acc, f.mul(a.at(i, j), x[j]));
    }
    out[i] = acc;
  }
  return out;
}

inline Mat vstack(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols() || !(a.field() == b.field())) {
    throw SizeMismatch("stacked matrices must share width and field");
  }
  Mat m(a.rows() + b.rows(), a.cols(), a.field());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m.at(i, j) = a.at(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) m.at(a.rows() + i, j) = b.at(i, j);
  return m;
}

/// Row canonical form plus rank and the 1-based leading-one columns.
struct RrefResult {
  Mat rref;
  std::size_t rank = 0;
  std::vector<std::size_t> leading_cols;  // ascending, 1-based
};

/// Gauss-Jordan elimination with a deterministic pivot rule: leftmost column
/// first, topmost eligible row. The output is the canonical reduced form.
inline RrefResult rref(const Mat& a) {
  RrefResult res{a, 0, {}};
  Mat& m = res.rref;
  const PrimeField& f = m.field();
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < m.cols() && pivot_row < m.rows(); ++col) {
    std::size_t sel = pivot_row;
    while (sel < m.rows() && m.at(sel, col) == 0) ++sel;
    if (sel == m.rows()) continue;
    if (sel != pivot_row) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        std::swap(m.at(sel, j), m.at(pivot_row, j));
      }
    }
    Felt scale = f.inv(m.at(pivot_row, col));
    for (std::size_t j = col; j < m.cols(); ++j) {
      m.at(pivot_row, j) = f.mul(m.at(pivot_row, j), scale);
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == pivot_row || m.at(r, col) == 0) continue;
      Felt factor = m.at(r, col);
      for (std::size_t j = col; j < m.cols(); ++j) {
        m.at(r, j) = f.sub(m.at(r, j), f.mul(factor, m.at(pivot_row, j)));
      }
    }
    res.leading_cols.push_back(col + 1);
    ++pivot_row;
  }
  res.rank = pivot_row;
  return res;
}

inline std::size_t rank(const Mat& a) { return rref(a).rank; }

/// True iff v lies in the row span of A (rank test).
inline bool in_span(const Mat& a, const std::vector<Felt>& v) {
  if (v.size() != a.cols()) throw SizeMismatch("vector length != cols");
  Mat ext(a.rows() + 1, a.cols(), a.field());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) ext.at(i, j) = a.at(i, j);
  for (std::size_t j = 0; j < a.cols(); ++j) ext.at(a.rows(), j) = v[j];
  return rank(ext) == rank(a);
}

/// E(A): the 1-based coordinates j whose unit vector e_j is spanned by A's
/// rows. Knowing A f pins those coordinates of f down exactly.
inline std::set<std::size_t> spanned_units(const Mat& a) {
  std::set<std::size_t> out;
  std::vector<Felt> e(a.cols(), 0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    e[j] = 1;
    if (in_span(a, e)) out.insert(j + 1);
    e[j] = 0;
  }
  return out;
}

namespace detail {

/// Rref of the augmented system [A | v]; returns {consistent, rref result}.
inline std::pair<bool, RrefResult> solve_shape(const Mat& a,
                                               const std::vector<Felt>& v) {
  if (v.size() != a.rows()) throw SizeMismatch("rhs length != rows");
  Mat aug(a.rows(), a.cols() + 1, a.field());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = v[i];
  }
  RrefResult r = rref(aug);
  // Inconsistent iff the last column is a pivot.
  bool consistent = r.leading_cols.empty() || r.leading_cols.back() != a.cols() + 1;
  return {consistent, std::move(r)};
}

}  // namespace detail

/// Number of solutions of A x = v: zero if inconsistent, else p^(b - rank).
inline std::uint64_t solution_count(const Mat& a, const std::vector<Felt>& v) {
  auto [consistent, r] = detail::solve_shape(a, v);
  if (!consistent) return 0;
  std::uint64_t p = a.field().modulus();
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < a.cols() - r.rank; ++i) {
    if (count > UINT64_MAX / p) throw ScaleLimit("solution count overflows 64 bits");
    count *= p;
  }
  return count;
}

/// Uniform sample from the solution set of A x = v: free coordinates drawn
/// uniformly, pivot coordinates back-substituted.
inline std::vector<Felt> sample_solution(const Mat& a,
                                         const std::vector<Felt>& v, Rng& rng) {
  auto [consistent, r] = detail::solve_shape(a, v);
  if (!consistent) throw InfeasibleSystem("A x = v has no solution");
  const PrimeField& f = a.field();
  std::vector<bool> is_pivot(a.cols(), false);
  for (std::size_t c : r.leading_cols) is_pivot[c - 1] = true;
  std::vector<Felt> x(a.cols(), 0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    if (!is_pivot[j]) x[j] = rng.uniform_below(f.modulus());
  }
  for (std::size_t i = 0; i < r.rank; ++i) {
    std::size_t lead = r.leading_cols[i] - 1;
    Felt acc = r.rref.at(i, a.cols());  // augmented rhs
    for (std::size_t j = lead + 1; j < a.cols(); ++j) {
      if (!is_pivot[j]) acc = f.sub(acc, f.mul(r.rref.at(i, j), x[j]));
    }
    x[lead] = acc;
  }
  return x;
}

/// Exact nonnegative rational, always stored reduced.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  friend bool operator==(const Rational&, const Rational&) = default;
};

inline Rational make_rational(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw DomainError("zero denominator");
  std::uint64_t g = std::gcd(num, den);
  if (g == 0) g = 1;
  return Rational{num / g, den / g};
}

inline double to_double(const Rational& r) {
  return static_cast<double>(r.num) / static_cast<double>(r.den);
}

/// Exact conditional distribution of coordinate j (1-based) of a uniform
/// solution of A x = v, computed by full enumeration of the p^b cube. This is
/// the ground-truth oracle for the known-coordinates claim, hence exact
/// rationals and a hard enumeration cap.
inline std::vector<Rational> conditional_coord_dist(
    const Mat& a, const std::vector<Felt>& v, std::size_t j,
    std::uint64_t enumeration_cap = 4000000) {
  if (j < 1 || j > a.cols()) throw SizeMismatch("coordinate index outside [1, b]");
  const PrimeField& f = a.field();
  std::uint64_t p = f.modulus();
  double total_d = std::pow(static_cast<double>(p), static_cast<double>(a.cols()));
  if (total_d > static_cast<double>(enumeration_cap)) {
    throw ScaleLimit("p^b exceeds the enumeration cap");
  }
  std::vector<std::uint64_t> counts(p, 0);
  std::uint64_t matches = 0;
  std::vector<Felt> x(a.cols(), 0);
  for (;;) {
    if (mat_vec(a, x) == v) {
      ++matches;
      ++counts[x[j - 1]];
    }
    // odometer increment
    std::size_t k = 0;
    while (k < a.cols()) {
      if (++x[k] < p) break;
      x[k] = 0;
      ++k;
    }
    if (k == a.cols()) break;
  }
  if (matches == 0) throw InfeasibleSystem("v is not in the image of A");
  std::vector<Rational> dist(p);
  for (std::uint64_t y = 0; y < p; ++y) dist[y] = make_rational(counts[y], matches);
  return dist;
}

/// The constructive cover of E(stack(A, B)) from the row-canonical forms:
/// s_a collects the leading columns of rref(A) (a function of A alone) and
/// s_b the leading columns that stacking B adds.
struct CoverSets {
  std::set<std::size_t> s_a;
  std::set<std::size_t> s_b;
};

inline CoverSets cover_sets(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols() || !(a.field() == b.field())) {
    throw SizeMismatch("cover_sets needs equal widths and fields");
  }
  CoverSets cs;
  RrefResult ra = rref(a);
  cs.s_a.insert(ra.leading_cols.begin(), ra.leading_cols.end());
  RrefResult rs = rref(vstack(a, b));
  for (std::size_t c : rs.leading_cols) {
    if (!cs.s_a.count(c)) cs.s_b.insert(c);
  }
  return cs;
}

}  // namespace invlab
