#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "invlab/errors.hpp"
#include "invlab/rng.hpp"

namespace invlab {

/// Prime field Z/pZ. Elements are canonical representatives in {0, ..., p-1}.
class PrimeField {
 public:
  explicit PrimeField(std::uint64_t p) : p_(p) {
    if (!is_prime(p)) {
      throw NonPrimeModulus("modulus " + std::to_string(p) + " is not prime");
    }
  }

  std::uint64_t modulus() const { return p_; }

  bool canonical(std::uint64_t a) const { return a < p_; }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;  // p < 2^63 is enforced, no overflow
    return s >= p_ ? s - p_ : s;
  }

  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + p_ - b;
  }

  std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * b) % p_);
  }

  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = 1 % p_;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  /// Multiplicative inverse via Fermat (a != 0).
  std::uint64_t inv(std::uint64_t a) const {
    if (a == 0) throw DomainError("inverse of zero");
    return pow(a, p_ - 2);
  }

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

  static bool is_prime(std::uint64_t p) {
    if (p < 2 || p >= (1ULL << 62)) return false;
    if (p % 2 == 0) return p == 2;
    for (std::uint64_t d = 3; d * d <= p; d += 2) {
      if (p % d == 0) return false;
    }
    return true;
  }

 private:
  std::uint64_t p_;
};

inline PrimeField make_field(std::uint64_t p) { return PrimeField(p); }

/// 1-based point of the domain [n] = {1, ..., n}.
struct DomainPoint {
  std::uint64_t index = 1;
  friend auto operator<=>(const DomainPoint&, const DomainPoint&) = default;
};

/// Fixed bijection between [n] and the field {0, ..., n-1}: x maps to x - 1.
inline std::uint64_t to_field(DomainPoint x, const PrimeField& f) {
  if (x.index < 1 || x.index > f.modulus()) {
    throw DomainError("domain point " + std::to_string(x.index) +
                      " outside [1, " + std::to_string(f.modulus()) + "]");
  }
  return x.index - 1;
}

inline DomainPoint from_field(std::uint64_t e, const PrimeField& f) {
  if (!f.canonical(e)) throw DomainError("non-canonical field element");
  return DomainPoint{e + 1};
}

/// The label carrying the group zero of Z_n under the x -> x-1 mapping.
inline DomainPoint zero_label() { return DomainPoint{1}; }

/// Group addition of domain labels in Z_n (no primality needed).
inline DomainPoint add_labels(DomainPoint x, DomainPoint y, std::uint64_t n) {
  return DomainPoint{(x.index - 1 + y.index - 1) % n + 1};
}

inline DomainPoint neg_label(DomainPoint x, std::uint64_t n) {
  return DomainPoint{(n - (x.index - 1)) % n + 1};
}

/// A function f: [n] -> [n] stored as its value table.
class FnTable {
 public:
  FnTable() = default;

  FnTable(std::uint64_t n, std::vector<DomainPoint> values)
      : n_(n), v_(std::move(values)) {
    if (v_.size() != n_) throw SizeMismatch("value table length != n");
    for (const DomainPoint& p : v_) {
      if (p.index < 1 || p.index > n_) {
        throw DomainError("table entry outside [n]");
      }
    }
  }

  /// Convenience constructor from raw 1-based indices.
  static FnTable from_indices(std::vector<std::uint64_t> idx) {
    std::vector<DomainPoint> v;
    v.reserve(idx.size());
    for (std::uint64_t i : idx) v.push_back(DomainPoint{i});
    std::uint64_t n = v.size();
    return FnTable(n, std::move(v));
  }

  std::uint64_t n() const { return n_; }

  DomainPoint operator()(DomainPoint x) const {
    if (x.index < 1 || x.index > n_) throw DomainError("argument outside [n]");
    return v_[x.index - 1];
  }

  const std::vector<DomainPoint>& values() const { return v_; }

  friend bool operator==(const FnTable&, const FnTable&) = default;

 private:
  std::uint64_t n_ = 0;
  std::vector<DomainPoint> v_;
};

/// Uniform f: [n] -> [n], each table entry independent.
inline FnTable sample_function(std::uint64_t n, Rng& rng) {
  if (n < 1) throw DomainError("n must be >= 1");
  std::vector<DomainPoint> v(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    v[i] = DomainPoint{rng.uniform_below(n) + 1};
  }
  return FnTable(n, std::move(v));
}

inline DomainPoint uniform_point(std::uint64_t n, Rng& rng) {
  return DomainPoint{rng.uniform_below(n) + 1};
}

inline std::set<DomainPoint> image(const FnTable& f) {
  return std::set<DomainPoint>(f.values().begin(), f.values().end());
}

inline std::set<DomainPoint> preimage(const FnTable& f, DomainPoint y) {
  if (y.index < 1 || y.index > f.n()) throw DomainError("y outside [n]");
  std::set<DomainPoint> pre;
  for (std::uint64_t x = 1; x <= f.n(); ++x) {
    if (f.values()[x - 1] == y) pre.insert(DomainPoint{x});
  }
  return pre;
}

/// Pointwise sum of two tables under the group Z_n on labels.
inline FnTable add_pointwise(const FnTable& f1, const FnTable& f2) {
  if (f1.n() != f2.n()) throw SizeMismatch("tables have different n");
  std::vector<DomainPoint> v(f1.n());
  for (std::uint64_t i = 0; i < f1.n(); ++i) {
    v[i] = add_labels(f1.values()[i], f2.values()[i], f1.n());
  }
  return FnTable(f1.n(), std::move(v));
}

/// h(x) = -x log2 x - (1-x) log2(1-x), with h(0) = h(1) = 0.
inline double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("entropy argument outside [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// Bits needed to write a label in {0, ..., n-1}; this is ceil(log2 n) for
/// n >= 2 and 0 for n = 1.
inline unsigned label_bits(std::uint64_t n) {
  unsigned w = 0;
  while ((1ULL << w) < n) ++w;
  return w;
}

/// Text form used by CLI fixtures: first line n, second line the n values.
inline std::string to_text(const FnTable& f) {
  std::ostringstream os;
  os << f.n() << "\n";
  for (std::uint64_t i = 0; i < f.n(); ++i) {
    if (i) os << ' ';
    os << f.values()[i].index;
  }
  os << "\n";
  return os.str();
}

inline FnTable parse_fn_table(std::istream& in) {
  std::uint64_t n = 0;
  if (!(in >> n)) throw DomainError("fn table: missing n");
  std::vector<DomainPoint> v(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t x = 0;
    if (!(in >> x)) throw DomainError("fn table: truncated value list");
    v[i] = DomainPoint{x};
  }
  return FnTable(n, std::move(v));
}

inline FnTable parse_fn_table(const std::string& text) {
  std::istringstream is(text);
  return parse_fn_table(is);
}

}  // namespace invlab
