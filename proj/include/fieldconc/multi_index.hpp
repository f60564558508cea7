#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "fieldconc/errors.hpp"

namespace fieldconc {

/// A point of the d-dimensional positive integer lattice. Coordinates are
/// 1-based; the partial order is coordinatewise.
struct MultiIndex {
  std::vector<std::int64_t> coords;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<std::int64_t> c) : coords(std::move(c)) { validate(); }

  static MultiIndex cube(int d, std::int64_t n) {
    return MultiIndex(std::vector<std::int64_t>(static_cast<std::size_t>(d), n));
  }

  int dim() const { return static_cast<int>(coords.size()); }

  void validate() const {
    if (coords.empty()) throw InvalidInputError("MultiIndex: dimension must be >= 1");
    for (auto c : coords)
      if (c < 1) throw InvalidInputError("MultiIndex: every coordinate must be >= 1");
  }

  /// Number of lattice points k <= n, i.e. the product of the coordinates.
  std::int64_t count() const {
    std::int64_t p = 1;
    for (auto c : coords) {
      if (p > (std::int64_t{1} << 62) / c)
        throw InvalidInputError("MultiIndex: lattice too large");
      p *= c;
    }
    return p;
  }

  /// Row-major strides with the first coordinate slowest.
  std::vector<std::int64_t> strides() const {
    std::vector<std::int64_t> s(coords.size());
    std::int64_t acc = 1;
    for (int i = dim() - 1; i >= 0; --i) {
      s[static_cast<std::size_t>(i)] = acc;
      acc *= coords[static_cast<std::size_t>(i)];
    }
    return s;
  }

  std::int64_t max_coord() const {
    std::int64_t m = 1;
    for (auto c : coords) m = std::max(m, c);
    return m;
  }

  bool operator==(const MultiIndex& other) const { return coords == other.coords; }
};

/// Visits every k <= n in row-major order (last coordinate fastest). fn is
/// called with the coordinate vector and the row-major ordinal.
template <class Fn>
inline void for_each_index(const MultiIndex& n, Fn&& fn) {
  const int d = n.dim();
  std::vector<std::int64_t> k(static_cast<std::size_t>(d), 1);
  std::int64_t ordinal = 0;
  for (;;) {
    fn(static_cast<const std::vector<std::int64_t>&>(k), ordinal);
    ++ordinal;
    int axis = d - 1;
    while (axis >= 0 && ++k[static_cast<std::size_t>(axis)] > n.coords[static_cast<std::size_t>(axis)]) {
      k[static_cast<std::size_t>(axis)] = 1;
      --axis;
    }
    if (axis < 0) break;
  }
}

/// Exponents of the norming product. Entries are non-decreasing with minimum
/// >= 1/2; p counts the leading entries equal to the minimum.
struct AlphaVector {
  std::vector<double> alphas;
  int p = 1;

  static AlphaVector create(std::vector<double> a) {
    if (a.empty()) throw InvalidInputError("AlphaVector: dimension must be >= 1");
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!(a[i] >= 0.5))
        throw InvalidInputError("AlphaVector: every exponent must be >= 1/2");
      if (i > 0 && a[i] < a[i - 1])
        throw InvalidInputError("AlphaVector: exponents must be non-decreasing");
    }
    AlphaVector v;
    v.alphas = std::move(a);
    v.p = 1;
    while (v.p < static_cast<int>(v.alphas.size()) &&
           v.alphas[static_cast<std::size_t>(v.p)] == v.alphas[0])
      ++v.p;
    return v;
  }

  int dim() const { return static_cast<int>(alphas.size()); }
  double alpha1() const { return alphas[0]; }
};

/// The norming value prod_i n_i^{alpha_i}.
inline double index_norm(const MultiIndex& n, const AlphaVector& alpha) {
  if (n.dim() != alpha.dim()) throw InvalidInputError("index_norm: dimension mismatch");
  double prod = 1.0;
  for (int i = 0; i < n.dim(); ++i)
    prod *= std::pow(static_cast<double>(n.coords[static_cast<std::size_t>(i)]),
                     alpha.alphas[static_cast<std::size_t>(i)]);
  return prod;
}

/// The norming value sqrt(P log P) * prod_{i>p} n_i^{alpha_i} with
/// P = prod_{i<=p} n_i, defined for alpha_1 == 1/2. The log factor is floored
/// at 1 so indices with P = 1 stay usable.
inline double log_norm(const MultiIndex& n, const AlphaVector& alpha) {
  if (n.dim() != alpha.dim()) throw InvalidInputError("log_norm: dimension mismatch");
  if (alpha.alpha1() != 0.5) throw InvalidInputError("log_norm: requires alpha_1 == 1/2");
  double head = 1.0;
  for (int i = 0; i < alpha.p; ++i) head *= static_cast<double>(n.coords[static_cast<std::size_t>(i)]);
  const double log_factor = std::max(1.0, std::log(head));
  double out = std::sqrt(head * log_factor);
  for (int i = alpha.p; i < n.dim(); ++i)
    out *= std::pow(static_cast<double>(n.coords[static_cast<std::size_t>(i)]),
                    alpha.alphas[static_cast<std::size_t>(i)]);
  return out;
}

/// card{(n_1,...,n_p) : n_1*...*n_p <= N} by direct recursion. Oracle-grade:
/// exact and simple, not fast.
inline std::int64_t count_points_with_product_at_most(std::int64_t N, int p) {
  if (N < 1 || p < 1)
    throw InvalidInputError("count_points_with_product_at_most: requires N >= 1 and p >= 1");
  if (p == 1) return N;
  std::int64_t total = 0;
  for (std::int64_t m = 1; m <= N; ++m)
    total += count_points_with_product_at_most(N / m, p - 1);
  return total;
}

}  // namespace fieldconc
