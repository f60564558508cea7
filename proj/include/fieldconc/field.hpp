#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fieldconc/errors.hpp"
#include "fieldconc/multi_index.hpp"

namespace fieldconc {

/// One realization of a random field on the rectangle {1..n_1}x...x{1..n_d},
/// stored row-major with the first coordinate slowest.
struct FieldSample {
  MultiIndex shape;
  std::vector<double> values;

  FieldSample() = default;
  FieldSample(MultiIndex s, std::vector<double> v) : shape(std::move(s)), values(std::move(v)) {
    validate();
  }

  void validate() const {
    shape.validate();
    if (static_cast<std::int64_t>(values.size()) != shape.count())
      throw InvalidInputError("FieldSample: value count must equal the lattice size");
    for (double v : values)
      if (!std::isfinite(v)) throw InvalidInputError("FieldSample: values must be finite");
  }
};

/// Summed-area structure: entry at k holds the rectangle sum S_k.
struct PrefixSumTable {
  MultiIndex shape;
  std::vector<double> sums;
};

/// Replaces v (row-major over shape) by its rectangle sums. Uses the
/// inclusion-exclusion recurrence over nonempty axis subsets, masks visited in
/// increasing bitmask order so the accumulation order is fixed.
inline void prefix_sums_in_place(const MultiIndex& shape, std::span<double> v) {
  const int d = shape.dim();
  if (d > 16) throw InvalidInputError("prefix_sums: dimension too large");
  const auto strides = shape.strides();
  const unsigned top_mask = (1u << d) - 1u;

  std::vector<std::int64_t> offset(top_mask + 1, 0);
  for (unsigned mask = 1; mask <= top_mask; ++mask)
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) offset[mask] += strides[static_cast<std::size_t>(i)];

  std::vector<std::int64_t> k(static_cast<std::size_t>(d), 1);
  unsigned interior = 0;  // bit i set when k_i >= 2
  std::int64_t ord = 0;
  for (;;) {
    double acc = v[static_cast<std::size_t>(ord)];
    for (unsigned mask = 1; mask <= top_mask; ++mask) {
      if ((mask & ~interior) != 0) continue;  // a shifted neighbor falls outside
      const double s = v[static_cast<std::size_t>(ord - offset[mask])];
      acc += (std::popcount(mask) % 2 == 1) ? s : -s;
    }
    v[static_cast<std::size_t>(ord)] = acc;
    ++ord;
    int axis = d - 1;
    for (;;) {
      if (axis < 0) return;
      auto& ka = k[static_cast<std::size_t>(axis)];
      if (++ka <= shape.coords[static_cast<std::size_t>(axis)]) {
        if (ka == 2) interior |= (1u << axis);
        break;
      }
      ka = 1;
      interior &= ~(1u << axis);
      --axis;
    }
  }
}

/// All rectangle sums S_k, k <= n, in one pass.
inline PrefixSumTable prefix_sums(const FieldSample& field) {
  field.validate();
  PrefixSumTable table{field.shape, field.values};
  prefix_sums_in_place(table.shape, table.sums);
  return table;
}

/// max_{k <= n} |S_k|.
inline double max_abs_partial_sum(const FieldSample& field) {
  const PrefixSumTable table = prefix_sums(field);
  double best = 0.0;
  for (double s : table.sums) best = std::max(best, std::abs(s));
  return best;
}

}  // namespace fieldconc
