#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fieldconc/distribution.hpp"
#include "fieldconc/errors.hpp"
#include "fieldconc/field.hpp"
#include "fieldconc/multi_index.hpp"
#include "fieldconc/rng.hpp"

namespace fieldconc {

enum class Dependence { Independent, NaGaussian, MartingaleProduct };

enum class NaScheme { AllPairs, Adjacent };

inline const char* dependence_name(Dependence dep) {
  switch (dep) {
    case Dependence::Independent: return "independent";
    case Dependence::NaGaussian: return "na_gaussian";
    default: return "martingale_product";
  }
}

/// Joint law of a field: a site-level distribution plus a dependence scheme.
///
/// independent         i.i.d. per-site draws (optionally one law per site).
/// na_gaussian         jointly Gaussian, nonpositive correlation rho, either
///                     between every pair of sites (all_pairs) or between
///                     lattice neighbors at L1 distance 1 (adjacent).
/// martingale_product  X_k = prod_i eps^(i)_{k_i} with independent centered
///                     axis variables drawn from `dist`.
struct FieldDistribution {
  ScalarDistribution dist;
  std::vector<ScalarDistribution> site_dists;  // empty means shared `dist`
  Dependence dependence = Dependence::Independent;
  double rho = 0.0;
  NaScheme scheme = NaScheme::AllPairs;
};

namespace detail {

// Neighbor pairs at L1 distance 1 as (lower ordinal, upper ordinal).
inline std::vector<std::pair<std::int64_t, std::int64_t>> adjacency_pairs(const MultiIndex& n) {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  const auto strides = n.strides();
  for_each_index(n, [&](const std::vector<std::int64_t>& k, std::int64_t ord) {
    for (int i = 0; i < n.dim(); ++i)
      if (k[static_cast<std::size_t>(i)] < n.coords[static_cast<std::size_t>(i)])
        pairs.emplace_back(ord, ord + strides[static_cast<std::size_t>(i)]);
  });
  return pairs;
}

}  // namespace detail

/// Prepared sampler for a fixed (distribution, shape). Construction validates
/// the dependence scheme and performs any one-off work (the covariance square
/// root for the adjacent Gaussian scheme); sampling is then pure in
/// (seed, trial) and safe to call concurrently.
class FieldSampler {
 public:
  FieldSampler(FieldDistribution fd, MultiIndex shape)
      : fd_(std::move(fd)), shape_(std::move(shape)), count_(shape_.count()) {
    switch (fd_.dependence) {
      case Dependence::Independent:
        if (!fd_.site_dists.empty() &&
            static_cast<std::int64_t>(fd_.site_dists.size()) != count_)
          throw InvalidInputError("FieldSampler: site_dists size must equal the lattice size");
        break;
      case Dependence::NaGaussian:
        prepare_na_gaussian();
        break;
      case Dependence::MartingaleProduct:
        prepare_martingale();
        break;
    }
  }

  const FieldDistribution& distribution() const { return fd_; }
  const MultiIndex& shape() const { return shape_; }
  std::int64_t site_count() const { return count_; }

  /// Fills out (size = site count) with one realization. Bit-identical for
  /// identical (seed, trial) regardless of caller threading.
  void sample_into(std::uint64_t seed, std::uint64_t trial, std::span<double> out) const {
    if (static_cast<std::int64_t>(out.size()) != count_)
      throw InvalidInputError("FieldSampler: output buffer size mismatch");
    switch (fd_.dependence) {
      case Dependence::Independent: {
        if (fd_.site_dists.empty()) {
          for (std::int64_t i = 0; i < count_; ++i)
            out[static_cast<std::size_t>(i)] =
                fd_.dist.sample(random_block(seed, trial, static_cast<std::uint64_t>(i)));
        } else {
          for (std::int64_t i = 0; i < count_; ++i)
            out[static_cast<std::size_t>(i)] = fd_.site_dists[static_cast<std::size_t>(i)].sample(
                random_block(seed, trial, static_cast<std::uint64_t>(i)));
        }
        return;
      }
      case Dependence::NaGaussian: {
        const double sigma = fd_.dist.sigma();
        if (fd_.scheme == NaScheme::AllPairs) {
          // Equicorrelated mixing x_i = sigma*(a z_i + b sum_j z_j).
          double zsum = 0.0;
          for (std::int64_t i = 0; i < count_; ++i) {
            const double z = to_normal(random_block(seed, trial, static_cast<std::uint64_t>(i)));
            out[static_cast<std::size_t>(i)] = z;
            zsum += z;
          }
          for (std::int64_t i = 0; i < count_; ++i)
            out[static_cast<std::size_t>(i)] =
                sigma * (mix_diag_ * out[static_cast<std::size_t>(i)] + mix_all_ * zsum);
        } else {
          thread_local std::vector<double> z;
          z.resize(static_cast<std::size_t>(count_));
          for (std::int64_t i = 0; i < count_; ++i)
            z[static_cast<std::size_t>(i)] =
                to_normal(random_block(seed, trial, static_cast<std::uint64_t>(i)));
          for (std::int64_t i = 0; i < count_; ++i) {
            const double* row = mix_dense_.data() + i * count_;
            double acc = 0.0;
            for (std::int64_t j = 0; j < count_; ++j)
              acc += row[j] * z[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = sigma * acc;
          }
        }
        return;
      }
      case Dependence::MartingaleProduct: {
        thread_local std::vector<double> axis_draws;
        axis_draws.resize(axis_offset_.back());
        std::size_t pos = 0;
        for (int axis = 0; axis < shape_.dim(); ++axis)
          for (std::int64_t c = 0; c < shape_.coords[static_cast<std::size_t>(axis)]; ++c, ++pos)
            axis_draws[pos] = fd_.dist.sample(random_block(seed, trial, pos));
        for_each_index(shape_, [&](const std::vector<std::int64_t>& k, std::int64_t ord) {
          double prod = 1.0;
          for (int axis = 0; axis < shape_.dim(); ++axis)
            prod *= axis_draws[static_cast<std::size_t>(
                axis_offset_[static_cast<std::size_t>(axis)] + k[static_cast<std::size_t>(axis)] - 1)];
          out[static_cast<std::size_t>(ord)] = prod;
        });
        return;
      }
    }
  }

  FieldSample sample(std::uint64_t seed, std::uint64_t trial) const {
    std::vector<double> values(static_cast<std::size_t>(count_));
    sample_into(seed, trial, values);
    return FieldSample{shape_, std::move(values)};
  }

 private:
  void prepare_na_gaussian() {
    if (fd_.dist.kind() != ScalarDistribution::Kind::Gaussian)
      throw InvalidInputError("na_gaussian: site distribution must be a centered gaussian");
    if (!fd_.site_dists.empty())
      throw InvalidInputError("na_gaussian: per-site distributions are not supported");
    if (fd_.rho > 0.0)
      throw InvalidInputError("na_gaussian: correlation must be <= 0");
    const std::int64_t m = count_;
    if (m > 4096)
      throw InvalidInputError("na_gaussian: at most 4096 sites (dense factorization)");
    if (fd_.scheme == NaScheme::AllPairs) {
      // Sigma = (1-rho) I + rho J, PSD iff 1 + (m-1) rho >= 0; square root is
      // a I + b J in closed form.
      const double tail_eig = 1.0 + (static_cast<double>(m) - 1.0) * fd_.rho;
      if (tail_eig < 0.0)
        throw InvalidInputError("na_gaussian: rho below -1/(m-1), covariance not PSD");
      mix_diag_ = std::sqrt(1.0 - fd_.rho);
      mix_all_ = (std::sqrt(tail_eig) - mix_diag_) / static_cast<double>(m);
    } else {
      Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(m, m);
      for (auto [i, j] : detail::adjacency_pairs(shape_)) {
        cov(i, j) = fd_.rho;
        cov(j, i) = fd_.rho;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
      if (solver.info() != Eigen::Success)
        throw NumericFailureError("na_gaussian: eigen decomposition failed");
      Eigen::VectorXd eig = solver.eigenvalues();
      for (Eigen::Index i = 0; i < eig.size(); ++i) {
        if (eig[i] < -1e-9)
          throw InvalidInputError("na_gaussian: adjacency covariance not PSD for this rho");
        eig[i] = std::sqrt(std::max(0.0, eig[i]));
      }
      Eigen::MatrixXd root =
          solver.eigenvectors() * eig.asDiagonal() * solver.eigenvectors().transpose();
      mix_dense_.assign(root.data(), root.data() + m * m);
      // Eigen stores column-major; the matrix is symmetric so rows read fine.
    }
  }

  void prepare_martingale() {
    if (!fd_.site_dists.empty())
      throw InvalidInputError("martingale_product: per-site distributions are not supported");
    if (fd_.dist.mean() != 0.0)
      throw InvalidInputError("martingale_product: axis generator must be centered");
    axis_offset_.assign(1, 0);
    for (int axis = 0; axis < shape_.dim(); ++axis)
      axis_offset_.push_back(axis_offset_.back() + shape_.coords[static_cast<std::size_t>(axis)]);
  }

  FieldDistribution fd_;
  MultiIndex shape_;
  std::int64_t count_;
  double mix_diag_ = 1.0;
  double mix_all_ = 0.0;
  std::vector<double> mix_dense_;
  std::vector<std::int64_t> axis_offset_;  // cumulative axis lengths, size d+1
};

/// One realization of the field law on the rectangle {1..n}.
inline FieldSample sample_field(const FieldDistribution& fd, const MultiIndex& n,
                                std::uint64_t seed, std::uint64_t trial) {
  return FieldSampler(fd, n).sample(seed, trial);
}

/// Two-sided split at level a: the bounded part X*1[|X| <= a] and the
/// exceedance part X*1[|X| > a]. The parts sum back to the field bitwise.
struct TruncationPair {
  FieldSample low_part;
  FieldSample high_part;
  double threshold = 0.0;
};

inline TruncationPair truncate(const FieldSample& field, double a) {
  if (!(a > 0)) throw InvalidInputError("truncate: threshold must be > 0");
  field.validate();
  TruncationPair out;
  out.threshold = a;
  out.low_part.shape = field.shape;
  out.high_part.shape = field.shape;
  out.low_part.values.resize(field.values.size());
  out.high_part.values.resize(field.values.size());
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const double x = field.values[i];
    if (std::abs(x) <= a) {
      out.low_part.values[i] = x;
      out.high_part.values[i] = 0.0;
    } else {
      out.low_part.values[i] = 0.0;
      out.high_part.values[i] = x;
    }
  }
  return out;
}

/// sign-preserving clip: y = min(cap, |x|) * sign(x).
inline FieldSample capped_sign_truncate(const FieldSample& field, double cap) {
  if (!(cap > 0)) throw InvalidInputError("capped_sign_truncate: cap must be > 0");
  field.validate();
  FieldSample out{field.shape, field.values};
  for (double& x : out.values) x = std::copysign(std::min(cap, std::abs(x)), x);
  return out;
}

/// Upper capping: values >= b are replaced by b; everything else passes.
inline FieldSample one_sided_truncate(const FieldSample& field, double b) {
  if (!(b > 0)) throw InvalidInputError("one_sided_truncate: level must be > 0");
  field.validate();
  FieldSample out{field.shape, field.values};
  for (double& x : out.values)
    if (x >= b) x = b;
  return out;
}

}  // namespace fieldconc
