#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fieldconc/errors.hpp"
#include "fieldconc/montecarlo.hpp"
#include "fieldconc/multi_index.hpp"
#include "fieldconc/samplers.hpp"

namespace fieldconc {

enum class WeightKind { Power, HalfLog, CustomArray };

/// Parameters of one convergence-series scan. `power` weighs each index by
/// |n|^{alpha_1 r - 2} against the threshold |n^alpha| eps; `half_log` weighs
/// by |n|^{r/2 - 2} against the log-normed threshold and requires
/// alpha_1 = 1/2, r >= 2; `custom_array` scans an explicit (index, weight)
/// table against the plain threshold eps.
struct SeriesSpec {
  AlphaVector alpha;
  double r = 2.0;
  double epsilon = 1.0;
  WeightKind weight_kind = WeightKind::Power;
  std::vector<std::pair<MultiIndex, double>> custom_weights;
  TailStatistic statistic = TailStatistic::AbsSum;
  std::int64_t cube_N = 1;
  bool inclusive = false;

  void validate() const {
    if (!(r >= 1.0)) throw InvalidInputError("SeriesSpec: r must be >= 1");
    if (!(alpha.alpha1() * r >= 1.0))
      throw InvalidInputError("SeriesSpec: requires alpha_1 * r >= 1");
    if (!(epsilon >= 0.0)) throw InvalidInputError("SeriesSpec: epsilon must be >= 0");
    if (weight_kind == WeightKind::HalfLog) {
      if (alpha.alpha1() != 0.5)
        throw InvalidInputError("SeriesSpec: half_log weight requires alpha_1 == 1/2");
      if (!(r >= 2.0)) throw InvalidInputError("SeriesSpec: half_log weight requires r >= 2");
    }
    if (weight_kind == WeightKind::CustomArray) {
      if (custom_weights.empty())
        throw InvalidInputError("SeriesSpec: custom_array needs at least one entry");
      for (const auto& [idx, w] : custom_weights) {
        idx.validate();
        if (idx.dim() != alpha.dim())
          throw InvalidInputError("SeriesSpec: custom index dimension mismatch");
        if (!(w >= 0)) throw InvalidInputError("SeriesSpec: weights must be >= 0");
      }
    } else if (cube_N < 1) {
      throw InvalidInputError("SeriesSpec: cube_N must be >= 1");
    }
  }
};

struct SeriesShellRow {
  std::int64_t shell = 0;
  double contribution = 0.0;
  double ci_halfwidth = 0.0;  // weighted half-widths, accumulated linearly
};

struct SeriesReport {
  double partial_sum = 0.0;
  std::vector<SeriesShellRow> per_shell;
  std::int64_t terms_skipped_zero = 0;  // indices whose estimate had no hits
};

namespace detail {

struct SeriesTerm {
  MultiIndex index;
  double weight = 0.0;
  double threshold = 0.0;
};

inline std::vector<SeriesTerm> series_terms(const SeriesSpec& spec) {
  std::vector<SeriesTerm> terms;
  if (spec.weight_kind == WeightKind::CustomArray) {
    terms.reserve(spec.custom_weights.size());
    for (const auto& [idx, w] : spec.custom_weights)
      terms.push_back({idx, w, spec.epsilon});
    return terms;
  }
  const MultiIndex cube = MultiIndex::cube(spec.alpha.dim(), spec.cube_N);
  if (cube.count() > 2'000'000) throw InvalidInputError("scan_series: cube too large");
  terms.reserve(static_cast<std::size_t>(cube.count()));
  const double exponent = spec.weight_kind == WeightKind::Power
                              ? spec.alpha.alpha1() * spec.r - 2.0
                              : spec.r / 2.0 - 2.0;
  for_each_index(cube, [&](const std::vector<std::int64_t>& k, std::int64_t) {
    MultiIndex idx{std::vector<std::int64_t>(k)};
    const double count = static_cast<double>(idx.count());
    const double norm = spec.weight_kind == WeightKind::Power ? index_norm(idx, spec.alpha)
                                                              : log_norm(idx, spec.alpha);
    terms.push_back({std::move(idx), std::pow(count, exponent), norm * spec.epsilon});
  });
  return terms;
}

}  // namespace detail

/// Scans the series over the cube [1, N]^d (or the custom index table):
/// estimates each index's tail probability by Monte Carlo, multiplies by the
/// weight and accumulates per shell (shell = max coordinate). Per-index
/// subseeds are derived from (seed, term ordinal), so the report is
/// bit-identical across runs and worker counts. epsilon = 0 forces every
/// probability to 1 (a weight-audit mode, no sampling).
inline SeriesReport scan_series(const SeriesSpec& spec, const FieldDistribution& dist,
                                std::int64_t trials_per_index, std::uint64_t seed,
                                int workers = 0) {
  spec.validate();
  if (trials_per_index < 100)
    throw InvalidInputError("scan_series: trials_per_index must be >= 100");
  const auto terms = detail::series_terms(spec);
  std::vector<TailEstimate> estimates(terms.size());
  const bool forced = spec.epsilon == 0.0 && spec.weight_kind != WeightKind::CustomArray;
  if (forced) {
    for (auto& e : estimates) e = TailEstimate::exact(1.0, trials_per_index);
  } else {
    run_parallel(static_cast<std::int64_t>(terms.size()), resolve_workers(workers),
                 [&](std::int64_t i) {
                   const auto& term = terms[static_cast<std::size_t>(i)];
                   const FieldSampler sampler(dist, term.index);
                   estimates[static_cast<std::size_t>(i)] = estimate_tail(
                       sampler, spec.statistic, term.threshold, trials_per_index,
                       mix_seed(seed, static_cast<std::uint64_t>(i)), spec.inclusive,
                       /*workers=*/1);
                 });
  }

  std::int64_t max_shell = 1;
  for (const auto& t : terms) max_shell = std::max(max_shell, t.index.max_coord());
  SeriesReport report;
  report.per_shell.resize(static_cast<std::size_t>(max_shell));
  for (std::int64_t s = 0; s < max_shell; ++s)
    report.per_shell[static_cast<std::size_t>(s)].shell = s + 1;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& term = terms[i];
    const auto& est = estimates[i];
    auto& shell = report.per_shell[static_cast<std::size_t>(term.index.max_coord() - 1)];
    shell.contribution += term.weight * est.p_hat;
    shell.ci_halfwidth += term.weight * est.ci_halfwidth;
    if (est.hits == 0) ++report.terms_skipped_zero;
  }
  for (const auto& row : report.per_shell) report.partial_sum += row.contribution;
  return report;
}

/// Deterministic weighted accumulation of externally supplied tail estimates;
/// half-widths scale by the weights and add. The two tables must carry the
/// same index sequence.
inline SeriesReport weighted_array_series(
    std::span<const std::pair<MultiIndex, double>> weights,
    std::span<const std::pair<MultiIndex, TailEstimate>> estimates) {
  if (weights.size() != estimates.size())
    throw InvalidInputError("weighted_array_series: index tables differ in size");
  std::int64_t max_shell = 1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i].first == estimates[i].first))
      throw InvalidInputError("weighted_array_series: index tables do not match");
    if (!(weights[i].second >= 0))
      throw InvalidInputError("weighted_array_series: weights must be >= 0");
    max_shell = std::max(max_shell, weights[i].first.max_coord());
  }
  SeriesReport report;
  report.per_shell.resize(static_cast<std::size_t>(max_shell));
  for (std::int64_t s = 0; s < max_shell; ++s)
    report.per_shell[static_cast<std::size_t>(s)].shell = s + 1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    auto& shell =
        report.per_shell[static_cast<std::size_t>(weights[i].first.max_coord() - 1)];
    shell.contribution += weights[i].second * estimates[i].second.p_hat;
    shell.ci_halfwidth += weights[i].second * estimates[i].second.ci_halfwidth;
    if (estimates[i].second.hits == 0) ++report.terms_skipped_zero;
  }
  for (const auto& row : report.per_shell) report.partial_sum += row.contribution;
  return report;
}

/// The epsilon threshold sqrt(kappa1 sigma2) * sqrt(r - 2) above which the
/// log-normed series is asserted finite; defined for r >= 2.
inline double half_log_epsilon_threshold(double kappa1, double sigma2, double r) {
  if (!(kappa1 > 0)) throw InvalidInputError("half_log_epsilon_threshold: kappa1 must be > 0");
  if (!(sigma2 >= 0)) throw InvalidInputError("half_log_epsilon_threshold: sigma2 must be >= 0");
  if (!(r >= 2.0)) throw InvalidInputError("half_log_epsilon_threshold: r must be >= 2");
  return std::sqrt(kappa1 * sigma2) * std::sqrt(r - 2.0);
}

}  // namespace fieldconc
