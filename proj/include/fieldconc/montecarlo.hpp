#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "fieldconc/bounds.hpp"
#include "fieldconc/distribution.hpp"
#include "fieldconc/errors.hpp"
#include "fieldconc/field.hpp"
#include "fieldconc/samplers.hpp"

namespace fieldconc {

/// Statistic of one field realization whose tail is being estimated.
enum class TailStatistic {
  AbsSum,           // |S_n|
  Sum,              // S_n
  MaxAbs,           // max_{k<=n} |S_k|
  MaxSum,           // max_{k<=n} S_k
  MaxSiteAbs,       // max_{k<=n} |X_k|
  MaxSiteOneSided,  // max_{k<=n} X_k
};

inline const char* statistic_name(TailStatistic s) {
  switch (s) {
    case TailStatistic::AbsSum: return "abs_sum";
    case TailStatistic::Sum: return "sum";
    case TailStatistic::MaxAbs: return "max_abs";
    case TailStatistic::MaxSum: return "max_sum";
    case TailStatistic::MaxSiteAbs: return "max_site_abs";
    default: return "max_site_onesided";
  }
}

inline TailStatistic parse_statistic(const std::string& name) {
  if (name == "abs_sum") return TailStatistic::AbsSum;
  if (name == "sum") return TailStatistic::Sum;
  if (name == "max_abs") return TailStatistic::MaxAbs;
  if (name == "max_sum") return TailStatistic::MaxSum;
  if (name == "max_site_abs") return TailStatistic::MaxSiteAbs;
  if (name == "max_site_onesided") return TailStatistic::MaxSiteOneSided;
  throw InvalidInputError("unknown statistic \"" + name + "\"");
}

/// Evaluates the statistic on a realization. `values` is scratch: the
/// max-of-partial-sums statistics overwrite it with the prefix table.
inline double evaluate_statistic(TailStatistic stat, const MultiIndex& shape,
                                 std::span<double> values) {
  switch (stat) {
    case TailStatistic::AbsSum:
    case TailStatistic::Sum: {
      double s = 0.0;
      for (double v : values) s += v;
      return stat == TailStatistic::AbsSum ? std::abs(s) : s;
    }
    case TailStatistic::MaxSiteAbs: {
      double m = 0.0;
      for (double v : values) m = std::max(m, std::abs(v));
      return m;
    }
    case TailStatistic::MaxSiteOneSided: {
      double m = -std::numeric_limits<double>::infinity();
      for (double v : values) m = std::max(m, v);
      return m;
    }
    case TailStatistic::MaxAbs:
    case TailStatistic::MaxSum: {
      prefix_sums_in_place(shape, values);
      double m = stat == TailStatistic::MaxAbs ? 0.0 : -std::numeric_limits<double>::infinity();
      for (double v : values)
        m = std::max(m, stat == TailStatistic::MaxAbs ? std::abs(v) : v);
      return m;
    }
  }
  throw InvalidInputError("unknown statistic");
}

inline constexpr double kWilsonZ = 1.959963984540054;  // 97.5% normal quantile

/// 95% Wilson half-width; rule-of-three 3/trials at the empty and full
/// extremes where the Wilson width collapses.
inline double wilson_halfwidth(std::int64_t hits, std::int64_t trials) {
  if (trials < 1) throw InvalidInputError("wilson_halfwidth: trials must be >= 1");
  if (hits == 0 || hits == trials)
    return std::min(1.0, 3.0 / static_cast<double>(trials));
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  return kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
}

/// Monte Carlo tail probability with its 95% interval half-width.
struct TailEstimate {
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  double p_hat = 0.0;
  double ci_halfwidth = 0.0;

  static TailEstimate from_counts(std::int64_t hits, std::int64_t trials) {
    if (trials < 1) throw InvalidInputError("TailEstimate: trials must be >= 1");
    if (hits < 0 || hits > trials) throw InvalidInputError("TailEstimate: hits out of range");
    return {hits, trials, static_cast<double>(hits) / static_cast<double>(trials),
            wilson_halfwidth(hits, trials)};
  }

  /// A certain probability, recorded without statistical error (used by the
  /// epsilon = 0 pseudo-mode of series scans).
  static TailEstimate exact(double p, std::int64_t trials) {
    return {static_cast<std::int64_t>(std::llround(p * static_cast<double>(trials))), trials, p,
            0.0};
  }
};

/// Worker count resolution: explicit > 0 wins, then FIELDCONC_WORKERS, then
/// hardware concurrency.
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FIELDCONC_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Runs fn(0..tasks-1) across `workers` threads. Tasks must be independent;
/// any result that depends on task order must be slotted by task index.
template <class Fn>
inline void run_parallel(std::int64_t tasks, int workers, Fn&& fn) {
  if (workers <= 1 || tasks <= 1) {
    for (std::int64_t i = 0; i < tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  const auto work = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= tasks) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int extra = std::min<std::int64_t>(workers - 1, tasks - 1);
  pool.reserve(static_cast<std::size_t>(extra));
  for (int w = 0; w < extra; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

/// Estimates P(statistic > threshold) (or >= with `inclusive`) over `trials`
/// independent realizations. Trials are keyed by index through the
/// counter-based generator, and hit counts combine by integer addition, so the
/// result is bit-identical for any worker count.
inline TailEstimate estimate_tail(const FieldSampler& sampler, TailStatistic stat,
                                  double threshold, std::int64_t trials, std::uint64_t seed,
                                  bool inclusive = false, int workers = 0) {
  if (trials < 1) throw InvalidInputError("estimate_tail: trials must be >= 1");
  const int nworkers = resolve_workers(workers);
  constexpr std::int64_t kBlock = 4096;
  const std::int64_t blocks = (trials + kBlock - 1) / kBlock;
  std::atomic<std::int64_t> total_hits{0};
  run_parallel(blocks, nworkers, [&](std::int64_t block) {
    std::vector<double> scratch(static_cast<std::size_t>(sampler.site_count()));
    std::int64_t hits = 0;
    const std::int64_t lo = block * kBlock;
    const std::int64_t hi = std::min(trials, lo + kBlock);
    for (std::int64_t t = lo; t < hi; ++t) {
      sampler.sample_into(seed, static_cast<std::uint64_t>(t), scratch);
      const double s = evaluate_statistic(stat, sampler.shape(), scratch);
      if (inclusive ? (s >= threshold) : (s > threshold)) ++hits;
    }
    total_hits.fetch_add(hits, std::memory_order_relaxed);
  });
  return TailEstimate::from_counts(total_hits.load(), trials);
}

enum class BoundKind {
  NdFukNagaev,
  NdHj,
  NdExponential,
  MartingaleOneSided,
  MartingaleTwoSided,
  MartingaleHj,
};

inline const char* bound_name(BoundKind k) {
  switch (k) {
    case BoundKind::NdFukNagaev: return "nd_fuk_nagaev";
    case BoundKind::NdHj: return "nd_hj";
    case BoundKind::NdExponential: return "nd_exponential";
    case BoundKind::MartingaleOneSided: return "martingale_fuk_nagaev_onesided";
    case BoundKind::MartingaleTwoSided: return "martingale_fuk_nagaev_twosided";
    default: return "martingale_hj";
  }
}

inline BoundKind parse_bound(const std::string& name) {
  if (name == "nd_fuk_nagaev") return BoundKind::NdFukNagaev;
  if (name == "nd_hj") return BoundKind::NdHj;
  if (name == "nd_exponential") return BoundKind::NdExponential;
  if (name == "martingale_fuk_nagaev_onesided") return BoundKind::MartingaleOneSided;
  if (name == "martingale_fuk_nagaev_twosided") return BoundKind::MartingaleTwoSided;
  if (name == "martingale_hj") return BoundKind::MartingaleHj;
  throw InvalidInputError("unknown bound \"" + name + "\"");
}

inline bool is_martingale_bound(BoundKind k) {
  return k == BoundKind::MartingaleOneSided || k == BoundKind::MartingaleTwoSided ||
         k == BoundKind::MartingaleHj;
}

/// One domination check: a bound kind with its evaluation point. Exactly one
/// of y or j is set for the Fuk-Nagaev/maximal-summand forms; t is the free
/// exponential-tilt parameter of the exponential bound.
struct BoundCheck {
  BoundKind kind = BoundKind::NdHj;
  double x = 1.0;
  double y = std::numeric_limits<double>::quiet_NaN();
  double j = std::numeric_limits<double>::quiet_NaN();
  double r = 2.0;
  double t = std::numeric_limits<double>::quiet_NaN();
  double kappa1 = 1.0;
  bool inclusive = false;
};

/// Exact moment aggregates of a field law, computed from the closed forms of
/// the site-level distribution (never estimated). y is the truncation level
/// entering Lambda and the conditional aggregates.
///
/// For the martingale product construction the conditional aggregates are the
/// almost-sure bounds implied by the bounded axis law (sup-based); they
/// require a bounded axis generator.
inline MomentAggregates exact_aggregates(const FieldDistribution& fd, const MultiIndex& n,
                                         double r, double y) {
  MomentAggregates agg;
  agg.r = r;
  agg.d = n.dim();
  const double count = static_cast<double>(n.count());
  if (fd.dependence == Dependence::MartingaleProduct) {
    const double s = fd.dist.sup_abs();
    if (std::isinf(s))
      throw InvalidInputError(
          "exact_aggregates: martingale aggregates need a bounded axis generator");
    const double site_bound = std::pow(s, n.dim());  // |X_k| <= s^d a.s.
    agg.M_r = count * std::pow(fd.dist.abs_moment(r), n.dim());
    agg.M_tilde_r = count * std::pow(site_bound, r);
    agg.B_r = count * std::pow(std::min(site_bound, y), r);
    agg.Lambda_tilde = site_bound > y ? count * site_bound : 0.0;
    agg.D = site_bound > y ? count * site_bound : 0.0;
    // Lambda stays 0: the unconditional-aggregate bounds reject product fields.
  } else if (fd.site_dists.empty()) {
    agg.M_r = count * fd.dist.abs_moment(r);
    agg.Lambda = count * fd.dist.abs_mean_above(y);
  } else {
    for (const auto& d : fd.site_dists) {
      agg.M_r += d.abs_moment(r);
      agg.Lambda += d.abs_mean_above(y);
    }
  }
  return agg;
}

/// sum_k E X_k 1[X_k >= -y]: the one-sided truncated-mean aggregate, exposed
/// for comparison with the |X|-based Lambda.
inline double lambda_onesided_sum(const FieldDistribution& fd, const MultiIndex& n, double y) {
  if (!fd.site_dists.empty()) {
    double total = 0.0;
    for (const auto& d : fd.site_dists) total += d.lower_truncated_mean(y);
    return total;
  }
  return static_cast<double>(n.count()) * fd.dist.lower_truncated_mean(y);
}

/// Outcome of one empirical-vs-analytic comparison. bound_total adds the
/// estimated maximal-summand probability to the analytic term; pass allows a
/// 3-half-width slack so a suite of verdicts has a controlled false-alarm
/// budget.
struct DominationVerdict {
  BoundKind kind = BoundKind::NdHj;
  double x = 0.0;
  double y_or_j = 0.0;
  TailEstimate empirical;
  TailEstimate max_term;
  bool has_max_term = true;
  double analytic = 0.0;
  double bound_total = 0.0;
  double margin = 0.0;
  bool pass = false;
};

/// Runs the two tail estimations for one bound and compares against the
/// analytic term computed from exact aggregates. The bound's hypothesis class
/// must match the sampler's dependence kind.
inline DominationVerdict verify_domination(const FieldSampler& sampler, const BoundCheck& check,
                                           std::int64_t trials, std::uint64_t seed,
                                           int workers = 0) {
  const FieldDistribution& fd = sampler.distribution();
  const bool mart = is_martingale_bound(check.kind);
  if (mart && fd.dependence != Dependence::MartingaleProduct)
    throw InvalidInputError(std::string("verify_domination: ") + bound_name(check.kind) +
                            " requires a martingale_product field, got " +
                            dependence_name(fd.dependence));
  if (!mart && fd.dependence == Dependence::MartingaleProduct)
    throw InvalidInputError(std::string("verify_domination: ") + bound_name(check.kind) +
                            " requires an independent or na_gaussian field, got " +
                            dependence_name(fd.dependence));
  if (!(check.x > 0)) throw InvalidInputError("verify_domination: x must be > 0");

  const bool uses_j =
      check.kind == BoundKind::NdHj || check.kind == BoundKind::MartingaleHj;
  double y = check.y;
  if (uses_j) {
    if (!(check.j > 0)) throw InvalidInputError("verify_domination: j must be > 0");
    y = check.x / check.j;
  } else if (check.kind != BoundKind::NdExponential && !(y > 0)) {
    throw InvalidInputError("verify_domination: y must be > 0");
  }

  DominationVerdict verdict;
  verdict.kind = check.kind;
  verdict.x = check.x;
  verdict.y_or_j = uses_j ? check.j : y;

  TailStatistic main_stat;
  TailStatistic max_stat = TailStatistic::MaxSiteAbs;
  switch (check.kind) {
    case BoundKind::NdFukNagaev:
    case BoundKind::NdHj:
      main_stat = TailStatistic::AbsSum;
      break;
    case BoundKind::NdExponential:
      main_stat = TailStatistic::Sum;
      verdict.has_max_term = false;
      break;
    case BoundKind::MartingaleOneSided:
      main_stat = TailStatistic::MaxSum;
      max_stat = TailStatistic::MaxSiteOneSided;
      break;
    default:
      main_stat = TailStatistic::MaxAbs;
      break;
  }

  const MomentAggregates agg = exact_aggregates(fd, sampler.shape(),
                                                check.kind == BoundKind::NdExponential ? 2.0
                                                                                       : check.r,
                                                verdict.has_max_term ? y : 1.0);
  switch (check.kind) {
    case BoundKind::NdFukNagaev:
      verdict.analytic = nd_fuk_nagaev_bound(check.x, y, agg).analytic_term;
      break;
    case BoundKind::NdHj:
      verdict.analytic = nd_hj_bound(check.x, check.j, agg).analytic_term;
      break;
    case BoundKind::NdExponential: {
      const double b = fd.dist.upper_support();
      if (std::isinf(b))
        throw InvalidInputError("verify_domination: nd_exponential needs a bounded-above law");
      verdict.analytic = nd_exponential_bound(check.x, check.t, b, check.kappa1,
                                              fd.dist.second_moment(), sampler.site_count());
      break;
    }
    case BoundKind::MartingaleOneSided:
      verdict.analytic = martingale_fuk_nagaev_onesided(check.x, y, agg).analytic_term;
      break;
    case BoundKind::MartingaleTwoSided:
      verdict.analytic = martingale_fuk_nagaev_twosided(check.x, y, agg).analytic_term;
      break;
    case BoundKind::MartingaleHj:
      verdict.analytic = martingale_hj_bound(check.x, check.j, agg).analytic_term;
      break;
  }

  verdict.empirical =
      estimate_tail(sampler, main_stat, check.x, trials, seed, check.inclusive, workers);
  double ci = verdict.empirical.ci_halfwidth;
  if (verdict.has_max_term) {
    verdict.max_term = estimate_tail(sampler, max_stat, y, trials, mix_seed(seed, 0x6d617874u),
                                     check.inclusive, workers);
    ci += verdict.max_term.ci_halfwidth;
  }
  verdict.bound_total = (verdict.has_max_term ? verdict.max_term.p_hat : 0.0) + verdict.analytic;
  verdict.margin = verdict.bound_total - verdict.empirical.p_hat;
  verdict.pass = verdict.margin >= -3.0 * ci;
  return verdict;
}

}  // namespace fieldconc
