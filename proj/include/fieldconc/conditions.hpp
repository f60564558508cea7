#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "fieldconc/distribution.hpp"
#include "fieldconc/errors.hpp"
#include "fieldconc/multi_index.hpp"
#include "fieldconc/quadrature.hpp"

namespace fieldconc {

struct WmbProbeRow {
  double x = 0.0;
  double mean_tail = 0.0;
  double xi_tail = 0.0;
  double ratio = 0.0;  // mean_tail / xi_tail; +inf on domination failure, NaN when 0/0
};

/// Grid-relative weak-mean-boundedness constants. kappa1_hat is the smallest
/// constant making the upper sandwich hold on the probe grid, kappa2_hat the
/// largest for the lower one. The report refutes soundly and gives evidence
/// for satisfaction; it cannot certify the for-all-x statement.
struct WmbReport {
  double kappa1_hat = 0.0;
  double kappa2_hat = 0.0;
  std::vector<double> probe_xs;
  std::vector<WmbProbeRow> rows;
  bool holds_wmd = false;
  bool holds_wmb = false;
};

/// Compares the site-averaged tail (1/|n|) sum_k P(|X_k| > x) against the
/// dominating tail P(|xi| > x) on an explicit probe grid, using exact
/// closed-form tails. `sites` holds either one shared law or one per site.
inline WmbReport check_wmb(std::span<const ScalarDistribution> sites, const ScalarDistribution& xi,
                           std::span<const double> probes, const MultiIndex& n) {
  if (probes.empty()) throw InvalidInputError("check_wmb: probe grid must be nonempty");
  for (double x : probes)
    if (!(x > 0)) throw InvalidInputError("check_wmb: probes must be > 0");
  const std::int64_t count = n.count();
  if (sites.size() != 1 && static_cast<std::int64_t>(sites.size()) != count)
    throw InvalidInputError("check_wmb: need one shared site law or one per site");

  WmbReport report;
  report.probe_xs.assign(probes.begin(), probes.end());
  double k1 = 0.0;
  double k2 = std::numeric_limits<double>::infinity();
  bool violated = false;
  bool any_comparable = false;
  for (double x : probes) {
    WmbProbeRow row;
    row.x = x;
    if (sites.size() == 1) {
      // Shared law: the site average is the tail itself, exactly.
      row.mean_tail = sites[0].tail(x);
    } else {
      double sum = 0.0;
      for (const auto& s : sites) sum += s.tail(x);
      row.mean_tail = sum / static_cast<double>(count);
    }
    row.xi_tail = xi.tail(x);
    if (row.xi_tail > 0.0) {
      row.ratio = row.mean_tail / row.xi_tail;
      any_comparable = true;
      k1 = std::max(k1, row.ratio);
      k2 = std::min(k2, row.ratio);
    } else if (row.mean_tail > 0.0) {
      row.ratio = std::numeric_limits<double>::infinity();
      violated = true;
    } else {
      row.ratio = std::numeric_limits<double>::quiet_NaN();
    }
    report.rows.push_back(row);
  }
  report.kappa1_hat = violated ? std::numeric_limits<double>::infinity() : k1;
  report.kappa2_hat = any_comparable ? k2 : 0.0;
  report.holds_wmd = !violated;
  report.holds_wmb = report.holds_wmd && any_comparable && report.kappa2_hat > 0.0;
  return report;
}

/// E |xi|^r (log_+ |xi|)^{p-1}, exact for the discrete kinds and by adaptive
/// quadrature against the density otherwise. log_+ t = max(log t, 0).
inline double moment_functional(const ScalarDistribution& xi, double r, int p) {
  if (!(r >= 1.0)) throw InvalidInputError("moment_functional: r must be >= 1");
  if (p < 1) throw InvalidInputError("moment_functional: p must be >= 1");
  const auto log_plus_pow = [p](double t) {
    if (p == 1) return 1.0;
    const double l = t > 1.0 ? std::log(t) : 0.0;
    return std::pow(l, p - 1);
  };
  switch (xi.kind()) {
    case ScalarDistribution::Kind::Constant: {
      const double c = std::abs(xi.param_a());
      return std::pow(c, r) * log_plus_pow(c);
    }
    case ScalarDistribution::Kind::TwoPoint: {
      const double c = xi.param_b();
      return std::pow(c, r) * log_plus_pow(c);
    }
    case ScalarDistribution::Kind::Gaussian: {
      const double sigma = xi.sigma();
      const auto integrand = [&](double x) {
        return 2.0 * std::pow(x, r) * log_plus_pow(x) *
               detail::std_normal_pdf(x / sigma) / sigma;
      };
      // Split at |x| = 1 where log_+ kinks. The cutoff keeps the discarded
      // tail below e^{-72} relatively while the nodes stay representable.
      const double upper = std::max(12.0 * sigma, 2.0);
      double total = 0.0;
      if (p == 1) total += detail::integrate(integrand, 0.0, std::min(1.0, upper));
      if (upper > 1.0) total += detail::integrate(integrand, 1.0, upper);
      return total;
    }
    default: {
      const double a = xi.param_a();
      const double b = xi.param_b();
      const double density = 1.0 / (b - a);
      const auto integrand = [&](double x) {
        const double ax = std::abs(x);
        return std::pow(ax, r) * log_plus_pow(ax) * density;
      };
      double total = 0.0;
      double lo = a;
      for (double cut : {-1.0, 0.0, 1.0}) {
        if (cut > lo && cut < b) {
          total += detail::integrate(integrand, lo, cut);
          lo = cut;
        }
      }
      total += detail::integrate(integrand, lo, b);
      return total;
    }
  }
}

/// Number of ordered p-tuples of positive integers with product nu, computed
/// by factorization: each prime exponent e contributes C(e + p - 1, p - 1).
inline std::int64_t divisor_count(std::int64_t nu, int p) {
  if (nu < 1) throw InvalidInputError("divisor_count: nu must be >= 1");
  if (p < 1) throw InvalidInputError("divisor_count: p must be >= 1");
  const auto choose = [](std::int64_t n, std::int64_t k) {
    std::int64_t out = 1;
    for (std::int64_t i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
  };
  std::int64_t result = 1;
  std::int64_t rest = nu;
  for (std::int64_t q = 2; q * q <= rest; ++q) {
    if (rest % q != 0) continue;
    std::int64_t e = 0;
    while (rest % q == 0) {
      rest /= q;
      ++e;
    }
    result *= choose(e + p - 1, p - 1);
  }
  if (rest > 1) result *= choose(1 + p - 1, p - 1);
  return result;
}

struct TruncatedSeriesReport {
  double partial_sum = 0.0;
  // shell_contribution[s-1] sums the terms whose max coordinate equals s.
  std::vector<double> shell_contribution;

  double last_shell() const {
    return shell_contribution.empty() ? 0.0 : shell_contribution.back();
  }
};

/// Partial sum of sum_n E[xi^2 ; |xi| <= |n^alpha|] / |n^alpha|^2 over the
/// cube n_i <= N, with per-shell contributions (shell = max coordinate) as a
/// convergence indicator. Requires alpha_1 > 1/2.
inline TruncatedSeriesReport truncated_second_moment_series(const ScalarDistribution& xi,
                                                            const AlphaVector& alpha,
                                                            std::int64_t N) {
  if (!(alpha.alpha1() > 0.5))
    throw InvalidInputError("truncated_second_moment_series: requires alpha_1 > 1/2");
  if (N < 1) throw InvalidInputError("truncated_second_moment_series: N must be >= 1");
  const MultiIndex cube = MultiIndex::cube(alpha.dim(), N);
  TruncatedSeriesReport report;
  report.shell_contribution.assign(static_cast<std::size_t>(N), 0.0);
  for_each_index(cube, [&](const std::vector<std::int64_t>& k, std::int64_t) {
    const MultiIndex idx{std::vector<std::int64_t>(k)};
    const double norm = index_norm(idx, alpha);
    const double term = xi.truncated_second_moment(norm) / (norm * norm);
    report.shell_contribution[static_cast<std::size_t>(idx.max_coord() - 1)] += term;
  });
  for (double s : report.shell_contribution) report.partial_sum += s;
  return report;
}

}  // namespace fieldconc
