#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fieldconc/errors.hpp"

namespace fieldconc {

/// Moment aggregates entering the tail bounds. The unconditional aggregates
/// (M_r, Lambda) describe sums over the rectangle of per-site absolute
/// moments; the tilde/B/D aggregates are the conditional-moment counterparts
/// used by the martingale bounds. Lambda carries sum_k E|X_k| 1[|X_k| >= y]
/// (the variant that keeps the proof chain valid); the one-sided
/// E X_k 1[X_k >= -y] aggregate is available separately for comparison.
struct MomentAggregates {
  double M_r = 0.0;
  double Lambda = 0.0;
  double B_r = 0.0;
  double D = 0.0;
  double M_tilde_r = 0.0;
  double Lambda_tilde = 0.0;
  double r = 2.0;
  int d = 1;

  void validate() const {
    if (!(r >= 1.0 && r <= 2.0)) throw InvalidInputError("MomentAggregates: r must lie in [1, 2]");
    if (d < 1) throw InvalidInputError("MomentAggregates: d must be >= 1");
    if (M_r < 0 || Lambda < 0 || B_r < 0 || D < 0 || M_tilde_r < 0 || Lambda_tilde < 0)
      throw InvalidInputError("MomentAggregates: aggregates must be >= 0");
  }
};

/// A tail bound split into the maximal-summand probability (estimated
/// elsewhere, at max_term_threshold) and the closed-form remainder.
struct BoundValue {
  double max_term_threshold = 0.0;
  double analytic_term = 0.0;
};

/// 1 - prod(1 - a_i), no side condition checked.
inline double product_gap(std::span<const double> a) {
  double prod = 1.0;
  for (double v : a) {
    if (!(v >= 0.0 && v < 1.0))
      throw InvalidInputError("product_gap: entries must lie in [0, 1)");
    prod *= 1.0 - v;
  }
  return 1.0 - prod;
}

/// 1 - prod(1 - a_i) under the smallness condition sum a <= delta(1-delta),
/// which guarantees the value is >= (1-delta) * sum a.
inline double product_gap_lower_bound(std::span<const double> a, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidInputError("product_gap_lower_bound: delta must lie in (0, 1)");
  double sum = 0.0;
  for (double v : a) sum += v;
  if (sum > delta * (1.0 - delta))
    throw ConditionNotMetError("product_gap_lower_bound: sum a exceeds delta*(1-delta)");
  return product_gap(a);
}

/// Exponential bound exp(-t x + kappa1 sigma2 n_count) for sums of
/// upper-bounded variables, valid for 0 < t < 1/b. Evaluated literally; it is
/// vacuous (>= 1) whenever the exponent is nonnegative.
inline double nd_exponential_bound(double x, double t, double b, double kappa1, double sigma2,
                                   std::int64_t n_count) {
  if (!(x >= 0)) throw InvalidInputError("nd_exponential_bound: x must be >= 0");
  if (!(b > 0)) throw InvalidInputError("nd_exponential_bound: b must be > 0");
  if (!(t > 0.0) || !(t < 1.0 / b))
    throw InvalidInputError("nd_exponential_bound: t must lie in (0, 1/b)");
  if (!(kappa1 > 0)) throw InvalidInputError("nd_exponential_bound: kappa1 must be > 0");
  if (!(sigma2 >= 0)) throw InvalidInputError("nd_exponential_bound: sigma2 must be >= 0");
  if (n_count < 1) throw InvalidInputError("nd_exponential_bound: n_count must be >= 1");
  return std::exp(-t * x + kappa1 * sigma2 * static_cast<double>(n_count));
}

/// Fuk-Nagaev remainder for negatively dependent fields:
///   2 exp{ x/y - (x/y - Lambda/y + M_r/y^r) ln(1 + x y^{r-1} / M_r) }.
/// M_r == 0 returns the limit value 0.
inline BoundValue nd_fuk_nagaev_bound(double x, double y, const MomentAggregates& agg) {
  if (!(x > 0) || !(y > 0)) throw InvalidInputError("nd_fuk_nagaev_bound: x and y must be > 0");
  agg.validate();
  if (agg.M_r == 0.0) return {y, 0.0};
  const double ratio = x / y;
  const double moment = agg.M_r / std::pow(y, agg.r);
  const double logterm = std::log1p(x * std::pow(y, agg.r - 1.0) / agg.M_r);
  const double term = 2.0 * std::exp(ratio - (ratio - agg.Lambda / y + moment) * logterm);
  return {y, term};
}

/// Maximal-summand form with the substitution y = x/j; the remainder carries
/// the explicit constant 2 e^j j^{(r-1)j}:
///   2 e^j j^{(r-1)j} (M_r / x^r)^j.
inline BoundValue nd_hj_bound(double x, double j, const MomentAggregates& agg) {
  if (!(x > 0) || !(j > 0)) throw InvalidInputError("nd_hj_bound: x and j must be > 0");
  agg.validate();
  if (agg.M_r == 0.0) return {x / j, 0.0};
  const double log_term = std::log(2.0) + j + (agg.r - 1.0) * j * std::log(j) +
                          j * (std::log(agg.M_r) - agg.r * std::log(x));
  return {x / j, std::exp(log_term)};
}

/// One-sided martingale-field bound:
///   e^{d-1} exp{ x/y - ((x - D)/y + B_r/y^r) ln(x y^{r-1} / B_r + 1) }.
inline BoundValue martingale_fuk_nagaev_onesided(double x, double y, const MomentAggregates& agg) {
  if (!(x > 0) || !(y > 0))
    throw InvalidInputError("martingale_fuk_nagaev_onesided: x and y must be > 0");
  agg.validate();
  if (agg.B_r == 0.0) return {y, 0.0};
  const double moment = agg.B_r / std::pow(y, agg.r);
  const double logterm = std::log1p(x * std::pow(y, agg.r - 1.0) / agg.B_r);
  const double term = std::exp(static_cast<double>(agg.d - 1)) *
                      std::exp(x / y - ((x - agg.D) / y + moment) * logterm);
  return {y, term};
}

/// Two-sided martingale-field bound; same shape with (Lambda~, M~_r) and the
/// leading factor 2 e^{d-1}.
inline BoundValue martingale_fuk_nagaev_twosided(double x, double y, const MomentAggregates& agg) {
  if (!(x > 0) || !(y > 0))
    throw InvalidInputError("martingale_fuk_nagaev_twosided: x and y must be > 0");
  agg.validate();
  if (agg.M_tilde_r == 0.0) return {y, 0.0};
  const double moment = agg.M_tilde_r / std::pow(y, agg.r);
  const double logterm = std::log1p(x * std::pow(y, agg.r - 1.0) / agg.M_tilde_r);
  const double term = 2.0 * std::exp(static_cast<double>(agg.d - 1)) *
                      std::exp(x / y - ((x - agg.Lambda_tilde) / y + moment) * logterm);
  return {y, term};
}

/// Maximal-summand form of the two-sided martingale bound with the explicit
/// constant 2 e^{d-1} e^j j^{(r-1)j} obtained by substituting y = x/j:
///   2 e^{d-1} e^j j^{(r-1)j} (M~_r / x^r)^j.
inline BoundValue martingale_hj_bound(double x, double j, const MomentAggregates& agg) {
  if (!(x > 0) || !(j > 0)) throw InvalidInputError("martingale_hj_bound: x and j must be > 0");
  agg.validate();
  if (agg.M_tilde_r == 0.0) return {x / j, 0.0};
  const double log_term = std::log(2.0) + static_cast<double>(agg.d - 1) + j +
                          (agg.r - 1.0) * j * std::log(j) +
                          j * (std::log(agg.M_tilde_r) - agg.r * std::log(x));
  return {x / j, std::exp(log_term)};
}

/// Cost of taking maxima over a d-dimensional index set:
/// (alpha/(alpha-1))^{alpha(d-1)}, decreasing in alpha with infimum e^{d-1}.
inline double doob_factor(double alpha, int d) {
  if (!(alpha > 1.0)) throw InvalidInputError("doob_factor: alpha must be > 1");
  if (d < 1) throw InvalidInputError("doob_factor: d must be >= 1");
  return std::pow(alpha / (alpha - 1.0), alpha * static_cast<double>(d - 1));
}

}  // namespace fieldconc
