#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "fieldconc/bounds.hpp"

using namespace fieldconc;

namespace {
const double kE = std::exp(1.0);
}

TEST_CASE("product gap lower bound") {
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  CHECK(product_gap_lower_bound(zeros, 0.5) == 0.0);

  const std::vector<double> pair{0.1, 0.1};
  const double gap = product_gap_lower_bound(pair, 0.5);
  CHECK(gap == Catch::Approx(0.19));
  CHECK(gap >= (1.0 - 0.5) * 0.2);

  const std::vector<double> big{0.3};
  CHECK_THROWS_AS(product_gap_lower_bound(big, 0.1), ConditionNotMetError);
  CHECK(product_gap(big) == Catch::Approx(0.3));  // raw form skips the gate

  CHECK_THROWS_AS(product_gap_lower_bound(pair, 1.0), InvalidInputError);
  const std::vector<double> out_of_range{1.0};
  CHECK_THROWS_AS(product_gap(out_of_range), InvalidInputError);
}

TEST_CASE("product gap inequality on random admissible inputs") {
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  const auto next_unit = [&state] {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  };
  for (int rep = 0; rep < 2000; ++rep) {
    const double delta = 0.05 + 0.9 * next_unit();
    const std::size_t m = 1 + static_cast<std::size_t>(next_unit() * 20);
    std::vector<double> a(m);
    double sum = 0.0;
    for (auto& v : a) {
      v = next_unit();
      sum += v;
    }
    const double target = delta * (1.0 - delta) * next_unit();
    for (auto& v : a) v *= target / std::max(sum, 1e-300);
    double check_sum = 0.0;
    for (double v : a) check_sum += v;
    const double lhs = product_gap_lower_bound(a, delta);
    CHECK(lhs >= (1.0 - delta) * check_sum);
  }
}

TEST_CASE("nd exponential bound") {
  // the value only sees t, x and the variance budget; b gates t's range
  CHECK(nd_exponential_bound(0.0, 0.5, 1.0, 1.0, 1.0, 4) >= 1.0);
  CHECK(nd_exponential_bound(20.0, 0.5, 1.0, 1.0, 1.0, 4) ==
        Catch::Approx(std::exp(-6.0)).epsilon(1e-14));
  CHECK(nd_exponential_bound(3.0, 0.05, 10.0, 1.0, 0.0, 7) ==
        Catch::Approx(std::exp(-3.0 / 20.0)).epsilon(1e-14));
  CHECK_THROWS_AS(nd_exponential_bound(1.0, 0.0, 10.0, 1.0, 1.0, 1), InvalidInputError);
  CHECK_THROWS_AS(nd_exponential_bound(1.0, 0.1, 10.0, 1.0, 1.0, 1), InvalidInputError);
  CHECK_THROWS_AS(nd_exponential_bound(1.0, 0.5, 10.0, 1.0, 1.0, 1), InvalidInputError);
}

TEST_CASE("nd fuk-nagaev closed form") {
  MomentAggregates agg;
  agg.r = 2.0;
  agg.M_r = 1.0;
  const BoundValue v = nd_fuk_nagaev_bound(2.0, 1.0, agg);
  CHECK(v.max_term_threshold == 1.0);
  CHECK(v.analytic_term == Catch::Approx(2.0 * kE * kE / 27.0).epsilon(1e-14));

  agg.M_r = 0.0;
  CHECK(nd_fuk_nagaev_bound(2.0, 1.0, agg).analytic_term == 0.0);

  agg.r = 1.0;
  agg.M_r = 1.0;
  CHECK(nd_fuk_nagaev_bound(1.0, 1.0, agg).analytic_term ==
        Catch::Approx(kE / 2.0).epsilon(1e-14));

  // vanishing moments drive the term to 0
  agg.r = 2.0;
  double prev = 1e300;
  for (double m : {1e-2, 1e-4, 1e-6, 1e-8}) {
    agg.M_r = m;
    const double term = nd_fuk_nagaev_bound(2.0, 1.0, agg).analytic_term;
    CHECK(term < prev);
    prev = term;
  }
  CHECK(prev < 1e-10);
}

TEST_CASE("nd maximal-summand form") {
  MomentAggregates agg;
  agg.r = 2.0;
  agg.M_r = 0.0;
  CHECK(nd_hj_bound(1.0, 2.0, agg).analytic_term == 0.0);

  agg.M_r = 3.0;
  CHECK(nd_hj_bound(2.0, 1.0, agg).analytic_term ==
        Catch::Approx(2.0 * kE * 3.0 / 4.0).epsilon(1e-14));
  CHECK(nd_hj_bound(2.0, 1.0, agg).max_term_threshold == 2.0);

  agg.M_r = 1.0;
  CHECK(nd_hj_bound(1.0, 2.0, agg).analytic_term ==
        Catch::Approx(8.0 * kE * kE).epsilon(1e-14));
  CHECK_THROWS_AS(nd_hj_bound(0.0, 1.0, agg), InvalidInputError);
}

TEST_CASE("martingale one-sided bound") {
  MomentAggregates agg;
  agg.r = 2.0;
  agg.B_r = 1.0;
  agg.d = 1;
  CHECK(martingale_fuk_nagaev_onesided(2.0, 1.0, agg).analytic_term ==
        Catch::Approx(kE * kE / 27.0).epsilon(1e-14));
  agg.d = 3;
  CHECK(martingale_fuk_nagaev_onesided(2.0, 1.0, agg).analytic_term ==
        Catch::Approx(kE * kE * kE * kE / 27.0).epsilon(1e-13));

  MomentAggregates dx;
  dx.r = 1.0;
  dx.B_r = 1.0;
  dx.D = 1.0;
  CHECK(martingale_fuk_nagaev_onesided(1.0, 1.0, dx).analytic_term ==
        Catch::Approx(kE / 2.0).epsilon(1e-14));
}

TEST_CASE("martingale two-sided bound") {
  MomentAggregates agg;
  agg.r = 2.0;
  agg.M_tilde_r = 1.0;
  agg.d = 1;
  CHECK(martingale_fuk_nagaev_twosided(2.0, 1.0, agg).analytic_term ==
        Catch::Approx(2.0 * kE * kE / 27.0).epsilon(1e-14));

  // same core numbers as the one-sided form with (D, B_r) := (Lambda~, M~_r):
  // exactly twice the value
  MomentAggregates one;
  one.r = 2.0;
  one.B_r = 0.7;
  one.D = 0.2;
  MomentAggregates two;
  two.r = 2.0;
  two.M_tilde_r = 0.7;
  two.Lambda_tilde = 0.2;
  CHECK(martingale_fuk_nagaev_twosided(1.5, 0.8, two).analytic_term ==
        Catch::Approx(2.0 * martingale_fuk_nagaev_onesided(1.5, 0.8, one).analytic_term)
            .epsilon(1e-14));

  agg.d = 2;
  CHECK(martingale_fuk_nagaev_twosided(2.0, 1.0, agg).analytic_term ==
        Catch::Approx(2.0 * kE * kE * kE / 27.0).epsilon(1e-14));
}

TEST_CASE("martingale maximal-summand form") {
  MomentAggregates agg;
  agg.r = 2.0;
  agg.M_tilde_r = 0.0;
  CHECK(martingale_hj_bound(1.0, 1.0, agg).analytic_term == 0.0);

  agg.M_tilde_r = 2.0;
  agg.d = 1;
  CHECK(martingale_hj_bound(3.0, 1.0, agg).analytic_term ==
        Catch::Approx(2.0 * kE * 2.0 / 9.0).epsilon(1e-14));

  agg.M_tilde_r = 1.0;
  agg.d = 2;
  CHECK(martingale_hj_bound(1.0, 2.0, agg).analytic_term ==
        Catch::Approx(8.0 * kE * kE * kE).epsilon(1e-13));
}

TEST_CASE("doob factor") {
  for (double a : {1.5, 2.0, 10.0}) CHECK(doob_factor(a, 1) == 1.0);
  CHECK(doob_factor(2.0, 2) == Catch::Approx(4.0));
  CHECK_THROWS_AS(doob_factor(1.0, 2), InvalidInputError);

  // decreasing scan approaching e^{d-1} from above
  double prev = doob_factor(1.01, 3);
  for (double a = 1.5; a <= 50.0; a += 0.5) {
    const double v = doob_factor(a, 3);
    CHECK(v < prev);
    CHECK(v > kE * kE);
    prev = v;
  }
  CHECK(prev == Catch::Approx(kE * kE).epsilon(0.03));
}

TEST_CASE("analytic terms are non-increasing in x away from the small-x knee") {
  MomentAggregates agg;
  agg.r = 1.5;
  agg.M_r = 4.0;
  agg.M_tilde_r = 4.0;
  agg.B_r = 4.0;
  agg.d = 2;
  const double y = 1.2;
  // consistent truncated-mean aggregates are bounded by M_r / y^{r-1}
  agg.Lambda = 0.8 * agg.M_r / std::pow(y, agg.r - 1.0);
  agg.Lambda_tilde = agg.Lambda;
  agg.D = agg.Lambda;
  // monotone region of the printed forms: x y^{r-1} / M_r >= 1
  double x = agg.M_r / std::pow(y, agg.r - 1.0);
  const double inf = std::numeric_limits<double>::infinity();
  double fn_prev = inf, one_prev = inf, two_prev = inf, hj_prev = inf, mhj_prev = inf;
  for (int step = 0; step < 60; ++step, x *= 1.15) {
    const double fn = nd_fuk_nagaev_bound(x, y, agg).analytic_term;
    const double one = martingale_fuk_nagaev_onesided(x, y, agg).analytic_term;
    const double two = martingale_fuk_nagaev_twosided(x, y, agg).analytic_term;
    const double hj = nd_hj_bound(x, 2.0, agg).analytic_term;
    const double mhj = martingale_hj_bound(x, 2.0, agg).analytic_term;
    CHECK(fn <= fn_prev);
    CHECK(one <= one_prev);
    CHECK(two <= two_prev);
    CHECK(hj <= hj_prev);
    CHECK(mhj <= mhj_prev);
    fn_prev = fn;
    one_prev = one;
    two_prev = two;
    hj_prev = hj;
    mhj_prev = mhj;
  }
}

TEST_CASE("analytic terms are non-decreasing in the moment aggregate") {
  // asserted on the region x y^{r-1} / M_r >= e - 1 where the printed form is
  // monotone in the moment
  const double x = 40.0, y = 2.0;
  for (double r : {1.0, 1.5, 2.0}) {
    double fn_prev = -1.0, hj_prev = -1.0, two_prev = -1.0;
    for (double m = 0.25; m * (std::exp(1.0) - 1.0) <= x * std::pow(y, r - 1.0); m *= 1.3) {
      MomentAggregates agg;
      agg.r = r;
      agg.M_r = m;
      agg.M_tilde_r = m;
      const double fn = nd_fuk_nagaev_bound(x, y, agg).analytic_term;
      const double hj = nd_hj_bound(x, 2.0, agg).analytic_term;
      const double two = martingale_fuk_nagaev_twosided(x, y, agg).analytic_term;
      CHECK(fn >= fn_prev);
      CHECK(hj >= hj_prev);
      CHECK(two >= two_prev);
      fn_prev = fn;
      hj_prev = hj;
      two_prev = two;
    }
  }
}

TEST_CASE("fuk-nagaev at y = x/j is dominated by the maximal-summand constant") {
  for (double r : {1.0, 1.5, 2.0}) {
    for (double j : {1.0, 2.0, 3.0}) {
      for (double ratio = 1.0; ratio <= 100.0; ratio *= 1.6) {
        MomentAggregates agg;
        agg.r = r;
        agg.M_r = 1.0;
        const double x = ratio;  // x / M_r^{1/r} = ratio
        const double fn = nd_fuk_nagaev_bound(x, x / j, agg).analytic_term;
        const double hj = nd_hj_bound(x, j, agg).analytic_term;
        CHECK(fn <= hj * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("bound evaluators are pure") {
  MomentAggregates agg;
  agg.r = 1.7;
  agg.M_r = 2.5;
  agg.Lambda = 0.3;
  const double a = nd_fuk_nagaev_bound(3.0, 1.1, agg).analytic_term;
  const double b = nd_fuk_nagaev_bound(3.0, 1.1, agg).analytic_term;
  CHECK(a == b);
}
