#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "fieldconc/errors.hpp"
#include "fieldconc/rng.hpp"

namespace fieldconc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) * 0.3989422804014326779399461;  // 1/sqrt(2*pi)
}

// Antiderivative of |x|.
inline double abs_antideriv(double x) { return 0.5 * x * std::abs(x); }

// Antiderivative of sign(x)*|x|^r (i.e. of d/dx applied to |x|^{r+1}/(r+1)).
inline double abs_pow_antideriv(double x, double r) {
  const double v = std::pow(std::abs(x), r + 1.0) / (r + 1.0);
  return x >= 0 ? v : -v;
}

}  // namespace detail

/// A site-level law with closed-form moments and tails. Sampling is addressed
/// by a RandomBlock, so a draw depends only on (seed, trial, ordinal).
class ScalarDistribution {
 public:
  enum class Kind { Constant, TwoPoint, Uniform, Gaussian, CenteredUniform };

  ScalarDistribution() : kind_(Kind::Constant), a_(0), b_(0) {}

  static ScalarDistribution constant(double c) { return {Kind::Constant, c, c}; }

  /// +c or -c with equal probability; c > 0.
  static ScalarDistribution two_point(double c) {
    if (!(c > 0)) throw InvalidInputError("two_point: c must be > 0");
    return {Kind::TwoPoint, -c, c};
  }

  static ScalarDistribution uniform(double a, double b) {
    if (!(a < b)) throw InvalidInputError("uniform: requires a < b");
    return {Kind::Uniform, a, b};
  }

  /// Centered normal with standard deviation sigma > 0.
  static ScalarDistribution gaussian(double sigma) {
    if (!(sigma > 0)) throw InvalidInputError("gaussian: sigma must be > 0");
    return {Kind::Gaussian, sigma, sigma};
  }

  /// Uniform on (-h, h); h > 0.
  static ScalarDistribution centered_uniform(double h) {
    if (!(h > 0)) throw InvalidInputError("centered_uniform: half width must be > 0");
    return {Kind::CenteredUniform, -h, h};
  }

  Kind kind() const { return kind_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  double sigma() const { return a_; }  // Gaussian only

  bool is_uniform_family() const {
    return kind_ == Kind::Uniform || kind_ == Kind::CenteredUniform;
  }

  double mean() const {
    switch (kind_) {
      case Kind::Constant: return a_;
      case Kind::TwoPoint: return 0.0;
      case Kind::Gaussian: return 0.0;
      default: return 0.5 * (a_ + b_);
    }
  }

  double second_moment() const {
    switch (kind_) {
      case Kind::Constant: return a_ * a_;
      case Kind::TwoPoint: return b_ * b_;
      case Kind::Gaussian: return a_ * a_;
      default: return (a_ * a_ + a_ * b_ + b_ * b_) / 3.0;
    }
  }

  /// E|X|^r for r >= 0.
  double abs_moment(double r) const {
    if (!(r >= 0)) throw InvalidInputError("abs_moment: r must be >= 0");
    switch (kind_) {
      case Kind::Constant: return std::pow(std::abs(a_), r);
      case Kind::TwoPoint: return std::pow(b_, r);
      case Kind::Gaussian:
        // sigma^r 2^{r/2} Gamma((r+1)/2) / sqrt(pi)
        return std::pow(a_, r) * std::pow(2.0, 0.5 * r) *
               std::tgamma(0.5 * (r + 1.0)) / std::sqrt(3.14159265358979323846);
      default:
        return (detail::abs_pow_antideriv(b_, r) - detail::abs_pow_antideriv(a_, r)) / (b_ - a_);
    }
  }

  /// P(|X| > x) for x >= 0 (strict exceedance).
  double tail(double x) const {
    if (x < 0) return 1.0;
    switch (kind_) {
      case Kind::Constant: return std::abs(a_) > x ? 1.0 : 0.0;
      case Kind::TwoPoint: return b_ > x ? 1.0 : 0.0;
      case Kind::Gaussian: return std::erfc(x / (a_ * std::sqrt(2.0)));
      default: {
        const double overlap = std::max(0.0, std::min(b_, x) - std::max(a_, -x));
        return 1.0 - overlap / (b_ - a_);
      }
    }
  }

  /// ess sup |X|; +inf for the Gaussian.
  double sup_abs() const {
    switch (kind_) {
      case Kind::Constant: return std::abs(a_);
      case Kind::TwoPoint: return b_;
      case Kind::Gaussian: return kInf;
      default: return std::max(std::abs(a_), std::abs(b_));
    }
  }

  /// ess sup X; +inf for the Gaussian.
  double upper_support() const {
    switch (kind_) {
      case Kind::Constant: return a_;
      case Kind::Gaussian: return kInf;
      default: return b_;
    }
  }

  /// E[X^2 ; |X| <= t].
  double truncated_second_moment(double t) const {
    if (t < 0) return 0.0;
    switch (kind_) {
      case Kind::Constant: return std::abs(a_) <= t ? a_ * a_ : 0.0;
      case Kind::TwoPoint: return b_ <= t ? b_ * b_ : 0.0;
      case Kind::Gaussian: {
        if (std::isinf(t)) return a_ * a_;
        const double z = t / a_;
        return a_ * a_ * (std::erf(z / std::sqrt(2.0)) - 2.0 * z * detail::std_normal_pdf(z));
      }
      default: {
        const double lo = std::max(a_, -t);
        const double hi = std::min(b_, t);
        if (hi <= lo) return 0.0;
        return (hi * hi * hi - lo * lo * lo) / (3.0 * (b_ - a_));
      }
    }
  }

  /// E[|X| ; |X| >= y] for y >= 0.
  double abs_mean_above(double y) const {
    if (y <= 0) return abs_moment(1.0);
    switch (kind_) {
      case Kind::Constant: return std::abs(a_) >= y ? std::abs(a_) : 0.0;
      case Kind::TwoPoint: return b_ >= y ? b_ : 0.0;
      case Kind::Gaussian: return 2.0 * a_ * detail::std_normal_pdf(y / a_);
      default: {
        double total = 0.0;
        const double left_hi = std::min(b_, -y);
        if (left_hi > a_)
          total += detail::abs_antideriv(left_hi) - detail::abs_antideriv(a_);
        const double right_lo = std::max(a_, y);
        if (b_ > right_lo)
          total += detail::abs_antideriv(b_) - detail::abs_antideriv(right_lo);
        return total / (b_ - a_);
      }
    }
  }

  /// E[X ; X >= -y].
  double lower_truncated_mean(double y) const {
    switch (kind_) {
      case Kind::Constant: return a_ >= -y ? a_ : 0.0;
      case Kind::TwoPoint: {
        // Mass at +c always counts; mass at -c counts when c <= y.
        return b_ <= y ? 0.0 : 0.5 * b_;
      }
      case Kind::Gaussian: return a_ * detail::std_normal_pdf(y / a_);
      default: {
        const double lo = std::max(a_, -y);
        if (lo >= b_) return 0.0;
        return (b_ * b_ - lo * lo) / (2.0 * (b_ - a_));
      }
    }
  }

  double sample(const RandomBlock& blk) const {
    switch (kind_) {
      case Kind::Constant: return a_;
      case Kind::TwoPoint: return (blk.lo >> 63) ? b_ : -b_;
      case Kind::Gaussian: return a_ * to_normal(blk);
      default: return a_ + (b_ - a_) * to_unit(blk.lo);
    }
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::Constant: os << "constant(" << a_ << ")"; break;
      case Kind::TwoPoint: os << "two_point(" << b_ << ")"; break;
      case Kind::Uniform: os << "uniform(" << a_ << "," << b_ << ")"; break;
      case Kind::Gaussian: os << "gaussian(" << a_ << ")"; break;
      case Kind::CenteredUniform: os << "centered_uniform(" << b_ << ")"; break;
    }
    return os.str();
  }

 private:
  ScalarDistribution(Kind k, double a, double b) : kind_(k), a_(a), b_(b) {}

  Kind kind_;
  double a_;  // constant value | -c | lower end | sigma | -h
  double b_;  // unused         | +c | upper end | sigma | +h
};

}  // namespace fieldconc
