#pragma once

// Certified real enclosures. Every endpoint is rounded outward, so an
// Interval always contains the exact real it stands for. Only the
// transcendental factors of the bounds (e^x, log, fractional powers) pass
// through here; everything else stays in exact rationals.

#include <memory>
#include <span>
#include <string>

#include <mpfr.h>

#include "dsq/arith.hpp"

namespace dsq {

inline constexpr unsigned kDefaultPrecisionBits = 256;
inline constexpr unsigned kDefaultPrecisionCap = 4096;

class Interval {
 public:
  explicit Interval(unsigned precision_bits = kDefaultPrecisionBits);
  Interval(const Interval& other);
  Interval(Interval&& other) noexcept;
  Interval& operator=(Interval other) noexcept;
  ~Interval();

  static Interval exact(const Rational& x, unsigned precision_bits);
  static Interval hull(const Rational& lo, const Rational& hi, unsigned precision_bits);

  unsigned precision_bits() const noexcept { return precision_; }
  mpfr_srcptr lo() const noexcept { return lo_; }
  mpfr_srcptr hi() const noexcept { return hi_; }

  bool contains(const Rational& x) const;
  bool is_point() const;
  bool lo_positive() const;
  bool is_zero() const;
  /// hi - lo, rounded up.
  Interval width() const;
  double lo_double() const;
  double hi_double() const;
  /// Decimal rendering of an endpoint, rounded in the safe direction.
  std::string lo_string(int digits = 40) const;
  std::string hi_string(int digits = 40) const;

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  friend Interval operator/(const Interval& a, const Interval& b);

  friend Interval exp(const Interval& x);
  /// Natural log; requires lo > 0.
  friend Interval log(const Interval& x);
  /// max(1, log x), requires x >= 1.
  friend Interval log_max1(const Interval& x);
  /// base^exponent for base > 0 via exp(exponent * log base).
  friend Interval pow(const Interval& base, const Interval& exponent);
  /// base^n for an exact integer n; any sign of base allowed.
  friend Interval pow_int(const Interval& base, long n);

 private:
  unsigned precision_;
  mpfr_t lo_;
  mpfr_t hi_;
};

/// Widens the MPFR exponent range on the calling thread. Bound factors such
/// as (Log t)^{(e^{40C}-1)/2} need exponents far beyond the default.
void ensure_extended_exponent_range();

/// Small expression tree evaluated into an Interval at a chosen precision.
/// Leaves are rational constants and Log t; interior nodes are e^x,
/// arithmetic and powers.
class Expr {
 public:
  static Expr constant(const Rational& value);
  /// e^x.
  static Expr exp(const Expr& x);
  /// Log t := max(1, log t) for rational t >= 1.
  static Expr log_max1(const Rational& t);

  Expr pow(const Expr& exponent) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);

  Interval eval(unsigned precision_bits) const;

  /// Set when the node is an exact rational constant.
  const Rational* as_constant() const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct PowerFactor {
  Expr base;
  Expr exponent;
};

/// Encloses base * prod(factor.base ^ factor.exponent). A fractional power
/// of a nonpositive base raises domain-error.
Interval interval_eval(const Rational& base, std::span<const PowerFactor> factors, unsigned precision_bits);

enum class Verdict { holds, violated, inconclusive };

const char* to_string(Verdict v) noexcept;

/// lhs <= rhs: holds iff lhs <= rhs.lo, violated iff lhs > rhs.hi.
Verdict compare_le(const Rational& lhs, const Interval& rhs);
/// lhs > rhs: holds iff lhs > rhs.hi, violated iff lhs <= rhs.lo.
Verdict compare_gt(const Rational& lhs, const Interval& rhs);

struct CertifiedComparison {
  Verdict verdict;
  Interval rhs;
  unsigned precision_bits;
};

/// Re-evaluates rhs at doubling precision until the comparison is
/// conclusive or the cap is reached.
template <class RhsAt, class Compare>
CertifiedComparison certify(const Rational& lhs, RhsAt&& rhs_at, Compare&& compare, unsigned start_bits,
                            unsigned cap_bits) {
  unsigned bits = start_bits;
  for (;;) {
    Interval rhs = rhs_at(bits);
    const Verdict v = compare(lhs, rhs);
    if (v != Verdict::inconclusive || bits >= cap_bits) return {v, std::move(rhs), bits};
    bits = std::min(bits * 2, std::max(cap_bits, start_bits));
  }
}

/// Exact decision of lhs > scale * ratio^(a/b) for nonnegative rationals and
/// a positive rational exponent a/b, by raising both sides to the b-th power.
bool exceeds_scaled_rational_power(const Rational& lhs, const Rational& scale, const Rational& ratio,
                                   const Rational& exponent);

}  // namespace dsq
