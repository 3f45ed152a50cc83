#pragma once

// Exact integer and rational foundations: the prime sieve, factorization,
// p-adic valuations and the Natural / Rational value types used everywhere.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "dsq/error.hpp"

namespace dsq {

/// Exact rational. Every weight, multiplicative-function value and measure
/// in the library is one of these.
using Rational = mpq_class;
using Integer = mpz_class;

struct PrimePower {
  std::uint64_t prime;
  int exponent;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

using Factorization = std::vector<PrimePower>;

/// Default upper bound of the cached sieve. Overridable through the
/// DSQ_SIEVE_CAP environment variable, read once on first use.
inline constexpr std::uint64_t kDefaultSieveCap = 10'000'000;

std::uint64_t sieve_cap();

/// All primes up to sieve_cap(), ascending. Built once, then read-only.
std::span<const std::uint32_t> sieve_primes();

bool is_prime(std::uint64_t n);

/// Primes in [2, floor(t)], ascending. Throws invalid-parameter for t < 1
/// and resource-limit when floor(t) exceeds the sieve.
std::vector<std::uint64_t> primes_upto(const Rational& t);
std::vector<std::uint64_t> primes_upto(std::uint64_t t);

/// Number of primes <= t (t >= 1).
std::size_t prime_count_upto(const Rational& t);

/// Canonical factorization by trial division over the sieve. n = 1 gives
/// the empty list. Inputs whose cofactor cannot be certified prime by the
/// sieve are rejected with resource-limit.
Factorization factorize(std::uint64_t n);

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);
std::uint64_t checked_pow(std::uint64_t base, unsigned exponent);
std::uint64_t gcd(std::uint64_t a, std::uint64_t b) noexcept;

/// A positive integer together with its canonical factorization.
class Natural {
 public:
  explicit Natural(std::uint64_t value);

  std::uint64_t value() const noexcept { return value_; }
  const Factorization& factors() const noexcept { return factors_; }

  /// nu_p of the value; 0 when p does not divide it.
  int valuation(std::uint64_t p) const noexcept;

  friend bool operator==(const Natural& a, const Natural& b) noexcept { return a.value_ == b.value_; }
  friend auto operator<=>(const Natural& a, const Natural& b) noexcept { return a.value_ <=> b.value_; }

 private:
  std::uint64_t value_;
  Factorization factors_;
};

/// nu_p(numerator) - nu_p(denominator). Throws undefined-valuation for x = 0
/// and invalid-parameter for x < 0 or p not prime.
long valuation(std::uint64_t p, const Rational& x);
int valuation(std::uint64_t p, std::uint64_t n);

/// Number of distinct primes p <= t dividing n.
int small_prime_count(const Natural& n, const Rational& t);
int small_prime_count(std::uint64_t n, const Rational& t);

/// Parses "p/q", "p" or "-p/q". Throws parse-error.
Rational parse_rational(std::string_view text);
/// Lowest-terms "p/q", or "p" when the denominator is 1.
std::string format_rational(const Rational& x);

Rational to_rational(std::uint64_t n);
/// num / den in lowest terms; den > 0.
Rational make_ratio(std::uint64_t num, std::uint64_t den);
Integer to_integer(std::uint64_t n);
bool is_integer(const Rational& x);
/// floor(x) for x >= 0 as a 64-bit value; throws resource-limit on overflow.
std::uint64_t floor_u64(const Rational& x);

/// x^k for an integer k (negative allowed when x != 0).
Rational rational_pow(const Rational& x, long k);

/// True iff integer n >= K, compared exactly.
bool at_least(long n, const Rational& K);

}  // namespace dsq
