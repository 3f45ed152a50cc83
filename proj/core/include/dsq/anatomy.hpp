#pragma once

// Anatomy of integers as exact inequality chains. The Rankin weight is an
// exact rational gamma standing for e^C, so every step up to the Mertens
// product stays in rational arithmetic.
//
// Here omega_t(n) = #{p <= t : p | n} (one integer, not a pair).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsq/interval.hpp"
#include "dsq/model.hpp"

namespace dsq {

/// Largest x accepted by the enumerating operations.
inline constexpr std::uint64_t kEnumerationCap = 10'000'000;

/// #{n <= x : omega_t(n) >= K}. Throws resource-limit past kEnumerationCap.
std::uint64_t count_many_small_primes(const Rational& x, const Rational& t, const Rational& K);

/// sum_{n <= x} gamma^{omega_t(n)}, gamma > 0.
Rational rankin_sum(const Rational& x, const Rational& t, const Rational& gamma);

/// omega_t(n) for n = 0..x (entry 0 unused), by sieving.
std::vector<int> small_prime_counts(std::uint64_t x, const Rational& t);

/// Prefix versions for sweeps: entry n is the value at x = n.
std::vector<std::uint64_t> count_many_small_primes_prefix(std::uint64_t x_max, const Rational& t, const Rational& K);
std::vector<Rational> rankin_sum_prefix(std::uint64_t x_max, const Rational& t, const Rational& gamma);

/// sum over mn = M with omega_t(m) >= K of f(n).
Rational divisor_anatomy_sum(const Natural& M, const Rational& t, const Rational& K, const MultiplicativeFunction& f);

/// sum over mn = M of gamma^{omega_t(m)} f(n), by divisor enumeration.
Rational divisor_rankin_sum(const Natural& M, const Rational& t, const Rational& gamma,
                            const MultiplicativeFunction& f);

/// The same sum through the prime-power factorization
///   prod_{p<=t, p|M} ((1*f)(p^nu) + (gamma-1)(1*f)(p^{nu-1})) prod_{p>t, p|M} (1*f)(p^nu).
Rational divisor_rankin_product(const Natural& M, const Rational& t, const Rational& gamma,
                                const MultiplicativeFunction& f);

/// M gamma^{-K} prod_{p<=t, p|M} (1 + (gamma-1)/p), for gamma >= 1 and
/// integer K. A non-integer K raises invalid-parameter; use the interval
/// form instead.
Rational divisor_anatomy_bound(const Natural& M, const Rational& t, const Rational& K, const Rational& gamma);
Interval divisor_anatomy_bound_interval(const Natural& M, const Rational& t, const Rational& K,
                                        const Rational& gamma, unsigned precision_bits);

/// prod_{p<=t} (1 + (gamma-1)/p), exact.
Rational mertens_product(const Rational& t, const Rational& gamma);

/// mertens_product / (Log t)^{gamma-1}, a diagnostic enclosure.
Interval ratio_to_log_power(const Rational& t, const Rational& gamma, unsigned precision_bits);

/// One link of a chain exact <= rankin <= mertens.
struct AnatomyReport {
  Rational exact_value;
  Rational rankin_bound;
  Rational mertens_bound;
  Rational gamma;
  /// False when K is not an integer; the bounds are then absent and only the
  /// enclosure below is filled.
  bool exact_chain = true;
  std::optional<Interval> mertens_enclosure;

  bool chain_holds() const;
};

/// exact = count_many_small_primes, rankin = gamma^{-K} rankin_sum,
/// mertens = gamma^{-K} x prod_{p<=t}(1 + (gamma-1)/p).
AnatomyReport count_report(const Rational& x, const Rational& t, const Rational& K, const Rational& gamma,
                           unsigned precision_bits = kDefaultPrecisionBits);

/// exact = divisor_anatomy_sum, rankin = gamma^{-K} divisor_rankin_product,
/// mertens = divisor_anatomy_bound.
AnatomyReport divisor_report(const Natural& M, const Rational& t, const Rational& K, const Rational& gamma,
                             const MultiplicativeFunction& f, unsigned precision_bits = kDefaultPrecisionBits);

}  // namespace dsq
