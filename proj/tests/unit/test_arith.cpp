#include <random>

#include "doctest.h"
#include "dsq/arith.hpp"
#include "dsq/interval.hpp"
#include "support/oracles.hpp"

using namespace dsq;

TEST_CASE("primes_upto boundaries") {
  CHECK(primes_upto(Rational(1)).empty());
  CHECK(primes_upto(Rational(2)) == std::vector<std::uint64_t>{2});
  CHECK(primes_upto(Rational(10)) == std::vector<std::uint64_t>{2, 3, 5, 7});
  CHECK(primes_upto(Rational(21, 2)) == std::vector<std::uint64_t>{2, 3, 5, 7});
  CHECK_THROWS_AS(primes_upto(Rational(1, 2)), Error);
  try {
    primes_upto(Rational(0));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_parameter);
  }
}

TEST_CASE("primes_upto agrees with trial division up to 2000") {
  std::vector<std::uint64_t> expected;
  for (std::uint64_t n = 2; n <= 2000; ++n) {
    if (oracle::is_prime(n)) expected.push_back(n);
  }
  CHECK(primes_upto(std::uint64_t{2000}) == expected);
  CHECK(prime_count_upto(Rational(2000)) == expected.size());
}

TEST_CASE("factorize examples") {
  CHECK(factorize(1).empty());
  CHECK(factorize(12) == Factorization{{2, 2}, {3, 1}});
  CHECK(factorize(97) == Factorization{{97, 1}});
}

TEST_CASE("factorize reconstructs every n up to 1e5") {
  for (std::uint64_t n = 1; n <= 100000; ++n) {
    std::uint64_t product = 1;
    std::uint64_t last = 0;
    for (const auto& [p, e] : factorize(n)) {
      REQUIRE(p > last);
      REQUIRE(e >= 1);
      last = p;
      for (int k = 0; k < e; ++k) product *= p;
    }
    REQUIRE(product == n);
  }
}

TEST_CASE("factorize matches the trial division oracle on large inputs") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 300; ++k) {
    const std::uint64_t n = 1 + rng() % 1'000'000'000'000ULL;
    const auto expected = oracle::factorize(n);
    const auto got = factorize(n);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].prime == expected[i].first);
      CHECK(got[i].exponent == expected[i].second);
    }
  }
}

TEST_CASE("valuation examples and errors") {
  CHECK(valuation(2, Rational(8)) == 3);
  CHECK(valuation(3, Rational(4, 6)) == -1);
  CHECK(valuation(5, Rational(7)) == 0);
  CHECK_THROWS_AS(valuation(2, Rational(0)), Error);
  try {
    valuation(2, Rational(0));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::undefined_valuation);
  }
}

TEST_CASE("valuation is additive on random rationals") {
  std::mt19937_64 rng(11);
  const std::uint64_t primes[] = {2, 3, 5, 7, 11};
  for (int k = 0; k < 10000; ++k) {
    Rational x(static_cast<unsigned long>(1 + rng() % 5000), static_cast<unsigned long>(1 + rng() % 5000));
    Rational y(static_cast<unsigned long>(1 + rng() % 5000), static_cast<unsigned long>(1 + rng() % 5000));
    x.canonicalize();
    y.canonicalize();
    const std::uint64_t p = primes[rng() % 5];
    REQUIRE(valuation(p, Rational(x * y)) == valuation(p, x) + valuation(p, y));
  }
}

TEST_CASE("Natural caches the factorization") {
  const Natural n(360);
  CHECK(n.valuation(2) == 3);
  CHECK(n.valuation(3) == 2);
  CHECK(n.valuation(5) == 1);
  CHECK(n.valuation(7) == 0);
  CHECK_THROWS_AS(Natural(0), Error);
}

TEST_CASE("rational parsing round trips") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(format_rational(Rational(6, 4)) == "3/2");
  CHECK(format_rational(Rational(4)) == "4");
  CHECK(parse_rational("-2/5") == Rational(-2, 5));
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("x"), Error);
}

TEST_CASE("checked arithmetic reports overflow") {
  CHECK(checked_pow(2, 63) == (std::uint64_t{1} << 63));
  CHECK_THROWS_AS(checked_pow(2, 64), Error);
  CHECK_THROWS_AS(checked_mul(std::uint64_t{1} << 40, std::uint64_t{1} << 30), Error);
}

TEST_CASE("interval_eval examples") {
  const PowerFactor e0[] = {{Expr::exp(Expr::constant(Rational(0))), Expr::constant(Rational(1))}};
  const Interval one = interval_eval(Rational(1), e0, 128);
  CHECK(one.contains(Rational(1)));
  CHECK(one.is_point());

  const PowerFactor log1[] = {{Expr::log_max1(Rational(1)), Expr::constant(Rational(5))}};
  const Interval also_one = interval_eval(Rational(1), log1, 128);
  CHECK(also_one.is_point());
  CHECK(also_one.contains(Rational(1)));

  const PowerFactor inv_e[] = {{Expr::exp(Expr::constant(Rational(1))), Expr::constant(Rational(-1))}};
  const Interval x = interval_eval(Rational(1), inv_e, 128);
  const auto [s, err] = oracle::inverse_e(60);
  // The series value, widened by its error, must meet the enclosure, and the
  // enclosure must be narrower than 2^-100.
  const Interval series = Interval::hull(Rational(s - err), Rational(s + err), 128);
  CHECK(mpfr_cmp(x.lo(), series.hi()) <= 0);
  CHECK(mpfr_cmp(series.lo(), x.hi()) <= 0);
  const Interval w = x.width();
  CHECK(mpfr_cmp_d(w.hi(), std::ldexp(1.0, -100)) < 0);
}

TEST_CASE("fractional power of a nonpositive base is a domain error") {
  const PowerFactor bad[] = {{Expr::constant(Rational(-2)), Expr::constant(Rational(1, 2))}};
  try {
    interval_eval(Rational(1), bad, 64);
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain_error);
  }
}

TEST_CASE("enclosures nest as precision doubles and match a series oracle") {
  std::mt19937_64 rng(3);
  const auto [s, err] = oracle::inverse_e(120);
  for (int k = 0; k < 100; ++k) {
    const long a = static_cast<long>(rng() % 11) - 5;
    Rational b(static_cast<unsigned long>(1 + rng() % 90), 7);
    b.canonicalize();
    // (e^{-1})^a * b^{1/3}
    const Expr expr = Expr::exp(Expr::constant(Rational(-1))).pow(Expr::constant(Rational(a))) *
                      Expr::constant(b).pow(Expr::constant(Rational(1, 3)));
    Interval previous = expr.eval(32);
    for (unsigned bits = 64; bits <= 1024; bits *= 2) {
      const Interval next = expr.eval(bits);
      REQUIRE(mpfr_cmp(next.lo(), previous.lo()) >= 0);
      REQUIRE(mpfr_cmp(next.hi(), previous.hi()) <= 0);
      previous = next;
    }
    // value^3 = e^{-3a} b; bracket e^{-1} by the series and compare.
    const Rational lo = s - err;
    const Rational hi = s + err;
    const Rational lo3 = a >= 0 ? rational_pow(lo, 3 * a) : rational_pow(hi, 3 * a);
    const Rational hi3 = a >= 0 ? rational_pow(hi, 3 * a) : rational_pow(lo, 3 * a);
    const Interval cube = pow_int(previous, 3);
    const Interval truth = Interval::hull(Rational(lo3 * b), Rational(hi3 * b), 1024);
    CHECK(mpfr_cmp(cube.lo(), truth.hi()) <= 0);
    CHECK(mpfr_cmp(truth.lo(), cube.hi()) <= 0);
  }
}

TEST_CASE("exceeds_scaled_rational_power decides exactly") {
  // 1/2 > 1 * (1/8)^{1/3} = 1/2 is false; a hair above is true.
  CHECK_FALSE(exceeds_scaled_rational_power(Rational(1, 2), Rational(1), Rational(1, 8), Rational(1, 3)));
  CHECK(exceeds_scaled_rational_power(Rational(1000001, 2000000), Rational(1), Rational(1, 8), Rational(1, 3)));
  CHECK(exceeds_scaled_rational_power(Rational(1), Rational(1), Rational(0), Rational(9, 10)));
}
