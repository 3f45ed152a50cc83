#include "doctest.h"
#include "dsq/anatomy.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace dsq;
using testing::error_kind;
using testing::q;

TEST_CASE("count_many_small_primes examples") {
  CHECK(count_many_small_primes(q(10), q(10), q(2)) == 2);
  CHECK(count_many_small_primes(q(30), q(3), q(2)) == 5);
  CHECK(count_many_small_primes(q(41, 2), q(10), q(0)) == 20);
  CHECK(count_many_small_primes(q(17), q(10), q(-3)) == 17);
  CHECK(error_kind([] { count_many_small_primes(q(20'000'000), q(10), q(1)); }) == ErrorKind::resource_limit);
}

TEST_CASE("rankin_sum examples") {
  CHECK(rankin_sum(q(4), q(2), q(2)) == 6);
  CHECK(rankin_sum(q(50), q(10), q(1)) == 50);
  CHECK(rankin_sum(q(50), q(1), q(3)) == 50);
}

TEST_CASE("divisor_anatomy_sum examples") {
  const auto phi = MultiplicativeFunction::totient();
  CHECK(divisor_anatomy_sum(Natural(12), q(10), q(1), phi) == 8);
  CHECK(divisor_anatomy_sum(Natural(12), q(10), q(3), phi) == 0);
  const auto zero = MultiplicativeFunction::from_table({{{2, 1}, q(0)}, {{2, 2}, q(0)}, {{3, 1}, q(0)}});
  CHECK(divisor_anatomy_sum(Natural(12), q(10), q(1), zero) == 1);
}

TEST_CASE("divisor_anatomy_bound examples") {
  CHECK(divisor_anatomy_bound(Natural(1), q(10), q(3), q(2)) == q(1, 8));
  CHECK(divisor_anatomy_bound(Natural(12), q(10), q(1), q(2)) == 12);
  CHECK(divisor_anatomy_bound(Natural(12), q(1), q(2), q(3)) == q(12, 9));
  CHECK(error_kind([] { divisor_anatomy_bound(Natural(12), q(10), q(1, 2), q(2)); }) ==
        ErrorKind::invalid_parameter);
  // non-integer K: enclosure only
  const Interval enclosure = divisor_anatomy_bound_interval(Natural(12), q(10), q(1, 2), q(2), 128);
  CHECK(enclosure.lo_double() > 16.9);
  CHECK(enclosure.hi_double() < 17.0);
}

TEST_CASE("mertens_product examples") {
  CHECK(mertens_product(q(1), q(2)) == 1);
  CHECK(mertens_product(q(3), q(2)) == 2);
  CHECK(mertens_product(q(1000), q(1)) == 1);
  CHECK(mertens_product(q(10), q(3, 2)) == q(5, 4) * q(7, 6) * q(11, 10) * q(15, 14));
}

TEST_CASE("anatomy sums agree with enumeration oracles") {
  for (const long t : {1, 2, 10, 100}) {
    const auto counts = count_many_small_primes_prefix(2000, q(t), q(2));
    const auto rankin = rankin_sum_prefix(2000, q(t), q(3, 2));
    std::uint64_t count = 0;
    Rational sum(0);
    for (std::uint64_t n = 1; n <= 2000; ++n) {
      const int w = oracle::omega_single(n, static_cast<std::uint64_t>(t));
      if (w >= 2) ++count;
      Rational term(1);
      for (int k = 0; k < w; ++k) term *= q(3, 2);
      sum += term;
      REQUIRE(counts[n] == count);
      REQUIRE(rankin[n] == sum);
    }
    CHECK(count_many_small_primes(q(2000), q(t), q(2)) == count);
    CHECK(rankin_sum(q(2000), q(t), q(3, 2)) == sum);
  }
  const auto phi = MultiplicativeFunction::totient();
  for (std::uint64_t M = 1; M <= 400; ++M) {
    for (const long K : {0, 1, 2, 3}) {
      REQUIRE(divisor_anatomy_sum(Natural(M), q(10), q(K), phi) == oracle::divisor_anatomy_totient(M, 10, K));
    }
  }
}

TEST_CASE("chains and the prime-power identity") {
  const auto phi = MultiplicativeFunction::totient();
  for (const long t : {2, 10, 100}) {
    const auto gammas = {q(3, 2), q(2), q(4)};
    for (const Rational& gamma : gammas) {
      for (long K = 0; K <= 6; ++K) {
        const AnatomyReport r = count_report(q(3000), q(t), q(K), gamma);
        CHECK(r.exact_chain);
        CHECK(r.chain_holds());
      }
      for (std::uint64_t M = 1; M <= 300; ++M) {
        REQUIRE(divisor_rankin_sum(Natural(M), q(t), gamma, phi) ==
                divisor_rankin_product(Natural(M), q(t), gamma, phi));
        for (long K = 0; K <= 3; ++K) {
          REQUIRE(divisor_anatomy_sum(Natural(M), q(t), q(K), phi) <=
                  divisor_anatomy_bound(Natural(M), q(t), q(K), gamma));
        }
      }
    }
  }
  const AnatomyReport fractional = count_report(q(100), q(10), q(3, 2), q(2));
  CHECK_FALSE(fractional.exact_chain);
  CHECK(fractional.mertens_enclosure.has_value());
}

TEST_CASE("ratio_to_log_power is a positive enclosure") {
  const Interval r = ratio_to_log_power(q(10000), q(2), 128);
  CHECK(r.lo_positive());
  CHECK(r.lo_double() <= r.hi_double());
  const Interval one = ratio_to_log_power(q(1), q(2), 128);
  CHECK(one.contains(q(1)));
}
