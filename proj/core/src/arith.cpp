#include "dsq/arith.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <limits>

namespace dsq {

namespace {

std::uint64_t read_sieve_cap() {
  if (const char* env = std::getenv("DSQ_SIEVE_CAP")) {
    std::uint64_t cap = 0;
    const std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (ec == std::errc() && ptr == text.data() + text.size() && cap >= 2) return cap;
  }
  return kDefaultSieveCap;
}

std::vector<std::uint32_t> build_sieve(std::uint64_t cap) {
  std::vector<bool> composite(cap + 1, false);
  std::vector<std::uint32_t> primes;
  for (std::uint64_t i = 2; i <= cap; ++i) {
    if (composite[i]) continue;
    primes.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= cap; j += i) composite[j] = true;
  }
  return primes;
}

}  // namespace

std::uint64_t sieve_cap() {
  static const std::uint64_t cap = read_sieve_cap();
  return cap;
}

std::span<const std::uint32_t> sieve_primes() {
  static const std::vector<std::uint32_t> primes = build_sieve(sieve_cap());
  return primes;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n <= sieve_cap()) {
    auto primes = sieve_primes();
    return std::binary_search(primes.begin(), primes.end(), static_cast<std::uint32_t>(n));
  }
  auto f = factorize(n);
  return f.size() == 1 && f.front().exponent == 1;
}

std::vector<std::uint64_t> primes_upto(std::uint64_t t) {
  if (t < 1) throw Error(ErrorKind::invalid_parameter, "primes_upto requires t >= 1");
  if (t > sieve_cap()) {
    throw Error(ErrorKind::resource_limit, "t = " + std::to_string(t) + " exceeds the sieve cap");
  }
  auto primes = sieve_primes();
  auto end = std::upper_bound(primes.begin(), primes.end(), static_cast<std::uint32_t>(t));
  return {primes.begin(), end};
}

std::vector<std::uint64_t> primes_upto(const Rational& t) {
  if (t < 1) throw Error(ErrorKind::invalid_parameter, "primes_upto requires t >= 1");
  return primes_upto(floor_u64(t));
}

std::size_t prime_count_upto(const Rational& t) {
  if (t < 1) throw Error(ErrorKind::invalid_parameter, "prime_count_upto requires t >= 1");
  const std::uint64_t bound = floor_u64(t);
  if (bound > sieve_cap()) {
    throw Error(ErrorKind::resource_limit, "t exceeds the sieve cap");
  }
  auto primes = sieve_primes();
  return static_cast<std::size_t>(
      std::upper_bound(primes.begin(), primes.end(), static_cast<std::uint32_t>(bound)) - primes.begin());
}

Factorization factorize(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_parameter, "factorize requires n >= 1");
  Factorization out;
  auto primes = sieve_primes();
  for (std::uint64_t p : primes) {
    if (p * p > n) break;
    if (n % p != 0) continue;
    int e = 0;
    do {
      n /= p;
      ++e;
    } while (n % p == 0);
    out.push_back({p, e});
  }
  if (n > 1) {
    const std::uint64_t largest = primes.empty() ? 1 : primes.back();
    // Any composite cofactor has a prime factor <= sqrt(cofactor); it is
    // certified prime only if that range was fully covered.
    if (largest < std::numeric_limits<std::uint32_t>::max() && n > largest * largest) {
      throw Error(ErrorKind::resource_limit,
                  "cofactor " + std::to_string(n) + " cannot be certified with the current sieve cap");
    }
    out.push_back({n, 1});
  }
  return out;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw Error(ErrorKind::resource_limit, "64-bit overflow in integer product");
  }
  return r;
}

std::uint64_t checked_pow(std::uint64_t base, unsigned exponent) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exponent; ++i) r = checked_mul(r, base);
  return r;
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) noexcept {
  while (b != 0) {
    const std::uint64_t r = a % b;
    a = b;
    b = r;
  }
  return a;
}

Natural::Natural(std::uint64_t value) : value_(value) {
  if (value == 0) throw Error(ErrorKind::invalid_parameter, "Natural must be >= 1");
  factors_ = factorize(value);
}

int Natural::valuation(std::uint64_t p) const noexcept {
  for (const auto& pp : factors_) {
    if (pp.prime == p) return pp.exponent;
    if (pp.prime > p) break;
  }
  return 0;
}

int valuation(std::uint64_t p, std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::undefined_valuation, "valuation of 0");
  if (p < 2) throw Error(ErrorKind::invalid_parameter, "valuation base must be prime");
  int e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

long valuation(std::uint64_t p, const Rational& x) {
  if (x == 0) throw Error(ErrorKind::undefined_valuation, "valuation of 0");
  if (x < 0) throw Error(ErrorKind::invalid_parameter, "valuation requires a positive rational");
  if (!is_prime(p)) throw Error(ErrorKind::invalid_parameter, std::to_string(p) + " is not prime");
  const Integer prime = to_integer(p);
  Integer scratch;
  const long up = static_cast<long>(mpz_remove(scratch.get_mpz_t(), x.get_num_mpz_t(), prime.get_mpz_t()));
  const long down = static_cast<long>(mpz_remove(scratch.get_mpz_t(), x.get_den_mpz_t(), prime.get_mpz_t()));
  return up - down;
}

int small_prime_count(const Natural& n, const Rational& t) {
  int count = 0;
  for (const auto& pp : n.factors()) {
    if (pp.prime <= t) ++count;
  }
  return count;
}

int small_prime_count(std::uint64_t n, const Rational& t) {
  if (n == 0) throw Error(ErrorKind::invalid_parameter, "small_prime_count requires n >= 1");
  int count = 0;
  for (const auto& pp : factorize(n)) {
    if (pp.prime <= t) ++count;
  }
  return count;
}

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw Error(ErrorKind::parse_error, "empty rational");
  for (char c : text) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-')) {
      throw Error(ErrorKind::parse_error, "malformed rational '" + std::string(text) + "'");
    }
  }
  Rational out;
  if (out.set_str(std::string(text), 10) != 0) {
    throw Error(ErrorKind::parse_error, "malformed rational '" + std::string(text) + "'");
  }
  if (out.get_den() == 0) throw Error(ErrorKind::parse_error, "zero denominator in '" + std::string(text) + "'");
  out.canonicalize();
  return out;
}

std::string format_rational(const Rational& x) {
  Rational canonical(x);
  canonical.canonicalize();
  return canonical.get_str(10);
}

Rational to_rational(std::uint64_t n) { return Rational(to_integer(n)); }

Integer to_integer(std::uint64_t n) {
  Integer z;
  mpz_import(z.get_mpz_t(), 1, 1, sizeof(n), 0, 0, &n);
  return z;
}

Rational make_ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw Error(ErrorKind::invalid_parameter, "zero denominator");
  Rational out(to_integer(num), to_integer(den));
  out.canonicalize();
  return out;
}

bool is_integer(const Rational& x) { return x.get_den() == 1; }

std::uint64_t floor_u64(const Rational& x) {
  if (x < 0) throw Error(ErrorKind::invalid_parameter, "floor_u64 of a negative value");
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  if (mpz_sizeinbase(q.get_mpz_t(), 2) > 64) throw Error(ErrorKind::resource_limit, "value exceeds 64 bits");
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, q.get_mpz_t());
  return out;
}

Rational rational_pow(const Rational& x, long k) {
  if (k < 0) {
    if (x == 0) throw Error(ErrorKind::domain_error, "negative power of zero");
    Rational inverse(x.get_den(), x.get_num());
    inverse.canonicalize();
    return rational_pow(inverse, -k);
  }
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), x.get_num_mpz_t(), static_cast<unsigned long>(k));
  mpz_pow_ui(out.get_den_mpz_t(), x.get_den_mpz_t(), static_cast<unsigned long>(k));
  out.canonicalize();
  return out;
}

bool at_least(long n, const Rational& K) { return Rational(n) >= K; }

}  // namespace dsq
