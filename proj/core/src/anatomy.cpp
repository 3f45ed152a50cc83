#include "dsq/anatomy.hpp"

#include <algorithm>
#include <limits>

namespace dsq {

namespace {

std::uint64_t enumeration_bound(const Rational& x) {
  if (x < 1) throw Error(ErrorKind::invalid_parameter, "x must be >= 1");
  const std::uint64_t n = floor_u64(x);
  if (n > kEnumerationCap) {
    throw Error(ErrorKind::resource_limit, "x = " + std::to_string(n) + " exceeds the enumeration cap");
  }
  return n;
}

void require_t(const Rational& t) {
  if (t < 1) throw Error(ErrorKind::invalid_parameter, "t must be >= 1");
}

void require_gamma(const Rational& gamma, const Rational& least) {
  if (gamma < least) throw Error(ErrorKind::invalid_parameter, "gamma must be >= " + format_rational(least));
}

// omega >= K with K rational: omega >= ceil(K).
long threshold(const Rational& K) {
  if (K <= 0) return 0;
  Integer c;
  mpz_cdiv_q(c.get_mpz_t(), K.get_num_mpz_t(), K.get_den_mpz_t());
  return c.fits_slong_p() ? c.get_si() : std::numeric_limits<long>::max();
}

std::vector<Rational> powers(const Rational& gamma, int up_to) {
  std::vector<Rational> out(static_cast<std::size_t>(up_to) + 1);
  out[0] = 1;
  for (int k = 1; k <= up_to; ++k) out[k] = out[k - 1] * gamma;
  return out;
}

Integer product_tree(std::vector<Integer>& terms, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return terms[lo];
  if (hi == lo) return 1;
  const std::size_t mid = lo + (hi - lo) / 2;
  return product_tree(terms, lo, mid) * product_tree(terms, mid, hi);
}

struct DivisorTerm {
  int small_primes_in_m;
  Rational f_n;
};

// Every factorisation M = mn as (omega_t(m), f(n)).
std::vector<DivisorTerm> divisor_terms(const Natural& M, const Rational& t, const MultiplicativeFunction& f) {
  std::vector<DivisorTerm> terms{{0, Rational(1)}};
  for (const auto& [p, nu] : M.factors()) {
    const bool small = to_rational(p) <= t;
    std::vector<DivisorTerm> next;
    next.reserve(terms.size() * static_cast<std::size_t>(nu + 1));
    for (int a = 0; a <= nu; ++a) {
      const Rational fp = f.at_prime_power(p, nu - a);
      const int bump = (small && a > 0) ? 1 : 0;
      for (const auto& term : terms) next.push_back({term.small_primes_in_m + bump, term.f_n * fp});
    }
    terms = std::move(next);
  }
  return terms;
}

}  // namespace

std::vector<int> small_prime_counts(std::uint64_t x, const Rational& t) {
  require_t(t);
  std::vector<int> omega(x + 1, 0);
  const std::uint64_t limit = t >= to_rational(x) ? x : floor_u64(t);
  for (std::uint64_t p : primes_upto(std::max<std::uint64_t>(limit, 1))) {
    for (std::uint64_t n = p; n <= x; n += p) ++omega[n];
  }
  return omega;
}

std::uint64_t count_many_small_primes(const Rational& x, const Rational& t, const Rational& K) {
  const std::uint64_t n = enumeration_bound(x);
  return count_many_small_primes_prefix(n, t, K)[n];
}

std::vector<std::uint64_t> count_many_small_primes_prefix(std::uint64_t x_max, const Rational& t,
                                                          const Rational& K) {
  if (x_max > kEnumerationCap) throw Error(ErrorKind::resource_limit, "x exceeds the enumeration cap");
  const long k = threshold(K);
  const std::vector<int> omega = small_prime_counts(x_max, t);
  std::vector<std::uint64_t> out(x_max + 1, 0);
  for (std::uint64_t n = 1; n <= x_max; ++n) out[n] = out[n - 1] + (omega[n] >= k ? 1 : 0);
  return out;
}

Rational rankin_sum(const Rational& x, const Rational& t, const Rational& gamma) {
  const std::uint64_t n = enumeration_bound(x);
  return rankin_sum_prefix(n, t, gamma)[n];
}

std::vector<Rational> rankin_sum_prefix(std::uint64_t x_max, const Rational& t, const Rational& gamma) {
  if (x_max > kEnumerationCap) throw Error(ErrorKind::resource_limit, "x exceeds the enumeration cap");
  if (gamma <= 0) throw Error(ErrorKind::invalid_parameter, "gamma must be positive");
  const std::vector<int> omega = small_prime_counts(x_max, t);
  const int top = omega.empty() ? 0 : *std::max_element(omega.begin(), omega.end());
  const std::vector<Rational> pw = powers(gamma, top);
  std::vector<Rational> out(x_max + 1);
  out[0] = 0;
  for (std::uint64_t n = 1; n <= x_max; ++n) out[n] = out[n - 1] + pw[omega[n]];
  return out;
}

Rational divisor_anatomy_sum(const Natural& M, const Rational& t, const Rational& K, const MultiplicativeFunction& f) {
  require_t(t);
  const long k = threshold(K);
  Rational sum(0);
  for (const auto& term : divisor_terms(M, t, f)) {
    if (term.small_primes_in_m >= k) sum += term.f_n;
  }
  return sum;
}

Rational divisor_rankin_sum(const Natural& M, const Rational& t, const Rational& gamma,
                            const MultiplicativeFunction& f) {
  require_t(t);
  const auto terms = divisor_terms(M, t, f);
  const std::vector<Rational> pw = powers(gamma, static_cast<int>(M.factors().size()));
  Rational sum(0);
  for (const auto& term : terms) sum += pw[term.small_primes_in_m] * term.f_n;
  return sum;
}

Rational divisor_rankin_product(const Natural& M, const Rational& t, const Rational& gamma,
                                const MultiplicativeFunction& f) {
  require_t(t);
  Rational product(1);
  for (const auto& [p, nu] : M.factors()) {
    Rational factor = f.divisor_sum_at_prime_power(p, nu);
    if (to_rational(p) <= t) factor += (gamma - 1) * f.divisor_sum_at_prime_power(p, nu - 1);
    product *= factor;
  }
  return product;
}

Rational divisor_anatomy_bound(const Natural& M, const Rational& t, const Rational& K, const Rational& gamma) {
  require_t(t);
  require_gamma(gamma, Rational(1));
  if (!is_integer(K)) {
    throw Error(ErrorKind::invalid_parameter, "exact bound needs integer K; got " + format_rational(K));
  }
  if (!K.get_num().fits_slong_p()) throw Error(ErrorKind::resource_limit, "K too large");
  Rational bound = to_rational(M.value()) * rational_pow(gamma, -K.get_num().get_si());
  for (const auto& [p, nu] : M.factors()) {
    if (to_rational(p) <= t) bound *= 1 + (gamma - 1) / to_rational(p);
  }
  return bound;
}

Interval divisor_anatomy_bound_interval(const Natural& M, const Rational& t, const Rational& K,
                                        const Rational& gamma, unsigned precision_bits) {
  require_t(t);
  require_gamma(gamma, Rational(1));
  Rational product = to_rational(M.value());
  for (const auto& [p, nu] : M.factors()) {
    if (to_rational(p) <= t) product *= 1 + (gamma - 1) / to_rational(p);
  }
  const PowerFactor factors[] = {{Expr::constant(gamma), Expr::constant(-K)}};
  return interval_eval(product, factors, precision_bits);
}

Rational mertens_product(const Rational& t, const Rational& gamma) {
  require_t(t);
  if (gamma <= 0) throw Error(ErrorKind::invalid_parameter, "gamma must be positive");
  if (gamma == 1) return Rational(1);
  const auto primes = primes_upto(t);
  const Integer a = gamma.get_num();
  const Integer b = gamma.get_den();
  // 1 + (a/b - 1)/p = (b p + a - b) / (b p)
  std::vector<Integer> num;
  std::vector<Integer> den;
  num.reserve(primes.size());
  den.reserve(primes.size());
  for (std::uint64_t p : primes) {
    const Integer bp = b * to_integer(p);
    num.push_back(bp + a - b);
    den.push_back(bp);
  }
  Rational out(product_tree(num, 0, num.size()), product_tree(den, 0, den.size()));
  out.canonicalize();
  return out;
}

Interval ratio_to_log_power(const Rational& t, const Rational& gamma, unsigned precision_bits) {
  const Rational product = mertens_product(t, gamma);
  const PowerFactor factors[] = {{Expr::log_max1(t), Expr::constant(1 - gamma)}};
  return interval_eval(product, factors, precision_bits);
}

bool AnatomyReport::chain_holds() const {
  if (!exact_chain) {
    return mertens_enclosure && compare_le(exact_value, *mertens_enclosure) == Verdict::holds;
  }
  return exact_value <= rankin_bound && rankin_bound <= mertens_bound;
}

AnatomyReport count_report(const Rational& x, const Rational& t, const Rational& K, const Rational& gamma,
                           unsigned precision_bits) {
  require_gamma(gamma, Rational(1));
  AnatomyReport report;
  report.gamma = gamma;
  report.exact_value = to_rational(count_many_small_primes(x, t, K));
  const Rational rankin = rankin_sum(x, t, gamma);
  const Rational mertens = x * mertens_product(t, gamma);
  if (is_integer(K) && K.get_num().fits_slong_p()) {
    const Rational scale = rational_pow(gamma, -K.get_num().get_si());
    report.rankin_bound = scale * rankin;
    report.mertens_bound = scale * mertens;
  } else {
    report.exact_chain = false;
    const PowerFactor factors[] = {{Expr::constant(gamma), Expr::constant(-K)}};
    report.mertens_enclosure = interval_eval(mertens, factors, precision_bits);
  }
  return report;
}

AnatomyReport divisor_report(const Natural& M, const Rational& t, const Rational& K, const Rational& gamma,
                             const MultiplicativeFunction& f, unsigned precision_bits) {
  require_gamma(gamma, Rational(1));
  AnatomyReport report;
  report.gamma = gamma;
  report.exact_value = divisor_anatomy_sum(M, t, K, f);
  if (is_integer(K) && K.get_num().fits_slong_p()) {
    report.rankin_bound = rational_pow(gamma, -K.get_num().get_si()) * divisor_rankin_product(M, t, gamma, f);
    report.mertens_bound = divisor_anatomy_bound(M, t, K, gamma);
  } else {
    report.exact_chain = false;
    report.mertens_enclosure = divisor_anatomy_bound_interval(M, t, K, gamma, precision_bits);
  }
  return report;
}

}  // namespace dsq
