#include "dsq/quality.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace dsq {

Rational Params::q() const { return Rational(2) / (Rational(1) - 2 * epsilon); }
Rational Params::q_prime() const { return Rational(2) / (Rational(1) + 2 * epsilon); }

void Params::validate() const {
  if (epsilon <= 0 || epsilon > Rational(2, 5)) {
    throw Error(ErrorKind::invalid_parameter, "epsilon must lie in (0, 2/5], got " + format_rational(epsilon));
  }
  if (C <= 0) throw Error(ErrorKind::invalid_parameter, "C must be positive");
  if (t < 1) throw Error(ErrorKind::invalid_parameter, "t must be >= 1");
  if (p0 < 1) throw Error(ErrorKind::invalid_parameter, "p0 must be >= 1");
  if (precision_bits < 2) throw Error(ErrorKind::invalid_parameter, "precision must be at least 2 bits");
}

namespace {

// Smallest integer k with k >= K, clamped to the int range.
long ceil_threshold(const Rational& K) {
  Integer c;
  mpz_cdiv_q(c.get_mpz_t(), K.get_num_mpz_t(), K.get_den_mpz_t());
  if (c < std::numeric_limits<int>::min()) return std::numeric_limits<int>::min();
  if (c > std::numeric_limits<int>::max()) return std::numeric_limits<int>::max();
  return c.get_si();
}

int omega_fast(const Factorization& a, const Factorization& b, std::uint64_t t_floor, OmegaVariant variant) {
  int count = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    std::uint64_t p;
    int ea = 0;
    int eb = 0;
    if (j == b.size() || (i < a.size() && a[i].prime < b[j].prime)) {
      p = a[i].prime;
      ea = a[i++].exponent;
    } else if (i == a.size() || b[j].prime < a[i].prime) {
      p = b[j].prime;
      eb = b[j++].exponent;
    } else {
      p = a[i].prime;
      ea = a[i++].exponent;
      eb = b[j++].exponent;
    }
    if (p > t_floor) break;
    if (variant == OmegaVariant::lcm || ea != eb) ++count;
  }
  return count;
}

bool quality_ok(const WeightFunction::Entry& v, const WeightFunction::Entry& w, Integer& lhs, Integer& rhs) {
  // max(w psi(v), v theta(w)) <= gcd(v, w), one side at a time.
  const std::uint64_t g = gcd(v.n.value(), w.n.value());
  mpz_mul_ui(lhs.get_mpz_t(), v.value.get_num_mpz_t(), w.n.value());
  mpz_mul_ui(rhs.get_mpz_t(), v.value.get_den_mpz_t(), g);
  if (lhs > rhs) return false;
  mpz_mul_ui(lhs.get_mpz_t(), w.value.get_num_mpz_t(), v.n.value());
  mpz_mul_ui(rhs.get_mpz_t(), w.value.get_den_mpz_t(), g);
  return lhs <= rhs;
}

}  // namespace

Rational d_value(std::uint64_t v, std::uint64_t w, const WeightFunction& psi, const WeightFunction& theta) {
  const Rational a = to_rational(w) * psi.at(v);
  const Rational b = to_rational(v) * theta.at(w);
  return (a > b ? a : b) / to_rational(gcd(v, w));
}

int omega_t(const Natural& v, const Natural& w, const Rational& t, OmegaVariant variant) {
  if (t < 1) throw Error(ErrorKind::invalid_parameter, "omega_t requires t >= 1");
  return omega_fast(v.factors(), w.factors(), floor_u64(t), variant);
}

int omega_t(std::uint64_t v, std::uint64_t w, const Rational& t, OmegaVariant variant) {
  return omega_t(Natural(v), Natural(w), t, variant);
}

bool is_quality_edge(const WeightFunction::Entry& v, const WeightFunction::Entry& w, const Rational& t,
                     const Rational& K, OmegaVariant variant) {
  Integer lhs;
  Integer rhs;
  if (!quality_ok(v, w, lhs, rhs)) return false;
  return omega_fast(v.n.factors(), w.n.factors(), floor_u64(t), variant) >= ceil_threshold(K);
}

EdgeSet build_edge_set(const WeightFunction& psi, const WeightFunction& theta, const Rational& t, const Rational& K,
                       OmegaVariant variant) {
  if (t < 1) throw Error(ErrorKind::invalid_parameter, "build_edge_set requires t >= 1");
  const std::uint64_t t_floor = floor_u64(t);
  const long threshold = ceil_threshold(K);
  std::vector<Edge> out;
  Integer lhs;
  Integer rhs;
  for (const auto& v : psi.entries()) {
    for (const auto& w : theta.entries()) {
      if (!quality_ok(v, w, lhs, rhs)) continue;
      if (omega_fast(v.n.factors(), w.n.factors(), t_floor, variant) < threshold) continue;
      out.emplace_back(v.n.value(), w.n.value());
    }
  }
  // Produced in lexicographic order already.
  return EdgeSet(std::move(out));
}

std::vector<std::uint64_t> neighborhood_of_v(const EdgeSet& edges, std::uint64_t v) {
  std::vector<std::uint64_t> out;
  auto span = edges.edges();
  auto it = std::lower_bound(span.begin(), span.end(), Edge{v, 0});
  for (; it != span.end() && it->first == v; ++it) out.push_back(it->second);
  return out;
}

std::vector<std::uint64_t> neighborhood_of_w(const EdgeSet& edges, std::uint64_t w) {
  std::vector<std::uint64_t> out;
  for (const auto& [v, x] : edges) {
    if (x == w) out.push_back(v);
  }
  return out;
}

Projection restrict_edges(const EdgeSet& edges) {
  Projection out;
  std::set<std::uint64_t> ws;
  for (const auto& [v, w] : edges) {
    if (out.v_side.empty() || out.v_side.back() != v) out.v_side.push_back(v);
    ws.insert(w);
  }
  out.w_side.assign(ws.begin(), ws.end());
  return out;
}

std::vector<std::uint64_t> support_primes(const WeightFunction& psi, const WeightFunction& theta) {
  if (psi.empty() || theta.empty()) return {};
  std::set<std::uint64_t> primes;
  for (const auto* wf : {&psi, &theta}) {
    for (const auto& e : wf->entries()) {
      for (const auto& pp : e.n.factors()) primes.insert(pp.prime);
    }
  }
  return {primes.begin(), primes.end()};
}

std::uint64_t p_value(const WeightFunction& psi, const WeightFunction& theta, std::uint64_t p0) {
  if (p0 < 1) throw Error(ErrorKind::invalid_parameter, "p0 must be >= 1");
  std::uint64_t small = 0;
  for (std::uint64_t p : support_primes(psi, theta)) {
    if (p <= p0) ++small;
  }
  return p0 + small;
}

Interval main_bound_rhs(const Rational& mass_v, const Rational& mass_w, std::uint64_t P, const Params& params,
                        unsigned precision_bits) {
  const Rational product = mass_v * mass_w;
  if (product == 0) return Interval::exact(Rational(0), precision_bits);
  const Expr exponent = Expr::constant(params.inverse_q_prime());
  const Expr C = Expr::constant(params.C);
  const PowerFactor factors[] = {
      {Expr::constant(Rational(100)) * Expr::exp(C), Expr::constant(to_rational(P))},
      {Expr::log_max1(params.t),
       (Expr::exp(Expr::constant(40 * params.C)) - Expr::constant(Rational(1))) / Expr::constant(Rational(2))},
      {Expr::constant(product), exponent},
      {Expr::exp(Expr::constant(-params.C * params.K)), exponent},
  };
  return interval_eval(Rational(1), factors, precision_bits);
}

BoundReport main_bound_check(const PairSystem& system, const Params& params, const EdgeSet& edges) {
  params.validate();
  for (const auto* f : {&system.f(), &system.g()}) {
    const auto powers = prime_powers_of_supports(system.psi(), system.theta());
    if (!validate_multiplicative(*f, powers).accepted) {
      throw Error(ErrorKind::invalid_parameter, "multiplicative function violates (1 * f)(n) <= n");
    }
  }
  for (const auto& [v, w] : edges) {
    const auto* ve = system.psi().find(v);
    const auto* we = system.theta().find(w);
    if (ve == nullptr || we == nullptr || !is_quality_edge(*ve, *we, params.t, params.K)) {
      throw Error(ErrorKind::invalid_parameter,
                  "edge (" + std::to_string(v) + "," + std::to_string(w) + ") is outside E^{t,K}");
    }
  }

  BoundReport report;
  report.lhs = mu_pairs(system, edges);
  report.mass_v = system.mass_v();
  report.mass_w = system.mass_w();
  report.P = p_value(system.psi(), system.theta(), params.p0);
  auto result = certify(
      report.lhs,
      [&](unsigned bits) { return main_bound_rhs(report.mass_v, report.mass_w, report.P, params, bits); },
      compare_le, params.precision_bits, std::max(params.precision_cap, params.precision_bits));
  report.verdict = result.verdict;
  report.rhs = std::move(result.rhs);
  report.precision_bits = result.precision_bits;
  return report;
}

}  // namespace dsq
