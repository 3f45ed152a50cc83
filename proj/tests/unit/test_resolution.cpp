#include "doctest.h"
#include "dsq/diagonal.hpp"
#include "dsq/harness.hpp"
#include "dsq/resolution.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace dsq;
using testing::error_kind;
using testing::q;
using testing::weights;

namespace {

struct Parts {
  std::uint64_t minus = 1;
  std::uint64_t plus = 1;
};

Parts naive_parts(std::uint64_t v, std::uint64_t N) {
  Parts out;
  for (std::uint64_t p = 2; p <= std::max(v, N); ++p) {
    if (!oracle::is_prime(p)) continue;
    const int d = oracle::nu(p, v) - oracle::nu(p, N);
    if (d == 1) out.plus *= p;
    if (d == -1) out.minus *= p;
  }
  return out;
}

// The four sums with f = g = totient, written straight from the definition.
std::array<Rational, 4> naive_s_sums(const EdgeSet& edges, std::uint64_t N, std::uint64_t t, const Rational& K) {
  std::map<std::uint64_t, std::vector<std::uint64_t>> gamma;
  for (const auto& [v, w] : edges) gamma[w].push_back(v);
  std::uint64_t w0 = 0;
  std::uint64_t best = 0;
  for (const auto& [w, unused] : gamma) {
    const std::uint64_t plus = naive_parts(w, N).plus;
    if (plus > best) {
      best = plus;
      w0 = w;
    }
  }
  const Rational w0_plus = oracle::ratio(naive_parts(w0, N).plus, 1);
  const auto ok = [&](std::uint64_t part) { return Rational(oracle::omega_single(part, t)) >= K / 4; };
  std::array<Rational, 4> sums{0, 0, 0, 0};
  for (const auto& [w, vs] : gamma) {
    const Parts pw = naive_parts(w, N);
    std::uint64_t v0_plus = 0;
    for (auto v : vs) v0_plus = std::max(v0_plus, naive_parts(v, N).plus);
    const Rational outer = oracle::ratio(oracle::totient(w), w * pw.minus) / w0_plus / oracle::ratio(v0_plus, 1);
    for (auto v : vs) {
      const Parts pv = naive_parts(v, N);
      const Rational term = outer * oracle::ratio(oracle::totient(v), v * pv.minus);
      if (ok(pv.minus)) sums[0] += term;
      if (ok(pv.plus)) sums[1] += term;
      if (ok(pw.minus)) sums[2] += term;
      if (ok(pw.plus)) sums[3] += term;
    }
  }
  return sums;
}

}  // namespace

TEST_CASE("decompose examples") {
  CHECK(decompose(6, 6) == SignedParts{1, 1});
  CHECK(decompose(4, 6) == SignedParts{3, 2});
  CHECK(error_kind([] { decompose(24, 6); }) == ErrorKind::not_structured);
  CHECK(coprime_part(Natural(12), 2) == 3);
  CHECK(coprime_part(Natural(12), 1) == 12);
}

TEST_CASE("check_structured examples") {
  CHECK(check_structured(EdgeSet({{6, 6}}), 6).structured);
  CHECK(check_structured(EdgeSet({{12, 6}}), 6).structured);
  const StructureVerdict bad = check_structured(EdgeSet({{12, 12}}), 6);
  CHECK_FALSE(bad.structured);
  REQUIRE(bad.witness);
  CHECK(*bad.witness == Edge{12, 12});
  CHECK(bad.prime == 2);
}

TEST_CASE("s_sums examples") {
  const auto one = weights({{1, q(1)}});
  const auto sys = testing::totient_system(one, one, EdgeSet({{1, 1}}));
  const SSums s = s_sums(sys, sys.edges(), 1, q(10), q(0));
  CHECK(s.s1 == 1);
  CHECK(s.s2 == 1);
  CHECK(s.unconditioned == 1);
  CHECK(s.w0 == 1);

  const SSums none = s_sums(sys, sys.edges(), 1, q(10), q(4 * 4 + 1));
  CHECK(none.total() == 0);

  const SSums empty = s_sums(sys, EdgeSet{}, 1, q(10), q(0));
  CHECK(empty.degenerate);
  CHECK(empty.total() == 0);
}

TEST_CASE("resolution_check examples") {
  const auto one = weights({{1, q(1)}});
  const auto sys = testing::totient_system(one, one, EdgeSet({{1, 1}}));
  Params params;
  params.epsilon = q(1, 4);
  const ResolutionReport r = resolution_check(sys, sys.edges(), 1, params);
  CHECK(r.precondition_failure.empty());
  CHECK(r.lhs_squared == 1);
  CHECK(r.rhs == q(16, 9) * 4);
  CHECK(r.verdict == Verdict::holds);
  CHECK(r.chain_monotone);

  // 4 and 9 around N = 6: v = (3, 2), w = (2, 3)
  CHECK(decompose(4, 6).minus * decompose(4, 6).plus * decompose(9, 6).minus * decompose(9, 6).plus == 36);

  const auto twelve = weights({{12, q(1, 12)}});
  const auto unstructured = testing::totient_system(twelve, twelve, EdgeSet({{12, 12}}));
  const ResolutionReport bad = resolution_check(unstructured, unstructured.edges(), 6, params);
  CHECK_FALSE(bad.precondition_failure.empty());
  CHECK(bad.verdict == Verdict::inconclusive);
  REQUIRE(bad.witness_edge);
  CHECK(*bad.witness_edge == Edge{12, 12});
}

TEST_CASE("resolution on the concentrate-peel pipeline") {
  int resolved = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Instance inst = oracle::random_instance(seed, 60, q(2, 3));
    const auto& sys = inst.system;
    if (mu_pairs(sys, sys.edges()) == 0) continue;
    const ConcentrationResult c = concentrate(sys, sys.edges(), inst.params);
    const PeelResult p = peel(sys, c.e_star, inst.params);
    if (p.edges.empty()) continue;
    REQUIRE(check_structured(p.edges, c.N).structured);

    const ResolutionReport r = resolution_check(sys, p.edges, c.N, inst.params);
    INFO("seed " << seed << " " << r.precondition_failure);
    CHECK(r.precondition_failure.empty());
    CHECK(r.verdict == Verdict::holds);
    CHECK(r.chain_monotone);
    CHECK(r.reconstruction);
    CHECK(r.coprime_parts);
    CHECK(r.four_factor_identity);
    CHECK(r.case_split);
    CHECK(r.pointwise_bounds);
    ++resolved;

    for (const auto& [v, w] : p.edges) {
      const Parts pv = naive_parts(v, c.N);
      const Parts pw = naive_parts(w, c.N);
      const SignedParts lib = decompose(v, c.N);
      REQUIRE(lib.minus == pv.minus);
      REQUIRE(lib.plus == pv.plus);
      const std::uint64_t g = oracle::gcd(v, w);
      REQUIRE((v / g) * (w / g) == pv.minus * pv.plus * pw.minus * pw.plus);
    }

    if (sys.f().is_totient() && sys.g().is_totient()) {
      const std::uint64_t t = floor_u64(inst.params.t);
      const auto expected = naive_s_sums(p.edges, c.N, t, inst.params.K);
      CHECK(r.sums.s1 == expected[0]);
      CHECK(r.sums.s2 == expected[1]);
      CHECK(r.sums.s3 == expected[2]);
      CHECK(r.sums.s4 == expected[3]);
    }
  }
  CHECK(resolved > 10);
}
