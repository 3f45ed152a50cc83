#include <random>

#include "doctest.h"
#include "dsq/instance_io.hpp"
#include "dsq/model.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace dsq;
using testing::error_kind;
using testing::q;
using testing::weights;

TEST_CASE("WeightFunction rejects zero values and zero keys") {
  CHECK(error_kind([] { weights({{2, q(0)}}); }) == ErrorKind::invalid_parameter);
  CHECK(error_kind([] { weights({{2, q(-1, 3)}}); }) == ErrorKind::invalid_parameter);
  CHECK(error_kind([] { weights({{0, q(1)}}); }) == ErrorKind::invalid_parameter);
  const auto psi = weights({{6, q(1, 2)}, {2, q(1, 3)}});
  CHECK(psi.support() == std::vector<std::uint64_t>{2, 6});
  CHECK(psi.at(6) == q(1, 2));
  CHECK(psi.at(5) == 0);
  CHECK_FALSE(psi.contains(5));
}

TEST_CASE("validate_multiplicative examples") {
  const std::vector<PrimePower> pp = {{2, 1}, {2, 2}, {3, 1}};
  CHECK(validate_multiplicative(MultiplicativeFunction::totient(), pp).accepted);

  const auto zero = MultiplicativeFunction::from_table({{{2, 1}, q(0)}, {{2, 2}, q(0)}, {{3, 1}, q(0)}});
  CHECK(validate_multiplicative(zero, pp).accepted);

  const auto bad = MultiplicativeFunction::from_table({{{2, 1}, q(2)}});
  const std::vector<PrimePower> two = {{2, 1}};
  const auto verdict = validate_multiplicative(bad, two);
  CHECK_FALSE(verdict.accepted);
  REQUIRE(verdict.counterexample);
  CHECK(verdict.counterexample->first.prime == 2);
  CHECK(verdict.counterexample->second == 3);

  const auto partial = MultiplicativeFunction::from_table({{{2, 1}, q(1)}});
  CHECK(error_kind([&] { validate_multiplicative(partial, pp); }) == ErrorKind::incomplete_definition);
}

TEST_CASE("totient on prime powers matches counting") {
  const auto phi = MultiplicativeFunction::totient();
  for (std::uint64_t n = 1; n <= 500; ++n) {
    REQUIRE(phi(n) == Rational(static_cast<unsigned long>(oracle::totient(n))));
  }
}

TEST_CASE("mu_point examples") {
  const auto phi = MultiplicativeFunction::totient();
  const auto psi = weights({{6, q(1, 2)}});
  CHECK(mu_point(phi, psi, 6) == q(1, 6));
  CHECK(mu_point(phi, psi, 5) == 0);
  const auto zero = MultiplicativeFunction::from_table({{{2, 1}, q(0)}, {{3, 1}, q(0)}});
  CHECK(mu_point(zero, psi, 6) == 0);
}

TEST_CASE("mu_set examples") {
  const auto phi = MultiplicativeFunction::totient();
  const auto psi = weights({{2, q(1, 2)}, {3, q(1, 3)}});
  CHECK(mu_set(phi, psi, {}) == 0);
  const std::vector<std::uint64_t> both = {2, 3};
  CHECK(mu_set(phi, psi, both) == q(17, 36));
  const std::vector<std::uint64_t> one = {3};
  CHECK(mu_set(phi, psi, one) == mu_point(phi, psi, 3));
}

TEST_CASE("mu_pairs examples") {
  const auto psi = weights({{2, q(1, 2)}, {3, q(1, 3)}});
  const auto theta = weights({{4, q(1, 5)}, {9, q(1, 7)}});
  const auto system = testing::totient_system(psi, theta);
  CHECK(mu_pairs(system, EdgeSet{}) == 0);
  CHECK(mu_pairs(system, EdgeSet({{3, 9}})) == system.mu_v(3) * system.mu_w(9));
  const EdgeSet full({{2, 4}, {2, 9}, {3, 4}, {3, 9}});
  CHECK(mu_pairs(system, full) == system.mass_v() * system.mass_w());
}

TEST_CASE("PairSystem rejects edges outside the supports") {
  const auto psi = weights({{2, q(1, 2)}});
  const auto theta = weights({{3, q(1, 2)}});
  CHECK(error_kind([&] { testing::totient_system(psi, theta, EdgeSet({{2, 5}})); }) ==
        ErrorKind::invalid_parameter);
}

TEST_CASE("measures: additivity, product bound and multiplicativity on random data") {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 50; ++round) {
    const Instance inst = oracle::random_instance(1000 + round, 60, q(1, 2));
    const PairSystem& sys = inst.system;
    const auto support = sys.psi().support();

    std::vector<std::uint64_t> left;
    std::vector<std::uint64_t> right;
    for (auto v : support) (rng() % 2 ? left : right).push_back(v);
    const Rational whole = mu_set(sys.f(), sys.psi(), support);
    CHECK(whole == mu_set(sys.f(), sys.psi(), left) + mu_set(sys.f(), sys.psi(), right));
    CHECK(whole == sys.mass_v());

    std::vector<Edge> subset;
    for (auto v : sys.psi().support()) {
      for (auto w : sys.theta().support()) {
        if (rng() % 3 == 0) subset.emplace_back(v, w);
      }
    }
    CHECK(mu_pairs(sys, EdgeSet(subset)) <= sys.mass_v() * sys.mass_w());
  }

  // f evaluated through its prime-power table equals the product computed
  // from a naive factorization.
  MultiplicativeFunction::Table table;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13}) {
    for (int a = 1; a <= 12; ++a) table[{p, a}] = q(static_cast<long>(rng() % 7), 1 + static_cast<long>(rng() % 5));
  }
  const auto f = MultiplicativeFunction::from_table(table);
  int checked = 0;
  while (checked < 1000) {
    std::uint64_t n = 1;
    Rational expected(1);
    for (std::uint64_t p : {2, 3, 5, 7, 11, 13}) {
      const int a = static_cast<int>(rng() % 4);
      for (int k = 0; k < a; ++k) n *= p;
      if (a > 0) expected *= table.at({p, a});
    }
    REQUIRE(f(n) == expected);
    ++checked;
  }
  CHECK(error_kind([&] { f(17); }) == ErrorKind::incomplete_definition);
}

TEST_CASE("instance files round trip") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorConfig config = GeneratorConfig::campaign_default(seed);
    config.support_max = 30;
    config.random_multiplicative = seed % 2 == 0;
    const Instance inst = generate_instance(config);
    const std::string text = serialize_instance(inst);
    const Instance back = parse_instance(text);
    CHECK(serialize_instance(back) == text);
    CHECK(back.system.psi() == inst.system.psi());
    CHECK(back.system.theta() == inst.system.theta());
    CHECK(back.system.f() == inst.system.f());
    CHECK(back.system.edges() == inst.system.edges());
    CHECK(back.params.epsilon == inst.params.epsilon);
  }
}

TEST_CASE("instance parsing errors") {
  CHECK(error_kind([] { parse_instance("{"); }) == ErrorKind::parse_error);
  CHECK(error_kind([] { parse_instance(R"({"psi": {"2": "x"}, "theta": {}})"); }) == ErrorKind::parse_error);
  const Instance inst = parse_instance(
      R"({"psi": {"2": "1/2", "3": "1/3"}, "theta": {"2": "1/2", "9": "1/9"},
          "f": "totient", "g": "totient", "edges": "auto", "params": {"t": "10", "K": "0"}})");
  CHECK(inst.edges_auto);
  CHECK(serialize_edges(inst.system.edges()) == "[[2,2],[3,9]]");
}
