#include <tuple>

#include "doctest.h"
#include "dsq/diagonal.hpp"
#include "dsq/harness.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace dsq;
using testing::error_kind;
using testing::q;
using testing::weights;

namespace {

// Recomputes the whole degree table before every removal.
std::vector<std::pair<std::uint64_t, Side>> naive_peel(const PairSystem& sys, EdgeSet edges, const Rational& inv_qp) {
  std::vector<std::pair<std::uint64_t, Side>> order;
  for (;;) {
    if (edges.empty()) return order;
    Rational mu_e(0);
    std::map<std::uint64_t, Rational> gamma_v;
    std::map<std::uint64_t, Rational> gamma_w;
    for (const auto& [v, w] : edges) {
      mu_e += sys.mu_v(v) * sys.mu_w(w);
      gamma_v[v] += sys.mu_w(w);
      gamma_w[w] += sys.mu_v(v);
    }
    Rational mass_v(0);
    Rational mass_w(0);
    for (const auto& [v, unused] : gamma_v) mass_v += sys.mu_v(v);
    for (const auto& [w, unused] : gamma_w) mass_w += sys.mu_w(w);

    std::optional<std::tuple<Rational, std::uint64_t, int>> best;
    auto consider = [&](const std::map<std::uint64_t, Rational>& gamma, const Rational& side, int tag) {
      for (const auto& [x, g] : gamma) {
        if (g * side >= inv_qp * mu_e) continue;
        std::tuple<Rational, std::uint64_t, int> key{g * side / mu_e, x, tag};
        if (!best || key < *best) best = key;
      }
    };
    consider(gamma_v, mass_v, 0);
    consider(gamma_w, mass_w, 1);
    if (!best) return order;
    const auto [ratio, x, tag] = *best;
    order.emplace_back(x, tag == 0 ? Side::v : Side::w);
    std::vector<Edge> kept;
    for (const auto& e : edges) {
      if ((tag == 0 ? e.first : e.second) != x) kept.push_back(e);
    }
    edges = EdgeSet(kept);
  }
}

Rational oracle_tail(const DiagonalMeasure& dm, int k) {
  Rational tail(0);
  for (const auto& [cell, m] : dm.cells) {
    if (std::abs(cell.first - k) + std::abs(cell.second - k) >= 2) tail += m;
  }
  return tail;
}

}  // namespace

TEST_CASE("diagonal_measure examples") {
  const auto psi = weights({{3, q(1, 3)}});
  const auto theta = weights({{9, q(1, 9)}});
  const auto sys = testing::totient_system(psi, theta, EdgeSet({{3, 9}}));
  const DiagonalMeasure dm = diagonal_measure(sys, sys.edges(), 3);
  CHECK(dm.cells.size() == 1);
  CHECK(dm.cell(1, 2) == 1);
  CHECK(dm.cell(0, 0) == 0);
  dm.validate();

  const DiagonalMeasure off = diagonal_measure(sys, sys.edges(), 5);
  CHECK(off.cell(0, 0) == 1);

  // mu(1) = 1 and mu(2) = phi(2) * 2 / 2 = 1
  const auto both = weights({{1, q(1)}, {2, q(2)}});
  const auto split = testing::totient_system(both, both, EdgeSet({{1, 1}, {2, 2}}));
  const DiagonalMeasure half = diagonal_measure(split, split.edges(), 2);
  CHECK(half.cell(0, 0) == q(1, 2));
  CHECK(half.cell(1, 1) == q(1, 2));
  CHECK(half.alpha_at(0) == q(1, 2));

  CHECK(error_kind([&] { diagonal_measure(sys, EdgeSet{}, 3); }) == ErrorKind::degenerate_measure);
}

TEST_CASE("find_center examples") {
  DiagonalMeasure point;
  point.p = 2;
  point.cells = {{{3, 3}, q(1)}};
  point.alpha = {{3, q(1)}};
  point.beta = {{3, q(1)}};
  point.total = 1;
  CenterResult c = find_center(point);
  CHECK(c.k == 3);
  CHECK(c.tail_mass == 0);

  DiagonalMeasure two = point;
  two.cells = {{{0, 0}, q(1, 2)}, {{1, 1}, q(1, 2)}};
  two.alpha = {{0, q(1, 2)}, {1, q(1, 2)}};
  two.beta = two.alpha;
  c = find_center(two);
  CHECK(c.k == 0);
  CHECK(c.tail_mass == q(1, 2));

  DiagonalMeasure cross = point;
  cross.cells = {{{4, 4}, q(1, 5)}, {{3, 4}, q(1, 5)}, {{5, 4}, q(1, 5)}, {{4, 3}, q(1, 5)}, {{4, 5}, q(1, 5)}};
  cross.alpha = {{3, q(1, 5)}, {4, q(3, 5)}, {5, q(1, 5)}};
  cross.beta = cross.alpha;
  c = find_center(cross);
  CHECK(c.k == 4);
  CHECK(c.tail_mass == 0);
}

TEST_CASE("bilinear_check examples") {
  const auto one = weights({{1, q(1)}});
  const auto sys = testing::totient_system(one, one, EdgeSet({{1, 1}}));
  Params params;
  params.p0 = 1;
  const auto diag = bilinear_check(diagonal_measure(sys, sys.edges(), 3), params);
  REQUIRE(diag.size() == 1);
  CHECK(diag[0].verdict == Verdict::holds);

  const auto w2 = weights({{2, q(1)}});
  const auto off = testing::totient_system(one, w2, EdgeSet({{1, 2}}));
  params.epsilon = q(1, 4);
  params.C = q(1, 100);
  const DiagonalMeasure dm = diagonal_measure(off, off.edges(), 2);
  CHECK(dm.cell(0, 1) == 1);
  const auto verdicts = bilinear_check(dm, params);
  REQUIRE(verdicts.size() == 1);
  CHECK(verdicts[0].verdict == Verdict::violated);
  CHECK(verdicts[0].bound.hi_double() < 1.0);
}

TEST_CASE("concentrate examples") {
  const auto psi = weights({{3, q(1, 3)}});
  const auto theta = weights({{9, q(1, 9)}});
  const auto sys = testing::totient_system(psi, theta, EdgeSet({{3, 9}}));
  const ConcentrationResult r = concentrate(sys, sys.edges(), Params{});
  CHECK(r.centers.at(3).k == 1);
  CHECK(r.N == 3);
  CHECK(r.e_star == sys.edges());
  CHECK(r.excluded_mass == 0);

  const auto twelve = weights({{12, q(1, 12)}});
  const auto diag = testing::totient_system(twelve, twelve, EdgeSet({{12, 12}}));
  const ConcentrationResult d = concentrate(diag, diag.edges(), Params{});
  CHECK(d.N == 12);
  CHECK(d.e_star == diag.edges());

  // centre at k = 0 for p = 2: the pair (1, 4) has distance 2 and is dropped.
  const auto v = weights({{1, q(1)}, {2, q(2)}});
  const auto w = weights({{1, q(1)}, {4, q(4)}});
  const auto far = testing::totient_system(v, w, EdgeSet({{1, 1}, {2, 1}, {1, 4}}));
  const ConcentrationResult f = concentrate(far, far.edges(), Params{});
  CHECK(f.N == 1);
  CHECK(f.e_star == EdgeSet({{1, 1}, {2, 1}}));
  CHECK(f.excluded_fraction == q(2, 4));
}

TEST_CASE("peel examples") {
  Params params;
  params.epsilon = q(1, 4);

  const auto single = weights({{2, q(1, 2)}});
  const auto one = testing::totient_system(single, single, EdgeSet({{2, 2}}));
  const PeelResult fixed = peel(one, one.edges(), params);
  CHECK(fixed.edges == one.edges());
  CHECK(fixed.trace.empty());

  CHECK(peel(one, EdgeSet{}, params).edges.empty());

  // mu(2) = 1, mu(3) = 1/100, mu(5) = mu(7) = 1. Only 3 breaks the degree
  // inequality: 1 < (3/4)(201/100)/(101/100).
  const auto psi = weights({{2, q(2)}, {3, q(3, 200)}});
  const auto theta = weights({{5, q(5, 4)}, {7, q(7, 6)}});
  const auto star = testing::totient_system(psi, theta, EdgeSet({{2, 5}, {2, 7}, {3, 5}}));
  REQUIRE(star.mu_v(3) == q(1, 100));
  const auto failure = check_property2(star, star.edges(), params);
  REQUIRE(failure);
  CHECK(failure->vertex == 3);
  CHECK(failure->required == q(603, 404));
  const PeelResult peeled = peel(star, star.edges(), params);
  REQUIRE(peeled.trace.size() == 1);
  CHECK(peeled.trace[0].vertex == 3);
  CHECK(peeled.trace[0].side == Side::v);
  CHECK(peeled.trace[0].mu_edges_before == q(201, 100));
  CHECK(peeled.trace[0].mu_edges_after == 2);
  CHECK(peeled.trace[0].certificate == Verdict::holds);
  CHECK(peeled.edges == EdgeSet({{2, 5}, {2, 7}}));
  CHECK_FALSE(check_property2(star, peeled.edges, params));

  const std::string trace = format_trace(peeled.trace);
  CHECK(trace.rfind("step,vertex,side", 0) == 0);
  CHECK(trace.find("1,3,v,201/100,2") != std::string::npos);
}

TEST_CASE("diagonal invariants on random instances") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = oracle::random_instance(seed, 50, q(2, 3));
    const auto& sys = inst.system;
    if (mu_pairs(sys, sys.edges()) == 0) continue;
    for (const std::uint64_t p : support_primes(sys.psi(), sys.theta())) {
      if (p > 13) break;
      const DiagonalMeasure dm = diagonal_measure(sys, sys.edges(), p);
      dm.validate();
      Rational cells(0);
      for (const auto& [cell, m] : dm.cells) cells += m;
      CHECK(cells == 1);
      const CenterResult c = find_center(dm);
      CHECK(c.tail_mass == oracle_tail(dm, c.k));
      int lo = dm.cells.begin()->first.first;
      int hi = lo;
      for (const auto& [cell, m] : dm.cells) {
        lo = std::min({lo, cell.first, cell.second});
        hi = std::max({hi, cell.first, cell.second});
      }
      for (int k = lo - 5; k <= hi + 5; ++k) {
        const Rational t = oracle_tail(dm, k);
        REQUIRE(t >= c.tail_mass);
        // ties resolve to the smallest k of the occupied hull
        if (k >= lo && k < c.k) REQUIRE(t > c.tail_mass);
      }
    }

    const ConcentrationResult r = concentrate(sys, sys.edges(), inst.params);
    CHECK(mu_pairs(sys, r.e_star) + r.excluded_mass == mu_pairs(sys, sys.edges()));
    for (const auto& [v, w] : r.e_star) {
      for (const std::uint64_t p : support_primes(sys.psi(), sys.theta())) {
        const int k = oracle::nu(p, r.N);
        REQUIRE(std::abs(oracle::nu(p, v) - k) + std::abs(oracle::nu(p, w) - k) <= 1);
      }
    }

    const PeelResult peeled = peel(sys, r.e_star, inst.params);
    const auto expected = naive_peel(sys, r.e_star, inst.params.inverse_q_prime());
    REQUIRE(peeled.trace.size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
      CHECK(peeled.trace[k].vertex == expected[k].first);
      CHECK(peeled.trace[k].side == expected[k].second);
      CHECK(peeled.trace[k].certificate == Verdict::holds);
    }
    CHECK_FALSE(check_property2(sys, peeled.edges, inst.params));
    const auto proj = restrict_edges(r.e_star);
    CHECK(peeled.trace.size() <= proj.v_side.size() + proj.w_side.size());
  }
}
