#include "dsq/resolution.hpp"

#include <algorithm>
#include <numeric>

namespace dsq {

namespace {

// nu_p(v) - nu_p(N) over the union of both prime sets.
template <class Visit>
void signed_valuations(const Natural& v, const Natural& N, Visit&& visit) {
  const auto& a = v.factors();
  const auto& b = N.factors();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].prime < b[j].prime)) {
      visit(a[i].prime, a[i].exponent);
      ++i;
    } else if (i == a.size() || b[j].prime < a[i].prime) {
      visit(b[j].prime, -b[j].exponent);
      ++j;
    } else {
      visit(a[i].prime, a[i].exponent - b[j].exponent);
      ++i;
      ++j;
    }
  }
}

bool meets_quarter(std::uint64_t part, const Rational& t, const Rational& K) {
  return at_least(small_prime_count(part, t), K / 4);
}

}  // namespace

SignedParts decompose(const Natural& v, const Natural& N) {
  SignedParts parts;
  signed_valuations(v, N, [&](std::uint64_t p, int d) {
    if (d == 1) parts.plus *= p;
    if (d == -1) parts.minus *= p;
    if (d > 1 || d < -1) {
      throw Error(ErrorKind::not_structured, "nu_" + std::to_string(p) + "(" + std::to_string(v.value()) + "/" +
                                                 std::to_string(N.value()) + ") = " + std::to_string(d));
    }
  });
  return parts;
}

SignedParts decompose(std::uint64_t v, std::uint64_t N) { return decompose(Natural(v), Natural(N)); }

std::uint64_t coprime_part(const Natural& N, std::uint64_t part) {
  std::uint64_t out = 1;
  for (const auto& [p, e] : N.factors()) {
    if (part % p != 0) out *= checked_pow(p, static_cast<unsigned>(e));
  }
  return out;
}

Decomposition decompose_edges(const EdgeSet& edges, std::uint64_t N) {
  Decomposition out;
  out.N = N;
  const Natural n(N);
  for (const auto& [v, w] : edges) {
    if (!out.v_parts.contains(v)) out.v_parts.emplace(v, decompose(Natural(v), n));
    if (!out.w_parts.contains(w)) out.w_parts.emplace(w, decompose(Natural(w), n));
  }
  return out;
}

StructureVerdict check_structured(const EdgeSet& edges, std::uint64_t N) {
  const Natural n(N);
  for (const auto& edge : edges) {
    std::map<std::uint64_t, int> weight;
    signed_valuations(Natural(edge.first), n, [&](std::uint64_t p, int d) { weight[p] += std::abs(d); });
    signed_valuations(Natural(edge.second), n, [&](std::uint64_t p, int d) { weight[p] += std::abs(d); });
    for (const auto& [p, total] : weight) {
      if (total > 1) return {false, edge, p};
    }
  }
  return {};
}

SSums s_sums(const PairSystem& system, const EdgeSet& edges, std::uint64_t N, const Rational& t, const Rational& K) {
  SSums sums;
  if (edges.empty()) {
    sums.degenerate = true;
    return sums;
  }
  const Decomposition parts = decompose_edges(edges, N);

  std::map<std::uint64_t, std::vector<std::uint64_t>> gamma_w;  // w -> Gamma(w), ascending v
  for (const auto& [v, w] : edges) gamma_w[w].push_back(v);

  std::map<std::uint64_t, Rational> inner_term;  // f(v) / (v v-)
  std::map<std::uint64_t, bool> v_minus_ok;
  std::map<std::uint64_t, bool> v_plus_ok;
  for (const auto& [v, sp] : parts.v_parts) {
    inner_term.emplace(v, system.f()(system.psi().find(v)->n) / (to_rational(v) * to_rational(sp.minus)));
    v_minus_ok.emplace(v, meets_quarter(sp.minus, t, K));
    v_plus_ok.emplace(v, meets_quarter(sp.plus, t, K));
  }

  for (const auto& [w, sp] : parts.w_parts) {
    if (sums.w0 == 0 || sp.plus > parts.w_parts.at(sums.w0).plus) sums.w0 = w;
  }
  for (const auto& [w, vs] : gamma_w) {
    std::uint64_t best = vs.front();
    for (std::uint64_t v : vs) {
      if (parts.v_parts.at(v).plus > parts.v_parts.at(best).plus) best = v;
    }
    sums.v0.emplace(w, best);

    Rational all(0);
    Rational minus(0);
    Rational plus(0);
    for (std::uint64_t v : vs) {
      const Rational& term = inner_term.at(v);
      all += term;
      if (v_minus_ok.at(v)) minus += term;
      if (v_plus_ok.at(v)) plus += term;
    }
    const SignedParts& wp = parts.w_parts.at(w);
    const Rational outer = system.g()(system.theta().find(w)->n) /
                           (to_rational(w) * to_rational(wp.minus) * to_rational(parts.v_parts.at(best).plus));
    sums.unconditioned += outer * all;
    sums.s1 += outer * minus;
    sums.s2 += outer * plus;
    if (meets_quarter(wp.minus, t, K)) sums.s3 += outer * all;
    if (meets_quarter(wp.plus, t, K)) sums.s4 += outer * all;
  }
  const Rational scale = Rational(1) / to_rational(parts.w_parts.at(sums.w0).plus);
  sums.unconditioned *= scale;
  sums.s1 *= scale;
  sums.s2 *= scale;
  sums.s3 *= scale;
  sums.s4 *= scale;
  return sums;
}

ResolutionReport resolution_check(const PairSystem& system, const EdgeSet& edges, std::uint64_t N,
                                  const Params& params) {
  params.validate();
  ResolutionReport report;
  if (edges.empty()) {
    report.precondition_failure = "empty edge set";
    report.sums.degenerate = true;
    return report;
  }
  for (const auto& edge : edges) {
    const auto* v = system.psi().find(edge.first);
    const auto* w = system.theta().find(edge.second);
    if (v == nullptr || w == nullptr || !is_quality_edge(*v, *w, params.t, params.K)) {
      report.precondition_failure = "edge outside the quality edge set";
      report.witness_edge = edge;
      return report;
    }
  }
  if (auto failure = check_property2(system, edges, params)) {
    report.precondition_failure = std::string("degree property fails on the ") + to_string(failure->side) + " side";
    report.witness_vertex = failure->vertex;
    return report;
  }
  if (auto structure = check_structured(edges, N); !structure.structured) {
    report.precondition_failure = "structure property fails at p = " + std::to_string(structure.prime);
    report.witness_edge = structure.witness;
    return report;
  }

  report.sums = s_sums(system, edges, N, params.t, params.K);
  const Decomposition parts = decompose_edges(edges, N);
  const Projection proj = restrict_edges(edges);
  const Rational mu_e = mu_pairs(system, edges);
  const Rational mu_v = mu_set_v(system, proj.v_side);
  const Rational mu_w = mu_set_w(system, proj.w_side);
  const Rational qp = params.q_prime();

  report.lhs_squared = mu_e * mu_e;
  report.rhs = qp * qp * report.sums.total() * mu_v * mu_w;
  report.verdict = report.lhs_squared <= report.rhs ? Verdict::holds : Verdict::violated;

  // Per-edge structural facts.
  const auto& wp0 = parts.w_parts.at(report.sums.w0);
  for (const auto& [v, w] : edges) {
    const SignedParts& vp = parts.v_parts.at(v);
    const SignedParts& wp = parts.w_parts.at(w);
    const Rational Nr = to_rational(N);
    if (Nr * to_rational(vp.plus) / to_rational(vp.minus) != to_rational(v) ||
        Nr * to_rational(wp.plus) / to_rational(wp.minus) != to_rational(w)) {
      report.reconstruction = false;
    }
    const std::uint64_t four[] = {vp.minus, vp.plus, wp.minus, wp.plus};
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) {
        if (gcd(four[a], four[b]) != 1) report.coprime_parts = false;
      }
    }
    const std::uint64_t g = gcd(v, w);
    const Integer lhs = to_integer(v / g) * to_integer(w / g);
    const Integer rhs = to_integer(vp.minus) * to_integer(vp.plus) * to_integer(wp.minus) * to_integer(wp.plus);
    if (lhs != rhs) report.four_factor_identity = false;
    const bool any_quarter = std::any_of(std::begin(four), std::end(four), [&](std::uint64_t part) {
      return meets_quarter(part, params.t, params.K);
    });
    if (!any_quarter) report.case_split = false;
    if (system.theta().find(w)->value * to_rational(parts.v_parts.at(report.sums.v0.at(w)).plus) *
            to_rational(wp.minus) > 1) {
      report.pointwise_bounds = false;
    }
  }
  const auto gamma_w0 = neighborhood_of_w(edges, report.sums.w0);
  for (std::uint64_t v : gamma_w0) {
    if (system.psi().find(v)->value * to_rational(parts.v_parts.at(v).minus) * to_rational(wp0.plus) > 1) {
      report.pointwise_bounds = false;
    }
  }

  // The chain, squared.
  Rational second(0);
  for (std::uint64_t v : gamma_w0) {
    second += system.mu_v(v) * mu_set_w(system, neighborhood_of_v(edges, v));
  }
  report.chain = {mu_e * mu_e / (mu_v * mu_w), qp * (mu_e / mu_v) * mu_set_v(system, gamma_w0), qp * qp * second,
                  qp * qp * report.sums.unconditioned, qp * qp * report.sums.total()};
  report.chain_monotone = std::is_sorted(report.chain.begin(), report.chain.end());

  const Expr log_power =
      Expr::log_max1(params.t).pow((Expr::exp(Expr::constant(40 * params.C)) - Expr::constant(Rational(1))) /
                                   Expr::constant(Rational(2)));
  const Expr decay = Expr::exp(Expr::constant(-10 * params.C * params.K));
  const Expr denominator = log_power * (Expr::constant(mu_v * mu_w) * decay).pow(Expr::constant(Rational(1, 2)));
  report.empirical_constant = (Expr::constant(mu_e) / denominator).eval(params.precision_bits);
  return report;
}

}  // namespace dsq
