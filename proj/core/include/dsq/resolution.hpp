#pragma once

// The resolution step for arithmetically structured edge sets. Every vertex
// is written as v = N v+ / v- with squarefree, coprime parts, and the
// normalised edge mass is bounded by q' (S1 + S2 + S3 + S4)^{1/2}.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "dsq/diagonal.hpp"
#include "dsq/quality.hpp"

namespace dsq {

struct SignedParts {
  std::uint64_t minus = 1;  // primes with nu_p(v/N) = -1
  std::uint64_t plus = 1;   // primes with nu_p(v/N) = +1

  friend bool operator==(const SignedParts&, const SignedParts&) = default;
};

/// Throws not-structured when some |nu_p(v/N)| >= 2.
SignedParts decompose(const Natural& v, const Natural& N);
SignedParts decompose(std::uint64_t v, std::uint64_t N);

/// prod_{p not dividing part} p^{nu_p(N)}.
std::uint64_t coprime_part(const Natural& N, std::uint64_t part);

struct Decomposition {
  std::uint64_t N = 1;
  std::map<std::uint64_t, SignedParts> v_parts;
  std::map<std::uint64_t, SignedParts> w_parts;
};

/// Parts of every vertex of E|_V and E|_W.
Decomposition decompose_edges(const EdgeSet& edges, std::uint64_t N);

struct StructureVerdict {
  bool structured = true;
  std::optional<Edge> witness;
  std::uint64_t prime = 0;  // offending prime when not structured
};

/// |nu_p(v/N)| + |nu_p(w/N)| <= 1 for every edge and prime.
StructureVerdict check_structured(const EdgeSet& edges, std::uint64_t N);

struct SSums {
  Rational s1;  // condition on v-
  Rational s2;  // on v+
  Rational s3;  // on w-
  Rational s4;  // on w+
  /// The same double sum with no condition.
  Rational unconditioned;
  std::uint64_t w0 = 0;
  std::map<std::uint64_t, std::uint64_t> v0;
  bool degenerate = false;  // E' empty, w0 undefined

  Rational total() const { return s1 + s2 + s3 + s4; }
};

/// Each sum is
///   (1/w0+) sum_{w in W'} g(w)/(w w-) (1/v0+(w)) sum_{v in Gamma(w)} f(v)/(v v-)
/// restricted to the edges whose indicated part has >= K/4 primes <= t.
/// Requires check_structured(E', N).
SSums s_sums(const PairSystem& system, const EdgeSet& edges, std::uint64_t N, const Rational& t, const Rational& K);

struct ResolutionReport {
  SSums sums;
  /// mu(E')^2 and (q')^2 (S1+S2+S3+S4) mu(V') mu(W').
  Rational lhs_squared;
  Rational rhs;
  Verdict verdict = Verdict::inconclusive;

  /// Empty when every precondition held; otherwise names the property.
  std::string precondition_failure;
  std::optional<Edge> witness_edge;
  std::optional<std::uint64_t> witness_vertex;

  /// Squared steps of the chain, each <= the next:
  /// mu(E')^2/(mu(V')mu(W')), q' mu(E')/mu(V') mu(Gamma(w0)),
  /// q'^2 sum_{v in Gamma(w0)} mu(v) mu(Gamma(v)), q'^2 unconditioned,
  /// q'^2 (S1+S2+S3+S4).
  std::vector<Rational> chain;
  bool chain_monotone = false;

  bool reconstruction = true;
  bool coprime_parts = true;
  bool four_factor_identity = true;
  bool case_split = true;
  bool pointwise_bounds = true;

  /// mu(E') / ((Log t)^{(e^{40C}-1)/2} (mu(V') mu(W') e^{-10CK})^{1/2}).
  std::optional<Interval> empirical_constant;
};

/// Verifies preconditions (E' inside E^{t,K}, the degree property, the
/// structure property) and then the exact squared inequality. Never throws
/// on a failed precondition; the report names it instead.
ResolutionReport resolution_check(const PairSystem& system, const EdgeSet& edges, std::uint64_t N,
                                  const Params& params);

}  // namespace dsq
