#pragma once

// Pair quality D_{psi,theta}, the anatomical defect omega_t, the edge sets
// E^{t,K}_{psi,theta}, and the certified main inequality
//
//   mu(E) <= (100 e^C)^P (Log t)^{(e^{40C}-1)/2} (mu(V) mu(W) e^{-CK})^{1/2+eps}.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsq/interval.hpp"
#include "dsq/model.hpp"

namespace dsq {

struct Params {
  Rational epsilon{2, 5};
  Rational C{1};
  Rational t{1};
  Rational K{0};
  std::uint64_t p0 = 100;
  unsigned precision_bits = kDefaultPrecisionBits;
  unsigned precision_cap = kDefaultPrecisionCap;

  /// q = 2 / (1 - 2 eps).
  Rational q() const;
  /// q' = 2 / (1 + 2 eps), the conjugate exponent of q.
  Rational q_prime() const;
  /// 1/q' = 1/2 + eps.
  Rational inverse_q_prime() const { return Rational(1, 2) + epsilon; }

  /// eps in (0, 2/5], C > 0, t >= 1, p0 >= 1, precision >= 2.
  void validate() const;
};

/// How omega_t reads "p divides vw/gcd": the squared form (primes where the
/// valuations differ) is the default; the literal lcm form is kept for
/// comparison.
enum class OmegaVariant { squared, lcm };

Rational d_value(std::uint64_t v, std::uint64_t w, const WeightFunction& psi, const WeightFunction& theta);

/// #{p <= t : nu_p(v) != nu_p(w)} (squared) or #{p <= t : p | vw} (lcm).
int omega_t(const Natural& v, const Natural& w, const Rational& t, OmegaVariant variant = OmegaVariant::squared);
int omega_t(std::uint64_t v, std::uint64_t w, const Rational& t, OmegaVariant variant = OmegaVariant::squared);

/// {(v, w) in V x W : D(v, w) <= 1 and omega_t(v, w) >= K}, sorted.
EdgeSet build_edge_set(const WeightFunction& psi, const WeightFunction& theta, const Rational& t, const Rational& K,
                       OmegaVariant variant = OmegaVariant::squared);

/// True iff (v, w) satisfies both quality conditions.
bool is_quality_edge(const WeightFunction::Entry& v, const WeightFunction::Entry& w, const Rational& t,
                     const Rational& K, OmegaVariant variant = OmegaVariant::squared);

std::vector<std::uint64_t> neighborhood_of_v(const EdgeSet& edges, std::uint64_t v);
std::vector<std::uint64_t> neighborhood_of_w(const EdgeSet& edges, std::uint64_t w);

struct Projection {
  std::vector<std::uint64_t> v_side;  // E|_V
  std::vector<std::uint64_t> w_side;  // E|_W
};

Projection restrict_edges(const EdgeSet& edges);

/// {p : p | vw for some (v, w) in V x W}, ascending. Empty if either
/// support is empty.
std::vector<std::uint64_t> support_primes(const WeightFunction& psi, const WeightFunction& theta);

/// p0 + #(support primes <= p0).
std::uint64_t p_value(const WeightFunction& psi, const WeightFunction& theta, std::uint64_t p0);

struct BoundReport {
  Rational lhs;
  Interval rhs;
  Verdict verdict = Verdict::inconclusive;
  unsigned precision_bits = 0;
  std::uint64_t P = 0;
  Rational mass_v;
  Rational mass_w;
  /// Serialized instance, attached by the harness for violated verdicts.
  std::optional<std::string> witness;
};

/// Encloses the right-hand side of the main inequality for the given masses.
Interval main_bound_rhs(const Rational& mass_v, const Rational& mass_w, std::uint64_t P, const Params& params,
                        unsigned precision_bits);

/// Exact lhs = mu(E) against the enclosed rhs, escalating precision from
/// params.precision_bits to params.precision_cap while inconclusive.
/// Requires E inside the quality edge set and f, g satisfying
/// (1 * f)(n) <= n on the supports; throws invalid-parameter otherwise.
BoundReport main_bound_check(const PairSystem& system, const Params& params, const EdgeSet& edges);

}  // namespace dsq
