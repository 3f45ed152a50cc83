#pragma once

// Diagonal concentration of p-adic valuation pairs and the peeling that
// yields a combinatorially structured edge set.
//
// For a prime p the normalised measure
//   m(i, j) = mu(E cap (V_i x W_j)) / mu(E),   V_i = {v : nu_p(v) = i}
// is expected to sit within distance 1 of a diagonal point (k, k).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsq/interval.hpp"
#include "dsq/quality.hpp"

namespace dsq {

using Cell = std::pair<int, int>;

struct DiagonalMeasure {
  std::uint64_t p = 0;
  std::map<Cell, Rational> cells;  // nonzero entries only
  std::map<int, Rational> alpha;   // mu(V_i) / mu(V), nonzero entries only
  std::map<int, Rational> beta;    // mu(W_j) / mu(W)
  Rational total;                  // mu(E) of the source, > 0

  /// Cells and marginals each sum to exactly 1, all entries positive.
  void validate() const;
  Rational cell(int i, int j) const;
  Rational alpha_at(int i) const;
  Rational beta_at(int j) const;
};

/// Throws degenerate-measure when mu(E) = 0.
DiagonalMeasure diagonal_measure(const PairSystem& system, const EdgeSet& edges, std::uint64_t p);

struct CellVerdict {
  Cell cell;
  Rational mass;
  Interval bound;
  Verdict verdict = Verdict::inconclusive;
};

/// Compares every nonzero cell against
///   (100 e^C)^{-[p <= p0]} p^{-|i-j|/q} (alpha_i beta_j e^{[i != j] C})^{1/q'}.
/// A diagnostic: the bound is only proved for minimal counterexamples.
std::vector<CellVerdict> bilinear_check(const DiagonalMeasure& dm, const Params& params);

struct CenterResult {
  int k = 0;
  Rational tail_mass;
};

/// sum of m(i, j) over |i - k| + |j - k| >= 2.
Rational tail_mass(const DiagonalMeasure& dm, int k);

/// Minimises tail_mass over k. Every k outside the hull [min, max] of the
/// occupied indices has tail 1, so the search runs over the hull and the
/// two neighbouring values only confirm that; ties go to the smallest k.
CenterResult find_center(const DiagonalMeasure& dm);

/// The decay hypothesis with c1 = (100e^C)^{-[p<=p0]}, lambda =
/// p^{-1/2+eps}, C3 = e^C, x_i = alpha_i^{1/2+eps}, y_j = beta_j^{1/2+eps},
/// c2 = 1 - 2^{-1/2+2/5}.
struct DecayReport {
  std::vector<CellVerdict> cells;
  bool hypothesis_holds = true;        // every cell conclusively within bound
  Verdict norm_condition = Verdict::holds;   // ||x||_{q'} = ||y||_{q'} = 1 (exact)
  Verdict necessary_condition = Verdict::inconclusive;  // c1 >= c2 / (1 + (2 C3 - 1) lambda)
  CenterResult center;
  /// tail / ((lambda^q)^{2/q'} + (lambda^q)^{1+1/q}), reported not bounded.
  Interval tail_ratio;
};

DecayReport decay_check(const DiagonalMeasure& dm, const Params& params);

struct ConcentrationResult {
  std::uint64_t N = 1;
  std::map<std::uint64_t, CenterResult> centers;  // per support prime
  EdgeSet e_star;
  Rational excluded_mass;      // mu(E \ E*)
  Rational excluded_fraction;  // mu(E \ E*) / mu(E)
};

/// k_p from find_center at every support prime, N = prod p^{k_p}, and
/// E* = {(v, w) in E : |nu_p(v/N)| + |nu_p(w/N)| <= 1 for all p}.
ConcentrationResult concentrate(const PairSystem& system, const EdgeSet& edges, const Params& params);

enum class Side { v, w };

const char* to_string(Side side) noexcept;

struct PeelStep {
  std::size_t step = 0;
  std::uint64_t vertex = 0;
  Side side = Side::v;
  Rational mu_edges_before;
  Rational mu_edges_after;
  Rational mu_side_before;  // mu(V') or mu(W') on the removed side
  Rational mu_side_after;
  /// mu(E_new) > mu(E_old) (mu(S_new) / mu(S_old))^{1/q'}.
  Verdict certificate = Verdict::inconclusive;
  bool exact_certificate = true;
};

struct PeelResult {
  EdgeSet edges;
  std::vector<PeelStep> trace;
};

/// Repeatedly removes the vertex violating
///   mu(Gamma(x)) >= (1/q') mu(E) / mu(side)
/// with the smallest ratio mu(Gamma(x)) mu(side) / mu(E) (ties: smaller
/// integer, then v before w) until none is left.
PeelResult peel(const PairSystem& system, const EdgeSet& edges, const Params& params);

struct Property2Failure {
  Side side;
  std::uint64_t vertex;
  Rational neighbourhood_mass;
  Rational required;  // (1/q') mu(E) / mu(side)
};

/// First vertex of E|_V then E|_W breaking the degree inequality, if any.
std::optional<Property2Failure> check_property2(const PairSystem& system, const EdgeSet& edges, const Params& params);

/// Renders the trace as one line per step (step, vertex, side, exact
/// before/after measures, certificate).
std::string format_trace(const std::vector<PeelStep>& trace);

}  // namespace dsq
