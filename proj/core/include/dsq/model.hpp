#pragma once

// Weighted pair systems and their measures.
//
//   mu_psi^f(v)        = f(v) psi(v) / v
//   mu_psi^f(S)        = sum over v in S
//   mu_{psi,theta}(E)  = sum over (v, w) in E of mu_psi^f(v) mu_theta^g(w)
//
// All values are exact rationals.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dsq/arith.hpp"

namespace dsq {

/// Finitely supported map from positive integers to positive rationals.
/// Zero is never stored: absence from the table means weight zero, so the
/// key set is exactly the support.
class WeightFunction {
 public:
  struct Entry {
    Natural n;
    Rational value;
  };

  WeightFunction() = default;
  /// Throws invalid-parameter on a zero or negative value or a zero key.
  explicit WeightFunction(const std::map<std::uint64_t, Rational>& table);

  /// Value at n; zero off the support.
  Rational at(std::uint64_t n) const;
  const Entry* find(std::uint64_t n) const;
  bool contains(std::uint64_t n) const { return find(n) != nullptr; }

  std::span<const Entry> entries() const noexcept { return entries_; }
  std::vector<std::uint64_t> support() const;
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  std::map<std::uint64_t, Rational> to_map() const;

  friend bool operator==(const WeightFunction& a, const WeightFunction& b);

 private:
  std::vector<Entry> entries_;  // sorted by n
};

/// Multiplicative function given on prime powers, f(1) = 1. Either the Euler
/// totient or an explicit (p, a) -> value table.
class MultiplicativeFunction {
 public:
  using Table = std::map<std::pair<std::uint64_t, int>, Rational>;

  static MultiplicativeFunction totient();
  static MultiplicativeFunction from_table(Table table);

  bool is_totient() const noexcept { return totient_; }
  const Table& table() const noexcept { return table_; }

  /// f(p^a) for a >= 1; f(p^0) = 1. Throws incomplete-definition when the
  /// table lacks the entry.
  Rational at_prime_power(std::uint64_t p, int a) const;
  /// (1 * f)(p^a) = sum_{b <= a} f(p^b).
  Rational divisor_sum_at_prime_power(std::uint64_t p, int a) const;

  Rational operator()(const Natural& n) const;
  Rational operator()(std::uint64_t n) const { return (*this)(Natural(n)); }

  friend bool operator==(const MultiplicativeFunction& a, const MultiplicativeFunction& b) = default;

 private:
  bool totient_ = false;
  Table table_;
};

struct MultiplicativeVerdict {
  bool accepted = true;
  /// First prime power with (1 * f)(p^a) > p^a, with the offending sum.
  std::optional<std::pair<PrimePower, Rational>> counterexample;
};

/// Accepts iff (1 * f)(p^a) <= p^a for every listed prime power. Missing
/// table entries raise incomplete-definition.
MultiplicativeVerdict validate_multiplicative(const MultiplicativeFunction& f, std::span<const PrimePower> prime_powers);

/// Every (p, a) with p^a dividing some element of the supports, for a in
/// 1..nu_p.
std::vector<PrimePower> prime_powers_of_supports(const WeightFunction& psi, const WeightFunction& theta);

using Edge = std::pair<std::uint64_t, std::uint64_t>;

/// Sorted, duplicate-free set of pairs (v, w).
class EdgeSet {
 public:
  EdgeSet() = default;
  /// Sorts and deduplicates.
  explicit EdgeSet(std::vector<Edge> edges);

  std::span<const Edge> edges() const noexcept { return edges_; }
  auto begin() const noexcept { return edges_.begin(); }
  auto end() const noexcept { return edges_.end(); }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }
  bool contains(const Edge& e) const;
  bool is_subset_of(const EdgeSet& other) const;

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  std::vector<Edge> edges_;
};

/// (psi, theta, f, g, edges) with every edge inside supp(psi) x supp(theta).
class PairSystem {
 public:
  PairSystem(WeightFunction psi, WeightFunction theta, MultiplicativeFunction f, MultiplicativeFunction g,
             EdgeSet edges = {});

  const WeightFunction& psi() const noexcept { return psi_; }
  const WeightFunction& theta() const noexcept { return theta_; }
  const MultiplicativeFunction& f() const noexcept { return f_; }
  const MultiplicativeFunction& g() const noexcept { return g_; }
  const EdgeSet& edges() const noexcept { return edges_; }

  PairSystem with_edges(EdgeSet edges) const;

  /// mu_psi^f(v), cached per support element; zero off the support.
  const Rational& mu_v(std::uint64_t v) const;
  const Rational& mu_w(std::uint64_t w) const;
  /// mu_psi^f(V) and mu_theta^g(W) over the full supports.
  const Rational& mass_v() const noexcept { return mass_v_; }
  const Rational& mass_w() const noexcept { return mass_w_; }

 private:
  WeightFunction psi_;
  WeightFunction theta_;
  MultiplicativeFunction f_;
  MultiplicativeFunction g_;
  EdgeSet edges_;
  std::vector<Rational> mu_v_;  // aligned with psi_.entries()
  std::vector<Rational> mu_w_;
  Rational mass_v_;
  Rational mass_w_;
};

Rational mu_point(const MultiplicativeFunction& f, const WeightFunction& psi, std::uint64_t v);
Rational mu_set(const MultiplicativeFunction& f, const WeightFunction& psi, std::span<const std::uint64_t> set);
Rational mu_pairs(const PairSystem& system, const EdgeSet& edges);

/// Vertex-side measures through the system's cache.
Rational mu_set_v(const PairSystem& system, std::span<const std::uint64_t> set);
Rational mu_set_w(const PairSystem& system, std::span<const std::uint64_t> set);

}  // namespace dsq
