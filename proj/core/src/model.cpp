#include "dsq/model.hpp"

#include <algorithm>
#include <set>

namespace dsq {

namespace {

const Rational kZero(0);

template <class Entries>
auto find_entry(const Entries& entries, std::uint64_t n) {
  auto it = std::lower_bound(entries.begin(), entries.end(), n,
                             [](const auto& e, std::uint64_t key) { return e.n.value() < key; });
  return (it != entries.end() && it->n.value() == n) ? it : entries.end();
}

}  // namespace

WeightFunction::WeightFunction(const std::map<std::uint64_t, Rational>& table) {
  entries_.reserve(table.size());
  for (const auto& [n, value] : table) {
    if (n == 0) throw Error(ErrorKind::invalid_parameter, "weight functions live on positive integers");
    if (value <= 0) {
      throw Error(ErrorKind::invalid_parameter,
                  "weight at " + std::to_string(n) + " must be strictly positive (absence means zero)");
    }
    entries_.push_back({Natural(n), value});
    entries_.back().value.canonicalize();
  }
}

Rational WeightFunction::at(std::uint64_t n) const {
  const Entry* e = find(n);
  return e ? e->value : Rational(0);
}

const WeightFunction::Entry* WeightFunction::find(std::uint64_t n) const {
  auto it = find_entry(entries_, n);
  return it == entries_.end() ? nullptr : &*it;
}

std::vector<std::uint64_t> WeightFunction::support() const {
  std::vector<std::uint64_t> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.n.value());
  return out;
}

std::map<std::uint64_t, Rational> WeightFunction::to_map() const {
  std::map<std::uint64_t, Rational> out;
  for (const auto& e : entries_) out.emplace(e.n.value(), e.value);
  return out;
}

bool operator==(const WeightFunction& a, const WeightFunction& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    if (a.entries_[i].n != b.entries_[i].n || a.entries_[i].value != b.entries_[i].value) return false;
  }
  return true;
}

MultiplicativeFunction MultiplicativeFunction::totient() {
  MultiplicativeFunction f;
  f.totient_ = true;
  return f;
}

MultiplicativeFunction MultiplicativeFunction::from_table(Table table) {
  for (auto& [key, value] : table) {
    value.canonicalize();
    if (!is_prime(key.first) || key.second < 1) {
      throw Error(ErrorKind::invalid_parameter, "table keys must be prime powers p^a with a >= 1");
    }
    if (value < 0) throw Error(ErrorKind::invalid_parameter, "multiplicative function values must be >= 0");
  }
  MultiplicativeFunction f;
  f.table_ = std::move(table);
  return f;
}

Rational MultiplicativeFunction::at_prime_power(std::uint64_t p, int a) const {
  if (a == 0) return Rational(1);
  if (totient_) {
    const std::uint64_t lower = checked_pow(p, static_cast<unsigned>(a - 1));
    return to_rational(checked_mul(lower, p) - lower);
  }
  auto it = table_.find({p, a});
  if (it == table_.end()) {
    throw Error(ErrorKind::incomplete_definition,
                "no value for f(" + std::to_string(p) + "^" + std::to_string(a) + ")");
  }
  return it->second;
}

Rational MultiplicativeFunction::divisor_sum_at_prime_power(std::uint64_t p, int a) const {
  Rational sum(0);
  for (int b = 0; b <= a; ++b) sum += at_prime_power(p, b);
  return sum;
}

Rational MultiplicativeFunction::operator()(const Natural& n) const {
  Rational out(1);
  for (const auto& pp : n.factors()) out *= at_prime_power(pp.prime, pp.exponent);
  return out;
}

MultiplicativeVerdict validate_multiplicative(const MultiplicativeFunction& f,
                                              std::span<const PrimePower> prime_powers) {
  MultiplicativeVerdict verdict;
  for (const auto& pp : prime_powers) {
    const Rational sum = f.divisor_sum_at_prime_power(pp.prime, pp.exponent);
    if (sum > to_rational(checked_pow(pp.prime, static_cast<unsigned>(pp.exponent)))) {
      verdict.accepted = false;
      verdict.counterexample = std::make_pair(pp, sum);
      return verdict;
    }
  }
  return verdict;
}

std::vector<PrimePower> prime_powers_of_supports(const WeightFunction& psi, const WeightFunction& theta) {
  std::map<std::uint64_t, int> max_exponent;
  for (const auto* w : {&psi, &theta}) {
    for (const auto& e : w->entries()) {
      for (const auto& pp : e.n.factors()) {
        int& slot = max_exponent[pp.prime];
        slot = std::max(slot, pp.exponent);
      }
    }
  }
  std::vector<PrimePower> out;
  for (const auto& [p, top] : max_exponent) {
    for (int a = 1; a <= top; ++a) out.push_back({p, a});
  }
  return out;
}

EdgeSet::EdgeSet(std::vector<Edge> edges) : edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool EdgeSet::contains(const Edge& e) const { return std::binary_search(edges_.begin(), edges_.end(), e); }

bool EdgeSet::is_subset_of(const EdgeSet& other) const {
  return std::includes(other.edges_.begin(), other.edges_.end(), edges_.begin(), edges_.end());
}

PairSystem::PairSystem(WeightFunction psi, WeightFunction theta, MultiplicativeFunction f, MultiplicativeFunction g,
                       EdgeSet edges)
    : psi_(std::move(psi)), theta_(std::move(theta)), f_(std::move(f)), g_(std::move(g)), edges_(std::move(edges)) {
  for (const auto& [v, w] : edges_) {
    if (!psi_.contains(v) || !theta_.contains(w)) {
      throw Error(ErrorKind::invalid_parameter,
                  "edge (" + std::to_string(v) + "," + std::to_string(w) + ") leaves supp(psi) x supp(theta)");
    }
  }
  mu_v_.reserve(psi_.size());
  for (const auto& e : psi_.entries()) {
    Rational mu = f_(e.n) * e.value / to_rational(e.n.value());
    mass_v_ += mu;
    mu_v_.push_back(std::move(mu));
  }
  mu_w_.reserve(theta_.size());
  for (const auto& e : theta_.entries()) {
    Rational mu = g_(e.n) * e.value / to_rational(e.n.value());
    mass_w_ += mu;
    mu_w_.push_back(std::move(mu));
  }
}

PairSystem PairSystem::with_edges(EdgeSet edges) const {
  PairSystem copy = *this;
  for (const auto& [v, w] : edges) {
    if (!psi_.contains(v) || !theta_.contains(w)) {
      throw Error(ErrorKind::invalid_parameter,
                  "edge (" + std::to_string(v) + "," + std::to_string(w) + ") leaves supp(psi) x supp(theta)");
    }
  }
  copy.edges_ = std::move(edges);
  return copy;
}

const Rational& PairSystem::mu_v(std::uint64_t v) const {
  auto entries = psi_.entries();
  auto it = find_entry(entries, v);
  return it == entries.end() ? kZero : mu_v_[static_cast<std::size_t>(it - entries.begin())];
}

const Rational& PairSystem::mu_w(std::uint64_t w) const {
  auto entries = theta_.entries();
  auto it = find_entry(entries, w);
  return it == entries.end() ? kZero : mu_w_[static_cast<std::size_t>(it - entries.begin())];
}

Rational mu_point(const MultiplicativeFunction& f, const WeightFunction& psi, std::uint64_t v) {
  const auto* e = psi.find(v);
  if (e == nullptr) return Rational(0);
  return f(e->n) * e->value / to_rational(v);
}

Rational mu_set(const MultiplicativeFunction& f, const WeightFunction& psi, std::span<const std::uint64_t> set) {
  Rational sum(0);
  for (std::uint64_t v : std::set<std::uint64_t>(set.begin(), set.end())) sum += mu_point(f, psi, v);
  return sum;
}

Rational mu_pairs(const PairSystem& system, const EdgeSet& edges) {
  // Edges are sorted by v: accumulate each neighbourhood, then scale once.
  Rational total(0);
  Rational row(0);
  auto span = edges.edges();
  for (std::size_t i = 0; i < span.size();) {
    const std::uint64_t v = span[i].first;
    row = 0;
    for (; i < span.size() && span[i].first == v; ++i) row += system.mu_w(span[i].second);
    total += system.mu_v(v) * row;
  }
  return total;
}

Rational mu_set_v(const PairSystem& system, std::span<const std::uint64_t> set) {
  Rational sum(0);
  for (std::uint64_t v : set) sum += system.mu_v(v);
  return sum;
}

Rational mu_set_w(const PairSystem& system, std::span<const std::uint64_t> set) {
  Rational sum(0);
  for (std::uint64_t w : set) sum += system.mu_w(w);
  return sum;
}

}  // namespace dsq
