#include "dsq/diagonal.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace dsq {

namespace {

// Exponents with a denominator above this go through intervals instead of
// exact b-th powers.
constexpr unsigned long kExactPowerDenominatorLimit = 256;

Rational sum_values(const auto& map) {
  Rational s(0);
  for (const auto& [key, value] : map) s += value;
  return s;
}

Verdict compare_intervals_ge(const Interval& a, const Interval& b) {
  if (mpfr_cmp(a.lo(), b.hi()) >= 0) return Verdict::holds;
  if (mpfr_cmp(a.hi(), b.lo()) < 0) return Verdict::violated;
  return Verdict::inconclusive;
}

Expr c1_expr(const DiagonalMeasure& dm, const Params& params) {
  if (dm.p > params.p0) return Expr::constant(Rational(1));
  return (Expr::constant(Rational(100)) * Expr::exp(Expr::constant(params.C))).pow(Expr::constant(Rational(-1)));
}

}  // namespace

void DiagonalMeasure::validate() const {
  if (total <= 0) throw Error(ErrorKind::degenerate_measure, "diagonal measure needs mu(E) > 0");
  for (const auto* map : {&alpha, &beta}) {
    for (const auto& [i, value] : *map) {
      if (value <= 0) throw Error(ErrorKind::invalid_parameter, "marginal entries must be positive");
    }
  }
  for (const auto& [cell, value] : cells) {
    if (value <= 0) throw Error(ErrorKind::invalid_parameter, "cell entries must be positive");
  }
  if (sum_values(cells) != 1 || sum_values(alpha) != 1 || sum_values(beta) != 1) {
    throw Error(ErrorKind::invalid_parameter, "cells and marginals must each sum to 1");
  }
}

Rational DiagonalMeasure::cell(int i, int j) const {
  auto it = cells.find({i, j});
  return it == cells.end() ? Rational(0) : it->second;
}

Rational DiagonalMeasure::alpha_at(int i) const {
  auto it = alpha.find(i);
  return it == alpha.end() ? Rational(0) : it->second;
}

Rational DiagonalMeasure::beta_at(int j) const {
  auto it = beta.find(j);
  return it == beta.end() ? Rational(0) : it->second;
}

DiagonalMeasure diagonal_measure(const PairSystem& system, const EdgeSet& edges, std::uint64_t p) {
  if (!is_prime(p)) throw Error(ErrorKind::invalid_parameter, std::to_string(p) + " is not prime");
  DiagonalMeasure dm;
  dm.p = p;
  dm.total = mu_pairs(system, edges);
  if (dm.total == 0) throw Error(ErrorKind::degenerate_measure, "mu(E) = 0, the diagonal measure is undefined");

  std::map<Cell, Rational> mass;
  std::map<int, Rational> row;
  auto span = edges.edges();
  for (std::size_t k = 0; k < span.size();) {
    const std::uint64_t v = span[k].first;
    row.clear();
    for (; k < span.size() && span[k].first == v; ++k) {
      const auto* we = system.theta().find(span[k].second);
      row[we->n.valuation(p)] += system.mu_w(span[k].second);
    }
    const int i = system.psi().find(v)->n.valuation(p);
    const Rational& mu = system.mu_v(v);
    for (const auto& [j, sum] : row) mass[{i, j}] += mu * sum;
  }
  for (auto& [cell, value] : mass) {
    if (value != 0) dm.cells.emplace(cell, value / dm.total);
  }

  std::map<int, Rational> v_mass;
  for (const auto& e : system.psi().entries()) v_mass[e.n.valuation(p)] += system.mu_v(e.n.value());
  std::map<int, Rational> w_mass;
  for (const auto& e : system.theta().entries()) w_mass[e.n.valuation(p)] += system.mu_w(e.n.value());
  for (const auto& [i, value] : v_mass) {
    if (value != 0) dm.alpha.emplace(i, value / system.mass_v());
  }
  for (const auto& [j, value] : w_mass) {
    if (value != 0) dm.beta.emplace(j, value / system.mass_w());
  }
  return dm;
}

std::vector<CellVerdict> bilinear_check(const DiagonalMeasure& dm, const Params& params) {
  params.validate();
  const Rational inv_q = Rational(1, 2) - params.epsilon;
  const Expr c1 = c1_expr(dm, params);
  std::vector<CellVerdict> out;
  for (const auto& [cell, mass] : dm.cells) {
    const auto [i, j] = cell;
    const Rational ab = dm.alpha_at(i) * dm.beta_at(j);
    auto bound_at = [&](unsigned bits) {
      if (ab == 0) return Interval::exact(Rational(0), bits);
      const PowerFactor factors[] = {
          {c1, Expr::constant(Rational(1))},
          {Expr::constant(to_rational(dm.p)), Expr::constant(-inv_q * std::abs(i - j))},
          {Expr::constant(ab), Expr::constant(params.inverse_q_prime())},
          {Expr::exp(Expr::constant(params.C)), Expr::constant(i != j ? params.inverse_q_prime() : Rational(0))},
      };
      return interval_eval(Rational(1), factors, bits);
    };
    auto result = certify(mass, bound_at, compare_le, params.precision_bits,
                          std::max(params.precision_cap, params.precision_bits));
    out.push_back({cell, mass, std::move(result.rhs), result.verdict});
  }
  return out;
}

Rational tail_mass(const DiagonalMeasure& dm, int k) {
  Rational tail(0);
  for (const auto& [cell, mass] : dm.cells) {
    if (std::abs(cell.first - k) + std::abs(cell.second - k) >= 2) tail += mass;
  }
  return tail;
}

CenterResult find_center(const DiagonalMeasure& dm) {
  if (dm.cells.empty()) throw Error(ErrorKind::degenerate_measure, "empty diagonal measure");
  int lo = dm.cells.begin()->first.first;
  int hi = lo;
  for (const auto& [cell, mass] : dm.cells) {
    lo = std::min({lo, cell.first, cell.second});
    hi = std::max({hi, cell.first, cell.second});
  }
  CenterResult best{lo, tail_mass(dm, lo)};
  for (int k = lo + 1; k <= hi; ++k) {
    Rational tail = tail_mass(dm, k);
    if (tail < best.tail_mass) best = {k, std::move(tail)};
  }
  for (int k : {lo - 1, hi + 1}) {
    if (tail_mass(dm, k) < best.tail_mass) {
      throw Error(ErrorKind::invalid_parameter, "center outside the support hull beats the hull scan");
    }
  }
  return best;
}

DecayReport decay_check(const DiagonalMeasure& dm, const Params& params) {
  params.validate();
  dm.validate();
  DecayReport report;
  const Rational half_plus = params.inverse_q_prime();
  const Expr c1 = c1_expr(dm, params);
  const Expr p = Expr::constant(to_rational(dm.p));
  const Expr lambda = p.pow(Expr::constant(params.epsilon - Rational(1, 2)));
  const Expr c3 = Expr::exp(Expr::constant(params.C));
  const unsigned cap = std::max(params.precision_cap, params.precision_bits);

  for (const auto& [cell, mass] : dm.cells) {
    const auto [i, j] = cell;
    const Rational ab = dm.alpha_at(i) * dm.beta_at(j);
    auto bound_at = [&](unsigned bits) {
      if (ab == 0) return Interval::exact(Rational(0), bits);
      Expr bound = c1 * Expr::constant(ab).pow(Expr::constant(half_plus));
      if (i != j) bound = bound * c3 * lambda.pow(Expr::constant(Rational(std::abs(i - j))));
      return bound.eval(bits);
    };
    auto result = certify(mass, bound_at, compare_le, params.precision_bits, cap);
    if (result.verdict != Verdict::holds) report.hypothesis_holds = false;
    report.cells.push_back({cell, mass, std::move(result.rhs), result.verdict});
  }

  // ||x||_{q'}^{q'} = sum alpha_i, exactly.
  report.norm_condition = (sum_values(dm.alpha) == 1 && sum_values(dm.beta) == 1) ? Verdict::holds : Verdict::violated;

  const Expr c2 = Expr::constant(Rational(1)) -
                  Expr::constant(Rational(2)).pow(Expr::constant(Rational(-1, 2) + Rational(2, 5)));
  const Expr needed =
      c2 / (Expr::constant(Rational(1)) + (Expr::constant(Rational(2)) * c3 - Expr::constant(Rational(1))) * lambda);
  for (unsigned bits = params.precision_bits;; bits *= 2) {
    report.necessary_condition = compare_intervals_ge(c1.eval(bits), needed.eval(bits));
    if (report.necessary_condition != Verdict::inconclusive || bits >= cap) break;
  }

  report.center = find_center(dm);
  const Rational q = params.q();
  const Expr lambda_q = lambda.pow(Expr::constant(q));
  const Expr denominator = lambda_q.pow(Expr::constant(Rational(2) / params.q_prime())) +
                           lambda_q.pow(Expr::constant(Rational(1) + Rational(1) / q));
  report.tail_ratio = (Expr::constant(report.center.tail_mass) / denominator).eval(params.precision_bits);
  return report;
}

ConcentrationResult concentrate(const PairSystem& system, const EdgeSet& edges, const Params& params) {
  ConcentrationResult out;
  const Rational total = mu_pairs(system, edges);
  if (total == 0) throw Error(ErrorKind::degenerate_measure, "mu(E) = 0, nothing to concentrate");
  (void)params;
  const auto primes = support_primes(system.psi(), system.theta());
  for (std::uint64_t p : primes) {
    CenterResult center = find_center(diagonal_measure(system, edges, p));
    out.N = checked_mul(out.N, checked_pow(p, static_cast<unsigned>(center.k)));
    out.centers.emplace(p, std::move(center));
  }
  std::vector<Edge> kept;
  std::vector<Edge> dropped;
  for (const auto& edge : edges) {
    const Natural& v = system.psi().find(edge.first)->n;
    const Natural& w = system.theta().find(edge.second)->n;
    bool structured = true;
    for (const auto& [p, center] : out.centers) {
      if (std::abs(v.valuation(p) - center.k) + std::abs(w.valuation(p) - center.k) > 1) {
        structured = false;
        break;
      }
    }
    (structured ? kept : dropped).push_back(edge);
  }
  out.e_star = EdgeSet(std::move(kept));
  out.excluded_mass = mu_pairs(system, EdgeSet(std::move(dropped)));
  out.excluded_fraction = out.excluded_mass / total;
  return out;
}

const char* to_string(Side side) noexcept { return side == Side::v ? "v" : "w"; }

namespace {

struct PeelState {
  std::vector<std::uint64_t> v_ids;
  std::vector<std::uint64_t> w_ids;
  std::vector<Rational> mu_v;
  std::vector<Rational> mu_w;
  std::vector<std::vector<std::size_t>> adj_v;
  std::vector<std::vector<std::size_t>> adj_w;
  std::vector<Rational> gamma_v;  // mu_theta(Gamma(v)) over alive w
  std::vector<Rational> gamma_w;
  std::vector<std::size_t> deg_v;
  std::vector<std::size_t> deg_w;
  std::vector<bool> alive_v;
  std::vector<bool> alive_w;
  Rational mu_edges;
  Rational mass_v;
  Rational mass_w;
};

PeelState build_state(const PairSystem& system, const EdgeSet& edges) {
  PeelState s;
  const Projection proj = restrict_edges(edges);
  s.v_ids = proj.v_side;
  s.w_ids = proj.w_side;
  std::unordered_map<std::uint64_t, std::size_t> w_index;
  for (std::size_t k = 0; k < s.w_ids.size(); ++k) w_index.emplace(s.w_ids[k], k);
  for (std::uint64_t v : s.v_ids) s.mu_v.push_back(system.mu_v(v));
  for (std::uint64_t w : s.w_ids) s.mu_w.push_back(system.mu_w(w));
  s.adj_v.resize(s.v_ids.size());
  s.adj_w.resize(s.w_ids.size());
  std::size_t vi = 0;
  for (const auto& [v, w] : edges) {
    while (s.v_ids[vi] != v) ++vi;
    const std::size_t wi = w_index.at(w);
    s.adj_v[vi].push_back(wi);
    s.adj_w[wi].push_back(vi);
  }
  s.gamma_v.assign(s.v_ids.size(), Rational(0));
  s.gamma_w.assign(s.w_ids.size(), Rational(0));
  for (std::size_t a = 0; a < s.v_ids.size(); ++a) {
    for (std::size_t b : s.adj_v[a]) {
      s.gamma_v[a] += s.mu_w[b];
      s.gamma_w[b] += s.mu_v[a];
    }
    s.mu_edges += s.mu_v[a] * s.gamma_v[a];
    s.mass_v += s.mu_v[a];
    s.deg_v.push_back(s.adj_v[a].size());
  }
  for (std::size_t b = 0; b < s.w_ids.size(); ++b) {
    s.mass_w += s.mu_w[b];
    s.deg_w.push_back(s.adj_w[b].size());
  }
  s.alive_v.assign(s.v_ids.size(), true);
  s.alive_w.assign(s.w_ids.size(), true);
  return s;
}

// Removes one vertex and every edge through it; neighbours left without
// edges drop out of their side.
void remove_vertex(PeelState& s, Side side, std::size_t index) {
  if (side == Side::v) {
    s.alive_v[index] = false;
    s.mass_v -= s.mu_v[index];
    for (std::size_t b : s.adj_v[index]) {
      if (!s.alive_w[b]) continue;
      s.mu_edges -= s.mu_v[index] * s.mu_w[b];
      s.gamma_w[b] -= s.mu_v[index];
      if (--s.deg_w[b] == 0) {
        s.alive_w[b] = false;
        s.mass_w -= s.mu_w[b];
      }
    }
  } else {
    s.alive_w[index] = false;
    s.mass_w -= s.mu_w[index];
    for (std::size_t a : s.adj_w[index]) {
      if (!s.alive_v[a]) continue;
      s.mu_edges -= s.mu_v[a] * s.mu_w[index];
      s.gamma_v[a] -= s.mu_w[index];
      if (--s.deg_v[a] == 0) {
        s.alive_v[a] = false;
        s.mass_v -= s.mu_v[a];
      }
    }
  }
}

Verdict certify_step(const Rational& after, const Rational& before, const Rational& side_after,
                     const Rational& side_before, const Params& params, bool& exact) {
  const Rational exponent = params.inverse_q_prime();
  const Rational ratio = side_after / side_before;
  if (exponent.get_den() <= kExactPowerDenominatorLimit) {
    exact = true;
    return exceeds_scaled_rational_power(after, before, ratio, exponent) ? Verdict::holds : Verdict::violated;
  }
  exact = false;
  auto rhs_at = [&](unsigned bits) {
    if (ratio == 0) return Interval::exact(Rational(0), bits);
    const PowerFactor factors[] = {{Expr::constant(ratio), Expr::constant(exponent)}};
    return interval_eval(before, factors, bits);
  };
  return certify(after, rhs_at, compare_gt, params.precision_bits,
                 std::max(params.precision_cap, params.precision_bits))
      .verdict;
}

}  // namespace

PeelResult peel(const PairSystem& system, const EdgeSet& edges, const Params& params) {
  PeelResult result;
  if (edges.empty()) return result;
  PeelState s = build_state(system, edges);
  const Rational inv_qp = params.inverse_q_prime();

  for (std::size_t step = 1;; ++step) {
    if (s.mu_edges == 0) break;
    const Rational required = inv_qp * s.mu_edges;  // compared against gamma * mass(side)
    std::optional<std::pair<Side, std::size_t>> pick;
    Rational pick_key;
    std::uint64_t pick_id = 0;
    auto consider = [&](Side side, std::size_t index, std::uint64_t id, const Rational& key) {
      if (key >= required) return;
      if (!pick || key < pick_key || (key == pick_key && id < pick_id)) {
        pick = {side, index};
        pick_key = key;
        pick_id = id;
      }
    };
    for (std::size_t a = 0; a < s.v_ids.size(); ++a) {
      if (s.alive_v[a]) consider(Side::v, a, s.v_ids[a], s.gamma_v[a] * s.mass_v);
    }
    for (std::size_t b = 0; b < s.w_ids.size(); ++b) {
      if (s.alive_w[b]) consider(Side::w, b, s.w_ids[b], s.gamma_w[b] * s.mass_w);
    }
    if (!pick) break;

    PeelStep record;
    record.step = step;
    record.side = pick->first;
    record.vertex = pick_id;
    record.mu_edges_before = s.mu_edges;
    record.mu_side_before = pick->first == Side::v ? s.mass_v : s.mass_w;
    remove_vertex(s, pick->first, pick->second);
    record.mu_edges_after = s.mu_edges;
    record.mu_side_after = pick->first == Side::v ? s.mass_v : s.mass_w;
    record.certificate = certify_step(record.mu_edges_after, record.mu_edges_before, record.mu_side_after,
                                      record.mu_side_before, params, record.exact_certificate);
    result.trace.push_back(std::move(record));
  }

  std::vector<Edge> kept;
  for (const auto& edge : edges) {
    const auto vi = static_cast<std::size_t>(std::lower_bound(s.v_ids.begin(), s.v_ids.end(), edge.first) - s.v_ids.begin());
    const auto wi = static_cast<std::size_t>(std::lower_bound(s.w_ids.begin(), s.w_ids.end(), edge.second) - s.w_ids.begin());
    if (s.alive_v[vi] && s.alive_w[wi]) kept.push_back(edge);
  }
  result.edges = EdgeSet(std::move(kept));
  return result;
}

std::optional<Property2Failure> check_property2(const PairSystem& system, const EdgeSet& edges,
                                                const Params& params) {
  if (edges.empty()) return std::nullopt;
  const PeelState s = build_state(system, edges);
  const Rational inv_qp = params.inverse_q_prime();
  for (std::size_t a = 0; a < s.v_ids.size(); ++a) {
    if (s.gamma_v[a] * s.mass_v < inv_qp * s.mu_edges) {
      return Property2Failure{Side::v, s.v_ids[a], s.gamma_v[a], inv_qp * s.mu_edges / s.mass_v};
    }
  }
  for (std::size_t b = 0; b < s.w_ids.size(); ++b) {
    if (s.gamma_w[b] * s.mass_w < inv_qp * s.mu_edges) {
      return Property2Failure{Side::w, s.w_ids[b], s.gamma_w[b], inv_qp * s.mu_edges / s.mass_w};
    }
  }
  return std::nullopt;
}

std::string format_trace(const std::vector<PeelStep>& trace) {
  std::ostringstream out;
  out << "step,vertex,side,mu_edges_before,mu_edges_after,mu_side_before,mu_side_after,certificate\n";
  for (const auto& s : trace) {
    out << s.step << ',' << s.vertex << ',' << to_string(s.side) << ',' << format_rational(s.mu_edges_before) << ','
        << format_rational(s.mu_edges_after) << ',' << format_rational(s.mu_side_before) << ','
        << format_rational(s.mu_side_after) << ',' << to_string(s.certificate) << '\n';
  }
  return out.str();
}

}  // namespace dsq
