#include "dsq/compress.hpp"

#include <algorithm>
#include <map>

namespace dsq {

namespace {

Rational prime_power(std::uint64_t p, int e) { return to_rational(checked_pow(p, static_cast<unsigned>(e))); }

IdentityRow equality_row(std::string name, const Rational& lhs, const Rational& rhs) {
  IdentityRow row;
  row.name = std::move(name);
  row.lhs = format_rational(lhs);
  row.rhs = format_rational(rhs);
  row.status = lhs == rhs ? IdentityStatus::holds : IdentityStatus::fails;
  return row;
}

IdentityRow named_row(std::string name) {
  IdentityRow row;
  row.name = std::move(name);
  return row;
}

IdentityRow vacuous_row(std::string name, std::string detail) {
  IdentityRow row;
  row.name = std::move(name);
  row.status = IdentityStatus::vacuous;
  row.detail = std::move(detail);
  return row;
}

}  // namespace

const char* to_string(IdentityStatus status) noexcept {
  switch (status) {
    case IdentityStatus::holds: return "holds";
    case IdentityStatus::fails: return "fails";
    case IdentityStatus::vacuous: return "vacuous";
  }
  return "?";
}

bool SliceReport::ok() const {
  return std::none_of(rows.begin(), rows.end(),
                      [](const IdentityRow& r) { return r.asserted && r.status == IdentityStatus::fails; });
}

const IdentityRow* SliceReport::find(std::string_view name) const {
  for (const auto& row : rows) {
    if (row.name == name) return &row;
  }
  return nullptr;
}

Slice make_slice(const PairSystem& system, std::uint64_t p, int i, int j) {
  if (!is_prime(p)) throw Error(ErrorKind::invalid_parameter, std::to_string(p) + " is not prime");
  if (i < 0 || j < 0) throw Error(ErrorKind::invalid_parameter, "slice indices must be nonnegative");
  const int m = std::min(i, j);
  const std::uint64_t pi = checked_pow(p, static_cast<unsigned>(i));
  const std::uint64_t pj = checked_pow(p, static_cast<unsigned>(j));
  const Rational scale_v = prime_power(p, j - m);
  const Rational scale_w = prime_power(p, i - m);

  Slice out{p, i, j, PairSystem({}, {}, system.f(), system.g()), {}, {}, {}};
  std::map<std::uint64_t, Rational> psi_tilde;
  for (const auto& e : system.psi().entries()) {
    if (e.n.valuation(p) != i) continue;
    out.source_v.push_back(e.n.value());
    psi_tilde[e.n.value() / pi] = scale_v * e.value;
  }
  std::map<std::uint64_t, Rational> theta_tilde;
  for (const auto& e : system.theta().entries()) {
    if (e.n.valuation(p) != j) continue;
    out.source_w.push_back(e.n.value());
    theta_tilde[e.n.value() / pj] = scale_w * e.value;
  }
  std::vector<Edge> cell_edges;
  std::vector<Edge> tilde_edges;
  for (const auto& [v, w] : system.edges()) {
    if (valuation(p, v) != i || valuation(p, w) != j) continue;
    cell_edges.emplace_back(v, w);
    tilde_edges.emplace_back(v / pi, w / pj);
  }
  out.source_edges = EdgeSet(std::move(cell_edges));
  out.tilde = PairSystem(WeightFunction(psi_tilde), WeightFunction(theta_tilde), system.f(), system.g(),
                         EdgeSet(std::move(tilde_edges)));
  return out;
}

SliceReport verify_slice_identities(const PairSystem& source, const Slice& s, const Params& params) {
  SliceReport report{s.p, s.i, s.j, {}};
  const std::uint64_t p = s.p;
  const int m = std::min(s.i, s.j);
  const Rational p_i = prime_power(p, s.i);
  const Rational p_j = prime_power(p, s.j);
  const Rational f_pi = source.f().at_prime_power(p, s.i);
  const Rational g_pj = source.g().at_prime_power(p, s.j);
  const bool off_diagonal = s.i != s.j;
  const bool p_small = p <= params.t;
  const std::uint64_t pi = checked_pow(p, static_cast<unsigned>(s.i));
  const std::uint64_t pj = checked_pow(p, static_cast<unsigned>(s.j));

  // (a) V-measure identity.
  if (f_pi == 0) {
    report.rows.push_back(vacuous_row("a:v-measure", "vacuous: zero multiplier f(p^i)"));
  } else {
    report.rows.push_back(equality_row("a:v-measure", s.tilde.mass_v(),
                                       prime_power(p, s.j - m) * (p_i / f_pi) * mu_set_v(source, s.source_v)));
  }
  // (b) W-measure identity.
  if (g_pj == 0) {
    report.rows.push_back(vacuous_row("b:w-measure", "vacuous: zero multiplier g(p^j)"));
  } else {
    report.rows.push_back(equality_row("b:w-measure", s.tilde.mass_w(),
                                       prime_power(p, s.i - m) * (p_j / g_pj) * mu_set_w(source, s.source_w)));
  }
  // (c) Pair-measure identity.
  if (f_pi == 0 || g_pj == 0) {
    report.rows.push_back(vacuous_row("c:pair-measure", "vacuous: zero multiplier"));
  } else {
    report.rows.push_back(equality_row(
        "c:pair-measure", mu_pairs(s.tilde, s.tilde.edges()),
        (p_i * p_j / (f_pi * g_pj)) * prime_power(p, std::abs(s.i - s.j)) * mu_pairs(source, s.source_edges)));
  }

  // (d) quality transport and (e) omega shift, edge by edge.
  IdentityRow quality = named_row("d:quality-transport");
  IdentityRow omega = named_row("e:omega-shift");
  const int shift = (off_diagonal && p_small) ? 1 : 0;
  for (const auto& [v, w] : s.tilde.edges()) {
    const Rational lhs = d_value(v, w, s.tilde.psi(), s.tilde.theta());
    const Rational rhs = d_value(v * pi, w * pj, source.psi(), source.theta());
    if (quality.status == IdentityStatus::holds && lhs != rhs) {
      quality.status = IdentityStatus::fails;
      quality.lhs = format_rational(lhs);
      quality.rhs = format_rational(rhs);
      quality.witness = Edge{v, w};
    }
    const int left = omega_t(s.tilde.psi().find(v)->n, s.tilde.theta().find(w)->n, params.t);
    const int right = omega_t(source.psi().find(v * pi)->n, source.theta().find(w * pj)->n, params.t) - shift;
    if (omega.status == IdentityStatus::holds && left != right) {
      omega.status = IdentityStatus::fails;
      omega.lhs = std::to_string(left);
      omega.rhs = std::to_string(right);
      omega.witness = Edge{v, w};
    }
  }
  quality.detail = std::to_string(s.tilde.edges().size()) + " edges";
  omega.detail = "shift " + std::to_string(shift);
  report.rows.push_back(std::move(quality));
  report.rows.push_back(std::move(omega));

  // (f) prime set loses p.
  {
    IdentityRow row = named_row("f:prime-set");
    const auto before = support_primes(source.psi(), source.theta());
    const auto after = support_primes(s.tilde.psi(), s.tilde.theta());
    for (std::uint64_t q : after) {
      if (q == p || !std::binary_search(before.begin(), before.end(), q)) {
        row.status = IdentityStatus::fails;
        row.detail = "prime " + std::to_string(q) + " not in P \\ {p}";
        break;
      }
    }
    row.lhs = std::to_string(after.size()) + " primes";
    row.rhs = std::to_string(before.size()) + " primes";
    report.rows.push_back(std::move(row));
  }

  // p-free supports.
  {
    IdentityRow row = named_row("p-free-supports");
    for (const auto* wf : {&s.tilde.psi(), &s.tilde.theta()}) {
      for (const auto& e : wf->entries()) {
        if (e.n.value() % p == 0) {
          row.status = IdentityStatus::fails;
          row.detail = std::to_string(e.n.value()) + " divisible by p";
        }
      }
    }
    report.rows.push_back(std::move(row));
  }

  // Containment in the shifted edge set, when the source cell sits inside
  // E^{t,K}.
  const bool source_inside = std::all_of(s.source_edges.begin(), s.source_edges.end(), [&](const Edge& e) {
    return is_quality_edge(*source.psi().find(e.first), *source.theta().find(e.second), params.t, params.K);
  });
  auto containment = [&](std::string name, const Rational& K_shifted, bool asserted) {
    if (!source_inside) {
      IdentityRow row = vacuous_row(std::move(name), "vacuous: source edges not inside E^{t,K}");
      row.asserted = asserted;
      return row;
    }
    IdentityRow row = named_row(std::move(name));
    row.asserted = asserted;
    row.rhs = "K = " + format_rational(K_shifted);
    for (const auto& [v, w] : s.tilde.edges()) {
      if (!is_quality_edge(*s.tilde.psi().find(v), *s.tilde.theta().find(w), params.t, K_shifted)) {
        row.status = IdentityStatus::fails;
        row.witness = Edge{v, w};
        break;
      }
    }
    return row;
  };
  report.rows.push_back(containment("containment", params.K - shift, true));
  report.rows.push_back(containment("containment-unconditional-shift", params.K - (off_diagonal ? 1 : 0), false));
  return report;
}

}  // namespace dsq
