#include "dsq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "dsq/compress.hpp"
#include "dsq/diagonal.hpp"
#include "dsq/resolution.hpp"
#include "json.hpp"

namespace dsq {

using nlohmann::json;

namespace {

std::vector<Rational> rationals(std::initializer_list<const char*> items) {
  std::vector<Rational> out;
  for (const char* s : items) out.push_back(parse_rational(s));
  return out;
}

Rational rational_field(const json& value) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) return Rational(value.get<long>());
  throw Error(ErrorKind::parse_error, "expected a rational string");
}

std::vector<Rational> rational_list(const json& node) {
  std::vector<Rational> out;
  for (const auto& item : node) out.push_back(rational_field(item));
  return out;
}

json rational_list_json(const std::vector<Rational>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(format_rational(v));
  return out;
}

std::vector<std::uint64_t> draw_support(Rng& rng, const GeneratorConfig& config,
                                        const std::vector<std::uint64_t>& pool) {
  const std::size_t target = config.support_max == 0 ? 0 : rng.between(config.support_min, config.support_max);
  std::set<std::uint64_t> support;
  const std::size_t attempts = 50 * target + 50;
  for (std::size_t k = 0; k < attempts && support.size() < target; ++k) {
    const auto factors = rng.between(0, static_cast<std::uint64_t>(config.max_prime_factors));
    std::uint64_t n = 1;
    bool fits = true;
    for (std::uint64_t f = 0; f < factors && fits && !pool.empty(); ++f) {
      const std::uint64_t p = pool[rng.below(pool.size())];
      const auto e = static_cast<unsigned>(rng.between(1, static_cast<std::uint64_t>(config.max_exponent)));
      for (unsigned a = 0; a < e; ++a) {
        if (n > config.value_cap / p) {
          fits = false;
          break;
        }
        n *= p;
      }
    }
    if (fits) support.insert(n);
  }
  return {support.begin(), support.end()};
}

Rational draw_unit(Rng& rng, std::uint64_t bound) {
  return make_ratio(rng.between(1, bound), bound);
}

// u * min over the sampled opposite vertices of gcd(n, m) / m.
WeightFunction capped_weights(Rng& rng, const std::vector<std::uint64_t>& support,
                              const std::vector<std::uint64_t>& opposite, const GeneratorConfig& config) {
  std::map<std::uint64_t, Rational> table;
  for (std::uint64_t n : support) {
    Rational cap(1);
    for (std::uint64_t m : opposite) {
      if (!rng.chance(config.density)) continue;
      const Rational ratio = make_ratio(gcd(n, m), m);
      if (ratio < cap) cap = ratio;
    }
    table.emplace(n, draw_unit(rng, config.value_numerator_bound) * cap);
  }
  return WeightFunction(table);
}

MultiplicativeFunction random_multiplicative(Rng& rng, const WeightFunction& psi, const WeightFunction& theta,
                                             std::uint64_t bound) {
  std::map<std::uint64_t, int> top;
  for (const auto& pp : prime_powers_of_supports(psi, theta)) top[pp.prime] = std::max(top[pp.prime], pp.exponent);
  MultiplicativeFunction::Table table;
  for (const auto& [p, a_max] : top) {
    Rational partial(1);  // (1 * f)(p^{a-1})
    for (int a = 1; a <= a_max; ++a) {
      const Rational room = to_rational(checked_pow(p, static_cast<unsigned>(a))) - partial;
      const Rational value = make_ratio(rng.between(0, bound), bound) * room;
      partial += value;
      table[{p, a}] = value;
    }
  }
  return MultiplicativeFunction::from_table(std::move(table));
}

template <class T>
const T& pick(Rng& rng, const std::vector<T>& values, const T& fallback) {
  return values.empty() ? fallback : values[rng.below(values.size())];
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string hex(std::uint64_t x) {
  std::ostringstream out;
  out << std::hex << x;
  return out.str();
}

bool check_slices(Rng& rng, const PairSystem& system, const Params& params) {
  const auto primes = support_primes(system.psi(), system.theta());
  if (primes.empty()) return true;
  const auto edges = system.edges().edges();
  for (int round = 0; round < 3; ++round) {
    std::uint64_t p = 0;
    int i = 0;
    int j = 0;
    if (!edges.empty() && rng.below(2) == 0) {
      const Edge& e = edges[rng.below(edges.size())];
      p = primes[rng.below(primes.size())];
      i = valuation(p, e.first);
      j = valuation(p, e.second);
    } else {
      p = primes[rng.below(primes.size())];
      const auto& ve = system.psi().entries()[rng.below(system.psi().size())];
      const auto& we = system.theta().entries()[rng.below(system.theta().size())];
      i = ve.n.valuation(p);
      j = we.n.valuation(p);
    }
    const Slice slice = make_slice(system, p, i, j);
    if (!verify_slice_identities(system, slice, params).ok()) return false;
  }
  return true;
}

}  // namespace

ParamGrid ParamGrid::campaign_default() {
  return {rationals({"1/10", "1/4", "2/5"}), rationals({"1/2", "1"}), rationals({"1", "10", "100"}),
          rationals({"0", "1", "2", "4"})};
}

GeneratorConfig GeneratorConfig::totient_preset(GeneratorConfig base) {
  base.symmetric = true;
  base.random_multiplicative = false;
  base.halve_epsilon = true;
  return base;
}

GeneratorConfig GeneratorConfig::campaign_default(std::uint64_t seed) {
  GeneratorConfig config;
  config.seed = seed;
  config.support_min = 1;
  config.support_max = 100;
  config.prime_pool_bound = 50;
  config.params.p0 = 100;
  config.grid = ParamGrid::campaign_default();
  return config;
}

GeneratorConfig parse_generator_config(std::string_view json_text) {
  try {
    const json doc = json::parse(json_text);
    GeneratorConfig config;
    const std::string preset = doc.value("preset", std::string());
    if (!preset.empty() && preset != "campaign" && preset != "totient") {
      throw Error(ErrorKind::parse_error, "unknown preset '" + preset + "'");
    }
    if (preset == "campaign") config = GeneratorConfig::campaign_default(config.seed);
    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("support_min")) config.support_min = doc["support_min"].get<std::size_t>();
    if (doc.contains("support_max")) config.support_max = doc["support_max"].get<std::size_t>();
    if (doc.contains("value_numerator_bound")) config.value_numerator_bound = doc["value_numerator_bound"].get<std::uint64_t>();
    if (doc.contains("prime_pool_bound")) config.prime_pool_bound = doc["prime_pool_bound"].get<std::uint64_t>();
    if (doc.contains("max_exponent")) config.max_exponent = doc["max_exponent"].get<int>();
    if (doc.contains("max_prime_factors")) config.max_prime_factors = doc["max_prime_factors"].get<int>();
    if (doc.contains("value_cap")) config.value_cap = doc["value_cap"].get<std::uint64_t>();
    if (doc.contains("density")) config.density = rational_field(doc["density"]);
    if (doc.contains("symmetric")) config.symmetric = doc["symmetric"].get<bool>();
    if (doc.contains("random_multiplicative")) config.random_multiplicative = doc["random_multiplicative"].get<bool>();
    if (doc.contains("halve_epsilon")) config.halve_epsilon = doc["halve_epsilon"].get<bool>();
    if (doc.contains("params")) config.params = parse_params(doc["params"].dump());
    if (doc.contains("grid")) {
      const json& g = doc["grid"];
      config.grid = {};
      if (g.contains("epsilon")) config.grid.epsilon = rational_list(g["epsilon"]);
      if (g.contains("C")) config.grid.C = rational_list(g["C"]);
      if (g.contains("t")) config.grid.t = rational_list(g["t"]);
      if (g.contains("K")) config.grid.K = rational_list(g["K"]);
    }
    if (preset == "totient") config = GeneratorConfig::totient_preset(config);
    if (config.support_min > config.support_max) config.support_min = config.support_max;
    if (config.value_numerator_bound == 0 || config.max_exponent < 1 || config.max_prime_factors < 0) {
      throw Error(ErrorKind::invalid_parameter, "generator bounds must be positive");
    }
    if (config.density < 0 || config.density > 1) throw Error(ErrorKind::invalid_parameter, "density must lie in [0, 1]");
    return config;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, e.what());
  }
}

std::string serialize_generator_config(const GeneratorConfig& config) {
  json doc{{"seed", config.seed},
           {"support_min", config.support_min},
           {"support_max", config.support_max},
           {"value_numerator_bound", config.value_numerator_bound},
           {"prime_pool_bound", config.prime_pool_bound},
           {"max_exponent", config.max_exponent},
           {"max_prime_factors", config.max_prime_factors},
           {"value_cap", config.value_cap},
           {"density", format_rational(config.density)},
           {"symmetric", config.symmetric},
           {"random_multiplicative", config.random_multiplicative},
           {"halve_epsilon", config.halve_epsilon},
           {"params", json::parse(serialize_params(config.params))},
           {"grid",
            {{"epsilon", rational_list_json(config.grid.epsilon)},
             {"C", rational_list_json(config.grid.C)},
             {"t", rational_list_json(config.grid.t)},
             {"K", rational_list_json(config.grid.K)}}}};
  return doc.dump(2) + "\n";
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_parameter, "empty range");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % n;
  }
}

bool Rng::chance(const Rational& p) {
  if (p >= 1) return true;
  if (p <= 0) return false;
  // Compare a uniform draw in [0, den) against num.
  const Integer& den = p.get_den();
  const Integer& num = p.get_num();
  if (den.fits_ulong_p()) return below(den.get_ui()) < num.get_ui();
  throw Error(ErrorKind::resource_limit, "probability denominator too large");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Instance generate_instance(const GeneratorConfig& config) {
  Rng rng(config.seed);
  Params params = config.params;
  params.epsilon = pick(rng, config.grid.epsilon, params.epsilon);
  params.C = pick(rng, config.grid.C, params.C);
  params.t = pick(rng, config.grid.t, params.t);
  params.K = pick(rng, config.grid.K, params.K);
  if (config.halve_epsilon) params.epsilon /= 2;
  params.validate();

  const std::vector<std::uint64_t> pool = primes_upto(std::max<std::uint64_t>(config.prime_pool_bound, 1));
  const std::vector<std::uint64_t> v_support = draw_support(rng, config, pool);
  const std::vector<std::uint64_t> w_support = config.symmetric ? v_support : draw_support(rng, config, pool);

  WeightFunction psi = capped_weights(rng, v_support, w_support, config);
  WeightFunction theta = config.symmetric ? psi : capped_weights(rng, w_support, v_support, config);

  MultiplicativeFunction f = MultiplicativeFunction::totient();
  MultiplicativeFunction g = MultiplicativeFunction::totient();
  if (config.random_multiplicative && !config.symmetric) {
    f = random_multiplicative(rng, psi, theta, config.value_numerator_bound);
    g = random_multiplicative(rng, psi, theta, config.value_numerator_bound);
  }
  EdgeSet edges = build_edge_set(psi, theta, params.t, params.K);
  return {PairSystem(std::move(psi), std::move(theta), std::move(f), std::move(g), std::move(edges)), params, true};
}

WeightFunction rescale_truncated(const WeightFunction& psi, const Rational& y, std::uint64_t Q) {
  if (y <= 0) throw Error(ErrorKind::invalid_parameter, "y must be positive");
  std::map<std::uint64_t, Rational> table;
  for (const auto& e : psi.entries()) {
    if (e.n.value() <= Q) table.emplace(e.n.value(), e.value / y);
  }
  return WeightFunction(table);
}

bool InstanceOutcome::failed() const {
  return !error.empty() || !slices_ok || !peel_ok || !structured ||
         (resolution && *resolution != Verdict::holds);
}

InstanceOutcome certify_instance(const Instance& instance, std::uint64_t seed, const CampaignOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  InstanceOutcome out;
  out.seed = seed;
  out.params = instance.params;
  const PairSystem& system = instance.system;
  const Params& params = instance.params;
  out.edge_count = system.edges().size();
  try {
    const BoundReport bound = main_bound_check(system, params, system.edges());
    out.P = bound.P;
    out.lhs = bound.lhs;
    out.rhs_lo = bound.rhs.lo_string(20);
    out.rhs_hi = bound.rhs.hi_string(20);
    out.main_verdict = bound.verdict;
    out.precision_bits = bound.precision_bits;

    Rng rng(mix_seed(seed, 0x51ce));
    out.slices_ok = check_slices(rng, system, params);

    if (!system.edges().empty() && bound.lhs > 0) {
      const ConcentrationResult conc = concentrate(system, system.edges(), params);
      const PeelResult peeled = peel(system, conc.e_star, params);
      const Projection proj = restrict_edges(conc.e_star);
      out.peel_ok = !check_property2(system, peeled.edges, params) &&
                    peeled.trace.size() <= proj.v_side.size() + proj.w_side.size() &&
                    std::all_of(peeled.trace.begin(), peeled.trace.end(),
                                [](const PeelStep& s) { return s.certificate == Verdict::holds; });
      out.structured = check_structured(peeled.edges, conc.N).structured;
      if (out.structured && !peeled.edges.empty()) {
        const ResolutionReport res = resolution_check(system, peeled.edges, conc.N, params);
        const bool facts = res.precondition_failure.empty() && res.reconstruction && res.coprime_parts &&
                           res.four_factor_identity && res.case_split && res.pointwise_bounds && res.chain_monotone;
        out.resolution = facts ? res.verdict : Verdict::violated;
      }
    }
  } catch (const Error& e) {
    out.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  if (out.main_verdict == Verdict::violated || out.failed()) {
    const auto path = options.witness_dir / ("witness-" + hex(seed) + ".json");
    save_instance(instance, path);
    out.witness_path = path.string();
  }
  out.seconds = seconds_since(start);
  return out;
}

CampaignReport certify_campaign(const GeneratorConfig& config, std::size_t count, const CampaignOptions& options) {
  if (count == 0) throw Error(ErrorKind::invalid_parameter, "count must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  CampaignReport report;
  report.count = count;
  report.rows.resize(count);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      GeneratorConfig local = config;
      local.seed = mix_seed(config.seed, k);
      InstanceOutcome row;
      try {
        row = certify_instance(generate_instance(local), local.seed, options);
      } catch (const Error& e) {
        row.seed = local.seed;
        row.error = std::string(to_string(e.kind())) + ": " + e.what();
      }
      row.index = k;
      report.rows[k] = std::move(row);
    }
  };
  unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }

  for (const auto& row : report.rows) {
    switch (row.main_verdict) {
      case Verdict::holds: ++report.holds; break;
      case Verdict::violated: ++report.violated; break;
      case Verdict::inconclusive: ++report.inconclusive; break;
    }
    if (row.failed()) ++report.check_failures;
    if (!row.witness_path.empty()) report.witness_paths.push_back(row.witness_path);
    report.max_instance_seconds = std::max(report.max_instance_seconds, row.seconds);
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

int CampaignReport::exit_code() const {
  if (violated > 0 || check_failures > 0) return 2;
  if (inconclusive > 0) return 3;
  return 0;
}

std::string CampaignReport::summary_json() const {
  json doc{{"count", count},
           {"holds", holds},
           {"violated", violated},
           {"inconclusive", inconclusive},
           {"check_failures", check_failures},
           {"witnesses", witness_paths},
           {"wall_seconds", wall_seconds},
           {"max_instance_seconds", max_instance_seconds}};
  return doc.dump(2) + "\n";
}

std::string CampaignReport::csv() const {
  std::ostringstream out;
  out << "index,seed,epsilon,C,t,K,edges,P,lhs,rhs_lo,rhs_hi,verdict,precision_bits,slices_ok,peel_ok,structured,"
         "resolution,error,seconds\n";
  for (const auto& r : rows) {
    out << r.index << ',' << r.seed << ',' << format_rational(r.params.epsilon) << ',' << format_rational(r.params.C)
        << ',' << format_rational(r.params.t) << ',' << format_rational(r.params.K) << ',' << r.edge_count << ','
        << r.P << ',' << format_rational(r.lhs) << ',' << r.rhs_lo << ',' << r.rhs_hi << ','
        << to_string(r.main_verdict) << ',' << r.precision_bits << ',' << r.slices_ok << ',' << r.peel_ok << ','
        << r.structured << ',' << (r.resolution ? to_string(*r.resolution) : "skipped") << ",\"" << r.error << "\","
        << r.seconds << '\n';
  }
  return out.str();
}

}  // namespace dsq
