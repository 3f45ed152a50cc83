// dsq: command-line front end for the library.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dsq/anatomy.hpp"
#include "dsq/compress.hpp"
#include "dsq/diagonal.hpp"
#include "dsq/harness.hpp"
#include "dsq/instance_io.hpp"
#include "dsq/resolution.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
using namespace dsq;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;
constexpr int kExitInconclusive = 3;

struct Global {
  unsigned precision = 0;
  unsigned precision_cap = 0;
};

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::holds: return kExitOk;
    case Verdict::violated: return kExitViolation;
    case Verdict::inconclusive: return kExitInconclusive;
  }
  return kExitError;
}

Instance load(const std::string& path, const Global& global) {
  Instance inst = load_instance(path);
  if (global.precision != 0) inst.params.precision_bits = global.precision;
  if (global.precision_cap != 0) inst.params.precision_cap = global.precision_cap;
  return inst;
}

json edges_json(const EdgeSet& edges) { return json::parse(serialize_edges(edges)); }

json interval_json(const Interval& x) { return {{"lo", x.lo_string()}, {"hi", x.hi_string()}}; }

void print(const json& doc) { std::cout << doc.dump(2) << '\n'; }

Rational rational_option(const std::string& text) { return parse_rational(text); }

// anatomy sweeps -------------------------------------------------------------

struct AnatomyArgs {
  std::string x = "10";
  std::string t = "10";
  std::string K = "1";
  std::string gamma = "2";
  std::uint64_t M = 12;
  std::uint64_t sweep = 0;  // x_max or M_max; 0 means single point
};

std::string ratio_text(const Rational& exact, const Rational& bound) {
  if (bound == 0) return "nan";
  std::ostringstream out;
  out.precision(10);
  out << Rational(exact / bound).get_d();
  return out.str();
}

int run_anatomy(const std::string& which, const AnatomyArgs& a, unsigned bits) {
  const Rational t = rational_option(a.t);
  const Rational K = rational_option(a.K);
  const Rational gamma = rational_option(a.gamma);
  if (which == "count" || which == "rankin") {
    if (a.sweep == 0) {
      const Rational x = rational_option(a.x);
      if (which == "rankin") {
        print({{"x", a.x}, {"t", a.t}, {"gamma", a.gamma}, {"rankin_sum", format_rational(rankin_sum(x, t, gamma))}});
        return kExitOk;
      }
      const AnatomyReport r = count_report(x, t, K, gamma, bits);
      json doc{{"x", a.x}, {"t", a.t}, {"K", a.K}, {"gamma", a.gamma}, {"exact", format_rational(r.exact_value)}};
      if (r.exact_chain) {
        doc["rankin_bound"] = format_rational(r.rankin_bound);
        doc["mertens_bound"] = format_rational(r.mertens_bound);
      } else {
        doc["mertens_bound"] = interval_json(*r.mertens_enclosure);
      }
      doc["chain_holds"] = r.chain_holds();
      print(doc);
      return r.chain_holds() ? kExitOk : kExitViolation;
    }
    const auto counts = count_many_small_primes_prefix(a.sweep, t, K);
    const auto sums = rankin_sum_prefix(a.sweep, t, gamma);
    if (!is_integer(K)) throw Error(ErrorKind::invalid_parameter, "sweeps need integer K");
    const Rational scale = rational_pow(gamma, -K.get_num().get_si());
    bool ok = true;
    std::cout << "x,t,K,gamma,exact,bound,ratio\n";
    for (std::uint64_t x = 1; x <= a.sweep; ++x) {
      const Rational exact = to_rational(counts[x]);
      const Rational bound = scale * sums[x];
      ok = ok && exact <= bound;
      std::cout << x << ',' << a.t << ',' << a.K << ',' << a.gamma << ',' << format_rational(exact) << ','
                << format_rational(bound) << ',' << ratio_text(exact, bound) << '\n';
    }
    return ok ? kExitOk : kExitViolation;
  }
  if (which == "divisor") {
    const auto f = MultiplicativeFunction::totient();
    if (a.sweep == 0) {
      const AnatomyReport r = divisor_report(Natural(a.M), t, K, gamma, f, bits);
      json doc{{"M", a.M}, {"t", a.t}, {"K", a.K}, {"gamma", a.gamma}, {"exact", format_rational(r.exact_value)}};
      if (r.exact_chain) {
        doc["rankin_bound"] = format_rational(r.rankin_bound);
        doc["bound"] = format_rational(r.mertens_bound);
      } else {
        doc["bound"] = interval_json(*r.mertens_enclosure);
      }
      doc["chain_holds"] = r.chain_holds();
      print(doc);
      return r.chain_holds() ? kExitOk : kExitViolation;
    }
    bool ok = true;
    std::cout << "M,t,K,gamma,exact,bound,ratio\n";
    for (std::uint64_t M = 1; M <= a.sweep; ++M) {
      const Rational exact = divisor_anatomy_sum(Natural(M), t, K, f);
      const Rational bound = divisor_anatomy_bound(Natural(M), t, K, gamma);
      ok = ok && exact <= bound;
      std::cout << M << ',' << a.t << ',' << a.K << ',' << a.gamma << ',' << format_rational(exact) << ','
                << format_rational(bound) << ',' << ratio_text(exact, bound) << '\n';
    }
    return ok ? kExitOk : kExitViolation;
  }
  // mertens
  const Rational product = mertens_product(t, gamma);
  const Interval ratio = ratio_to_log_power(t, gamma, bits);
  print({{"t", a.t},
         {"gamma", a.gamma},
         {"product", format_rational(product).size() > 200 ? std::string("(large)") : format_rational(product)},
         {"product_approx", product.get_d()},
         {"ratio_to_log_power", interval_json(ratio)}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact checks for quantitative Duffin-Schaeffer objects"};
  app.require_subcommand(1);
  Global global;
  app.add_option("--precision", global.precision, "Starting interval precision in bits");
  app.add_option("--precision-cap", global.precision_cap, "Largest precision tried while inconclusive");

  std::string instance_path;
  std::string config_path;
  std::string out_path;

  auto* gen = app.add_subcommand("gen", "Generate an instance from a generator config");
  std::uint64_t gen_seed = 0;
  bool gen_seed_set = false;
  gen->add_option("--config", config_path, "Generator config (JSON)")->required();
  gen->add_option("--out", out_path, "Output instance file (stdout if omitted)");
  gen->add_option("--seed", gen_seed, "Override the config seed")->each([&](const std::string&) { gen_seed_set = true; });

  auto* edges = app.add_subcommand("edges", "Print the quality edge set of an instance");
  std::string variant = "squared";
  edges->add_option("--instance", instance_path)->required();
  edges->add_option("--variant", variant, "omega reading: squared or lcm")->check(CLI::IsMember({"squared", "lcm"}));
  std::string edges_t;
  std::string edges_K;
  edges->add_option("--t", edges_t, "Override params.t");
  edges->add_option("--K", edges_K, "Override params.K");

  auto* check = app.add_subcommand("check", "Certify the main inequality on one instance");
  check->add_option("--instance", instance_path)->required();

  auto* cert = app.add_subcommand("certify", "Certify an instance or run a campaign");
  std::size_t count = 1;
  unsigned threads = 0;
  std::string witness_dir = "witnesses";
  std::string csv_path;
  std::string summary_path;
  auto* cert_instance = cert->add_option("--instance", instance_path);
  auto* cert_campaign = cert->add_option("--campaign", config_path, "Generator config for the campaign");
  cert_instance->excludes(cert_campaign);
  cert->add_option("--count", count, "Number of instances");
  cert->add_option("--threads", threads, "Worker threads (0 = all cores)");
  cert->add_option("--witness-dir", witness_dir);
  cert->add_option("--csv", csv_path, "Per-instance CSV rows");
  cert->add_option("--summary", summary_path, "Summary JSON (stdout if omitted)");

  auto* compress = app.add_subcommand("compress", "Prime-slice identities at (p, i, j)");
  std::uint64_t p = 2;
  int i = 0;
  int j = 0;
  compress->add_option("--instance", instance_path)->required();
  compress->add_option("--p", p)->required();
  compress->add_option("--i", i)->required();
  compress->add_option("--j", j)->required();
  bool verify = false;
  compress->add_option("--out", out_path, "Write the slice as an instance file");
  compress->add_flag("--verify", verify, "Include the identity report");

  auto* diagonal = app.add_subcommand("diagonal", "Diagonal measure, center and decay checks at a prime");
  diagonal->add_option("--instance", instance_path)->required();
  diagonal->add_option("--p", p)->required();

  auto* concentrate_cmd = app.add_subcommand("concentrate", "Centers at every support prime and E*");
  concentrate_cmd->add_option("--instance", instance_path)->required();

  auto* peel_cmd = app.add_subcommand("peel", "Peel the edge set to the degree property");
  bool peel_star = false;
  peel_cmd->add_option("--instance", instance_path)->required();
  peel_cmd->add_flag("--concentrate", peel_star, "Peel E* instead of E");
  std::string trace_path;
  peel_cmd->add_option("--trace", trace_path, "Write the removal trace (CSV) here instead of stdout");

  auto* resolve = app.add_subcommand("resolve", "S-sums and the squared resolution inequality");
  std::uint64_t N = 1;
  resolve->add_option("--instance", instance_path)->required();
  resolve->add_option("--N", N)->required();

  auto* anatomy = app.add_subcommand("anatomy", "Anatomy chains (count, rankin, divisor, mertens)");
  AnatomyArgs aargs;
  std::string which;
  anatomy->add_option("kind", which)->required()->check(CLI::IsMember({"count", "rankin", "divisor", "mertens"}));
  anatomy->add_option("--x", aargs.x);
  anatomy->add_option("--t", aargs.t);
  anatomy->add_option("--K", aargs.K);
  anatomy->add_option("--gamma", aargs.gamma);
  anatomy->add_option("--M", aargs.M);
  anatomy->add_option("--sweep", aargs.sweep, "Emit CSV for x (or M) = 1..N");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      GeneratorConfig config = parse_generator_config(read_text_file(config_path));
      if (gen_seed_set) config.seed = gen_seed;
      const std::string text = serialize_instance(generate_instance(config));
      if (out_path.empty()) {
        std::cout << text;
      } else {
        write_text_file(out_path, text);
      }
      return kExitOk;
    }
    if (*edges) {
      const Instance inst = load(instance_path, global);
      const auto v = variant == "lcm" ? OmegaVariant::lcm : OmegaVariant::squared;
      const Rational t = edges_t.empty() ? inst.params.t : rational_option(edges_t);
      const Rational K = edges_K.empty() ? inst.params.K : rational_option(edges_K);
      if (t < 1) throw Error(ErrorKind::invalid_parameter, "t must be >= 1");
      std::cout << serialize_edges(build_edge_set(inst.system.psi(), inst.system.theta(), t, K, v))
                << '\n';
      return kExitOk;
    }
    if (*check) {
      const Instance inst = load(instance_path, global);
      const BoundReport r = main_bound_check(inst.system, inst.params, inst.system.edges());
      print({{"lhs", format_rational(r.lhs)},
             {"rhs_lo", r.rhs.lo_string()},
             {"rhs_hi", r.rhs.hi_string()},
             {"verdict", to_string(r.verdict)},
             {"precision_bits", r.precision_bits},
             {"P", r.P}});
      return exit_for(r.verdict);
    }
    if (*cert) {
      CampaignOptions options;
      options.witness_dir = witness_dir;
      options.threads = threads;
      if (!instance_path.empty()) {
        const Instance inst = load(instance_path, global);
        const InstanceOutcome row = certify_instance(inst, 0, options);
        print({{"lhs", format_rational(row.lhs)},
               {"rhs_lo", row.rhs_lo},
               {"rhs_hi", row.rhs_hi},
               {"verdict", to_string(row.main_verdict)},
               {"precision_bits", row.precision_bits},
               {"slices_ok", row.slices_ok},
               {"peel_ok", row.peel_ok},
               {"structured", row.structured},
               {"resolution", row.resolution ? to_string(*row.resolution) : "skipped"},
               {"error", row.error},
               {"witness", row.witness_path}});
        if (row.main_verdict == Verdict::violated || row.failed()) return kExitViolation;
        return exit_for(row.main_verdict);
      }
      if (config_path.empty()) throw Error(ErrorKind::invalid_parameter, "certify needs --instance or --campaign");
      GeneratorConfig config = parse_generator_config(read_text_file(config_path));
      if (global.precision != 0) config.params.precision_bits = global.precision;
      if (global.precision_cap != 0) config.params.precision_cap = global.precision_cap;
      const CampaignReport report = certify_campaign(config, count, options);
      if (!csv_path.empty()) write_text_file(csv_path, report.csv());
      if (summary_path.empty()) {
        std::cout << report.summary_json();
      } else {
        write_text_file(summary_path, report.summary_json());
      }
      return report.exit_code();
    }
    if (*compress) {
      const Instance inst = load(instance_path, global);
      const Slice slice = make_slice(inst.system, p, i, j);
      if (!out_path.empty()) save_instance(Instance{slice.tilde, inst.params, false}, out_path);
      const SliceReport report = verify_slice_identities(inst.system, slice, inst.params);
      if (!verify) {
        print({{"p", p},
               {"i", i},
               {"j", j},
               {"psi_support", slice.tilde.psi().support()},
               {"theta_support", slice.tilde.theta().support()},
               {"slice_edges", edges_json(slice.tilde.edges())}});
        return kExitOk;
      }
      json rows = json::array();
      for (const auto& row : report.rows) {
        json r{{"name", row.name}, {"status", to_string(row.status)}, {"asserted", row.asserted},
               {"lhs", row.lhs},   {"rhs", row.rhs},                   {"detail", row.detail}};
        if (row.witness) r["witness"] = {row.witness->first, row.witness->second};
        rows.push_back(std::move(r));
      }
      print({{"p", p}, {"i", i}, {"j", j}, {"slice_edges", edges_json(slice.tilde.edges())}, {"rows", rows},
             {"ok", report.ok()}});
      return report.ok() ? kExitOk : kExitViolation;
    }
    if (*diagonal) {
      const Instance inst = load(instance_path, global);
      const DiagonalMeasure dm = diagonal_measure(inst.system, inst.system.edges(), p);
      const DecayReport decay = decay_check(dm, inst.params);
      json cells = json::array();
      for (const auto& c : decay.cells) {
        cells.push_back({{"i", c.cell.first},
                         {"j", c.cell.second},
                         {"mass", format_rational(c.mass)},
                         {"bound", interval_json(c.bound)},
                         {"verdict", to_string(c.verdict)}});
      }
      json alpha = json::object();
      for (const auto& [k, v] : dm.alpha) alpha[std::to_string(k)] = format_rational(v);
      json beta = json::object();
      for (const auto& [k, v] : dm.beta) beta[std::to_string(k)] = format_rational(v);
      print({{"p", p},
             {"cells", cells},
             {"alpha", alpha},
             {"beta", beta},
             {"center", decay.center.k},
             {"tail_mass", format_rational(decay.center.tail_mass)},
             {"tail_ratio", interval_json(decay.tail_ratio)},
             {"hypothesis_holds", decay.hypothesis_holds},
             {"norm_condition", to_string(decay.norm_condition)},
             {"necessary_condition", to_string(decay.necessary_condition)}});
      return kExitOk;
    }
    if (*concentrate_cmd) {
      const Instance inst = load(instance_path, global);
      const ConcentrationResult c = concentrate(inst.system, inst.system.edges(), inst.params);
      json centers = json::object();
      for (const auto& [q, center] : c.centers) {
        centers[std::to_string(q)] = {{"k", center.k}, {"tail_mass", format_rational(center.tail_mass)}};
      }
      print({{"N", c.N},
             {"centers", centers},
             {"excluded_mass", format_rational(c.excluded_mass)},
             {"excluded_fraction", format_rational(c.excluded_fraction)},
             {"e_star", edges_json(c.e_star)}});
      return kExitOk;
    }
    if (*peel_cmd) {
      const Instance inst = load(instance_path, global);
      EdgeSet source = inst.system.edges();
      if (peel_star) source = concentrate(inst.system, source, inst.params).e_star;
      const PeelResult r = peel(inst.system, source, inst.params);
      if (trace_path.empty()) {
        std::cout << format_trace(r.trace);
      } else {
        write_text_file(trace_path, format_trace(r.trace));
      }
      std::cout << "edges " << serialize_edges(r.edges) << '\n';
      const bool ok = !check_property2(inst.system, r.edges, inst.params);
      return ok ? kExitOk : kExitViolation;
    }
    if (*resolve) {
      const Instance inst = load(instance_path, global);
      const ResolutionReport r = resolution_check(inst.system, inst.system.edges(), N, inst.params);
      json doc{{"S1", format_rational(r.sums.s1)},
               {"S2", format_rational(r.sums.s2)},
               {"S3", format_rational(r.sums.s3)},
               {"S4", format_rational(r.sums.s4)},
               {"lhs_squared", format_rational(r.lhs_squared)},
               {"rhs", format_rational(r.rhs)},
               {"verdict", to_string(r.verdict)},
               {"w0", r.sums.w0},
               {"precondition_failure", r.precondition_failure},
               {"reconstruction", r.reconstruction},
               {"coprime_parts", r.coprime_parts},
               {"four_factor_identity", r.four_factor_identity},
               {"pointwise_bounds", r.pointwise_bounds},
               {"chain_monotone", r.chain_monotone}};
      if (r.witness_edge) doc["witness_edge"] = {r.witness_edge->first, r.witness_edge->second};
      if (r.witness_vertex) doc["witness_vertex"] = *r.witness_vertex;
      if (r.empirical_constant) doc["empirical_constant"] = interval_json(*r.empirical_constant);
      print(doc);
      if (!r.precondition_failure.empty()) return kExitError;
      return exit_for(r.verdict);
    }
    if (*anatomy) {
      return run_anatomy(which, aargs, global.precision != 0 ? global.precision : kDefaultPrecisionBits);
    }
  } catch (const Error& e) {
    std::cerr << "dsq: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "dsq: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}
