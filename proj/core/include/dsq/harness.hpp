#pragma once

// Seeded instance generation, weight rescaling with truncation, and
// certification campaigns over generated corpora.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dsq/instance_io.hpp"
#include "dsq/quality.hpp"

namespace dsq {

/// Parameter values drawn per instance; an empty list keeps the base value.
struct ParamGrid {
  std::vector<Rational> epsilon;
  std::vector<Rational> C;
  std::vector<Rational> t;
  std::vector<Rational> K;

  bool empty() const { return epsilon.empty() && C.empty() && t.empty() && K.empty(); }
  static ParamGrid campaign_default();
};

struct GeneratorConfig {
  std::uint64_t seed = 42;
  std::size_t support_min = 1;
  std::size_t support_max = 100;
  /// Weights are u * cap with u = a / value_numerator_bound, a uniform in
  /// 1..value_numerator_bound.
  std::uint64_t value_numerator_bound = 16;
  std::uint64_t prime_pool_bound = 50;
  int max_exponent = 3;
  int max_prime_factors = 4;
  std::uint64_t value_cap = 1'000'000'000;
  /// Chance that a given opposite vertex constrains a weight. 1 makes every
  /// pair satisfy D <= 1.
  Rational density{1, 2};
  bool symmetric = false;              // theta = psi
  bool random_multiplicative = false;  // random admissible f, g tables
  bool halve_epsilon = false;          // totient preset: eps/2 in the main check
  Params params;
  ParamGrid grid;

  /// f = g = totient, psi = theta, eps replaced by eps/2.
  static GeneratorConfig totient_preset(GeneratorConfig base);
  /// The documented campaign defaults with the given seed.
  static GeneratorConfig campaign_default(std::uint64_t seed);
};

GeneratorConfig parse_generator_config(std::string_view json_text);
std::string serialize_generator_config(const GeneratorConfig& config);

/// Deterministic 64-bit stream with portable bounded draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n), n >= 1, by rejection.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  /// True with probability p.
  bool chance(const Rational& p);

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finaliser, used to derive per-instance seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Draws an instance with edges = "auto" (the quality edge set). With
/// halve_epsilon the stored epsilon is already halved.
Instance generate_instance(const GeneratorConfig& config);

/// psi~(n) = psi(n) / y for n <= Q. Throws invalid-parameter for y <= 0.
WeightFunction rescale_truncated(const WeightFunction& psi, const Rational& y, std::uint64_t Q);

struct InstanceOutcome {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  Params params;
  std::size_t edge_count = 0;
  std::uint64_t P = 0;
  Rational lhs;
  std::string rhs_lo;
  std::string rhs_hi;
  Verdict main_verdict = Verdict::inconclusive;
  unsigned precision_bits = 0;
  bool slices_ok = true;
  bool peel_ok = true;
  bool structured = true;
  std::optional<Verdict> resolution;
  std::string witness_path;
  std::string error;  // set when the pipeline threw
  double seconds = 0;

  /// Any asserted check failed (beyond the main-bound tally).
  bool failed() const;
};

struct CampaignOptions {
  std::filesystem::path witness_dir = "witnesses";
  unsigned threads = 0;  // 0: hardware concurrency
};

struct CampaignReport {
  std::size_t count = 0;
  std::size_t holds = 0;
  std::size_t violated = 0;
  std::size_t inconclusive = 0;
  std::size_t check_failures = 0;
  std::vector<std::string> witness_paths;
  std::vector<InstanceOutcome> rows;  // seed order
  double wall_seconds = 0;
  double max_instance_seconds = 0;

  /// 0: no violation, 2: violation found, 3: inconclusive remained.
  int exit_code() const;
  std::string summary_json() const;
  std::string csv() const;
};

/// Runs the full pipeline on one instance: edge set, main bound, three
/// slice checks, concentration, peeling, structure and resolution.
InstanceOutcome certify_instance(const Instance& instance, std::uint64_t seed, const CampaignOptions& options);

/// Instance k uses seed mix_seed(config.seed, k).
CampaignReport certify_campaign(const GeneratorConfig& config, std::size_t count,
                                const CampaignOptions& options = {});

}  // namespace dsq
