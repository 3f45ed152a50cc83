#include <filesystem>

#include "doctest.h"
#include "dsq/harness.hpp"
#include "support/helpers.hpp"

using namespace dsq;
using testing::error_kind;
using testing::q;
using testing::weights;

TEST_CASE("generation is deterministic") {
  const GeneratorConfig config = GeneratorConfig::campaign_default(42);
  const std::string a = serialize_instance(generate_instance(config));
  const std::string b = serialize_instance(generate_instance(config));
  CHECK(a == b);
  GeneratorConfig other = config;
  other.seed = 43;
  CHECK(serialize_instance(generate_instance(other)) != a);
}

TEST_CASE("mix_seed and Rng are stable") {
  CHECK(mix_seed(42, 0) != mix_seed(42, 1));
  CHECK(mix_seed(42, 7) == mix_seed(42, 7));
  Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const auto x = rng.between(3, 9);
    REQUIRE(x >= 3);
    REQUIRE(x <= 9);
  }
  Rng always(2);
  CHECK(always.chance(q(1)));
  CHECK_FALSE(always.chance(q(0)));
}

TEST_CASE("empty supports give an empty instance") {
  GeneratorConfig config = GeneratorConfig::campaign_default(5);
  config.support_min = 0;
  config.support_max = 0;
  const Instance inst = generate_instance(config);
  CHECK(inst.system.psi().empty());
  CHECK(inst.system.theta().empty());
  CHECK(inst.system.edges().empty());
}

TEST_CASE("density 1 makes every pair a quality pair") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GeneratorConfig config = GeneratorConfig::campaign_default(seed);
    config.density = 1;
    config.support_max = 30;
    const Instance inst = generate_instance(config);
    const EdgeSet all = build_edge_set(inst.system.psi(), inst.system.theta(), q(1), q(-1000));
    CHECK(all.size() == inst.system.psi().size() * inst.system.theta().size());
  }
}

TEST_CASE("totient preset") {
  GeneratorConfig base = GeneratorConfig::campaign_default(9);
  base.params.epsilon = q(2, 5);
  base.grid = {};
  const GeneratorConfig config = GeneratorConfig::totient_preset(base);
  const Instance inst = generate_instance(config);
  CHECK(inst.system.f().is_totient());
  CHECK(inst.system.g().is_totient());
  CHECK(inst.system.psi() == inst.system.theta());
  CHECK(inst.params.epsilon == q(1, 5));
}

TEST_CASE("rescale_truncated") {
  const auto psi = weights({{5, q(1)}, {7, q(2)}, {40, q(3)}});
  const WeightFunction scaled = rescale_truncated(psi, q(2), 10);
  CHECK(scaled.at(5) == q(1, 2));
  CHECK(scaled.at(7) == 1);
  CHECK_FALSE(scaled.contains(40));
  CHECK(error_kind([&] { rescale_truncated(psi, q(0), 10); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("generator config round trips through JSON") {
  GeneratorConfig config = GeneratorConfig::campaign_default(77);
  config.support_max = 12;
  config.density = q(3, 4);
  const GeneratorConfig back = parse_generator_config(serialize_generator_config(config));
  CHECK(serialize_generator_config(back) == serialize_generator_config(config));
  CHECK(serialize_instance(generate_instance(back)) == serialize_instance(generate_instance(config)));
  const GeneratorConfig preset = parse_generator_config(R"({"preset": "campaign", "seed": 3})");
  CHECK(preset.seed == 3);
  CHECK(error_kind([] { parse_generator_config(R"({"preset": "nope"})"); }) == ErrorKind::parse_error);
}

TEST_CASE("a small campaign certifies every instance") {
  const auto dir = std::filesystem::temp_directory_path() / "dsq_unit_witnesses";
  std::filesystem::remove_all(dir);
  CampaignOptions options;
  options.witness_dir = dir;
  options.threads = 2;
  const CampaignReport report = certify_campaign(GeneratorConfig::campaign_default(42), 40, options);
  CHECK(report.count == 40);
  CHECK(report.holds + report.violated + report.inconclusive == report.count);
  CHECK(report.violated == 0);
  CHECK(report.check_failures == 0);
  CHECK(report.witness_paths.empty());
  CHECK(report.exit_code() == (report.inconclusive > 0 ? 3 : 0));
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    CHECK(report.rows[k].index == k);
    CHECK(report.rows[k].seed == mix_seed(42, k));
  }

  // same seeds, one thread: identical rows
  options.threads = 1;
  const CampaignReport again = certify_campaign(GeneratorConfig::campaign_default(42), 40, options);
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    CHECK(again.rows[k].lhs == report.rows[k].lhs);
    CHECK(again.rows[k].rhs_lo == report.rows[k].rhs_lo);
  }
  CHECK(report.csv().rfind("index,seed", 0) == 0);
}

TEST_CASE("low precision never produces a violation") {
  GeneratorConfig config = GeneratorConfig::campaign_default(42);
  config.params.precision_bits = 16;
  config.params.precision_cap = 16;
  CampaignOptions options;
  options.witness_dir = std::filesystem::temp_directory_path() / "dsq_unit_witnesses16";
  options.threads = 1;
  const CampaignReport report = certify_campaign(config, 30, options);
  CHECK(report.violated == 0);
  CHECK(report.holds + report.inconclusive == report.count);
}
