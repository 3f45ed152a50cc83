#include <benchmark/benchmark.h>

#include <filesystem>

#include "dsq/anatomy.hpp"
#include "dsq/diagonal.hpp"
#include "dsq/harness.hpp"

namespace {

dsq::Instance sample_instance(std::uint64_t seed) {
  dsq::GeneratorConfig config = dsq::GeneratorConfig::campaign_default(seed);
  return dsq::generate_instance(config);
}

void BM_BuildEdgeSet(benchmark::State& state) {
  const dsq::Instance inst = sample_instance(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dsq::build_edge_set(inst.system.psi(), inst.system.theta(), inst.params.t, inst.params.K));
  }
}
BENCHMARK(BM_BuildEdgeSet);

void BM_MainBoundCheck(benchmark::State& state) {
  const dsq::Instance inst = sample_instance(11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsq::main_bound_check(inst.system, inst.params, inst.system.edges()));
  }
}
BENCHMARK(BM_MainBoundCheck);

void BM_Peel(benchmark::State& state) {
  const dsq::Instance inst = sample_instance(13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsq::peel(inst.system, inst.system.edges(), inst.params));
  }
}
BENCHMARK(BM_Peel);

void BM_CertifyInstance(benchmark::State& state) {
  std::uint64_t seed = 0;
  dsq::CampaignOptions options;
  options.witness_dir = std::filesystem::temp_directory_path() / "dsq-bench-witnesses";
  for (auto _ : state) {
    const dsq::Instance inst = sample_instance(++seed);
    benchmark::DoNotOptimize(dsq::certify_instance(inst, seed, options));
  }
}
BENCHMARK(BM_CertifyInstance)->Unit(benchmark::kMillisecond);

void BM_RankinPrefix(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsq::rankin_sum_prefix(static_cast<std::uint64_t>(state.range(0)), dsq::Rational(100),
                                                    dsq::Rational(3, 2)));
  }
}
BENCHMARK(BM_RankinPrefix)->Arg(1000)->Arg(10000);

void BM_MertensProduct(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsq::mertens_product(dsq::Rational(state.range(0)), dsq::Rational(2)));
  }
}
BENCHMARK(BM_MertensProduct)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
