#include <benchmark/benchmark.h>

#include "unplab/entropy.hpp"
#include "unplab/extractors.hpp"
#include "unplab/guessing.hpp"
#include "unplab/protocols.hpp"
#include "unplab/random.hpp"
#include "unplab/reconstruct.hpp"

using namespace unplab;

namespace {

void BM_GuessingProbability(benchmark::State& state) {
  Rng rng(1);
  const auto alphabet = static_cast<std::size_t>(state.range(0));
  const auto cq = random_cq(rng, alphabet, {4});
  for (auto _ : state) benchmark::DoNotOptimize(guessing_probability(cq).value);
}
BENCHMARK(BM_GuessingProbability)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_IpOutputDistance(benchmark::State& state) {
  Rng rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cq = random_noisy_source(rng, n, 2, 0.2, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(ip_output_distance(cq));
}
BENCHMARK(BM_IpOutputDistance)->DenseRange(4, 8, 2);

void BM_WeakDesign(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_weak_design(t, 8).d);
}
BENCHMARK(BM_WeakDesign)->Arg(4)->Arg(6)->Arg(8);

void BM_Reconstruction(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto circuit = build_reconstructor(make_biased_predictor(n, 0.25));
  const std::uint64_t x = (std::uint64_t{1} << n) - 1;
  const auto side = basis_side_info(n, x);
  for (auto _ : state) benchmark::DoNotOptimize(run_reconstruction(circuit, x, side));
}
BENCHMARK(BM_Reconstruction)->DenseRange(3, 5, 1);

void BM_ProtocolRounds(benchmark::State& state) {
  const auto cfg = protocol_preset("alternating-4round");
  for (auto _ : state) benchmark::DoNotOptimize(run_alternating(cfg).rounds.size());
}
BENCHMARK(BM_ProtocolRounds)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
