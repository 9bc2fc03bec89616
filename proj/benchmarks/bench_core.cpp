#include <benchmark/benchmark.h>

#include <vector>

#include "agb/boosters.hpp"
#include "agb/harness.hpp"
#include "agb/oracles.hpp"
#include "agb/weak_learners.hpp"
#include "agb/wht.hpp"

namespace {

void BM_WhtInplace(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<double> base(uint64_t{1} << n);
    agb::CounterRng rng(7, 1);
    for (double& x : base) x = rng.next_pm1(0.5);
    for (auto _ : state) {
        std::vector<double> v = base;
        agb::wht_inplace(v);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(state.iterations() * (int64_t{1} << n));
}
BENCHMARK(BM_WhtInplace)->DenseRange(10, 18, 2);

void BM_ExactOptParities(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    agb::ExampleDistribution a = agb::instance_from_json(
        agb::gen_instance("random-boolean", {{"n", n}}, 3).instance);
    agb::ConceptClass c = agb::ConceptClass::all_parities(n);
    for (auto _ : state) {
        agb::OptResult r = agb::exact_opt(a, c);
        benchmark::DoNotOptimize(r.gamma);
    }
}
BENCHMARK(BM_ExactOptParities)->DenseRange(10, 16, 2);

void BM_BoostRound(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    agb::ExampleDistribution a = agb::instance_from_json(
        agb::gen_instance("noisy-parity", {{"n", n}, {"eta", 0.1}}, 11).instance);
    agb::WeakLearnerHandle weak =
        agb::exhaustive_weak(agb::ConceptClass::all_parities(n), 0.05, 0.05);
    agb::BoostParams bp;
    bp.alpha = bp.gamma = bp.epsilon = 0.05;
    uint64_t rounds = 0, runs = 0;
    for (auto _ : state) {
        agb::BoostResult r = agb::a2boost(a, weak, bp, 1);
        benchmark::DoNotOptimize(r.final_error);
        rounds += r.rounds;
        ++runs;
    }
    if (runs) state.counters["rounds"] = static_cast<double>(rounds) / runs;
}
BENCHMARK(BM_BoostRound)->DenseRange(8, 12, 2)->Unit(benchmark::kMillisecond);

void BM_KmSearch(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    agb::ExampleDistribution a = agb::instance_from_json(
        agb::gen_instance("noisy-parity", {{"n", n}, {"eta", 0.05}}, 5).instance);
    agb::KmConfig cfg;
    cfg.theta = 0.25;
    uint64_t seed = 0;
    for (auto _ : state) {
        agb::KmOutcome out = agb::km_search(a.phi(), cfg, ++seed);
        benchmark::DoNotOptimize(out.coeffs.data());
    }
}
BENCHMARK(BM_KmSearch)->DenseRange(10, 14, 2)->Unit(benchmark::kMillisecond);

void BM_ReweightedView(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    // flip noise keeps the labels boolean, as the reweighted view requires
    agb::ExampleDistribution a = agb::instance_from_json(
        agb::gen_instance("noisy-parity", {{"n", n}, {"eta", 0.2}, {"noise", "flip"}}, 9)
            .instance);
    std::vector<double> half(uint64_t{1} << n);
    agb::CounterRng rng(13, 2);
    for (double& x : half) x = rng.next_unit() - 0.5;
    agb::BoundedFn h = agb::BoundedFn::dense(n, half);
    for (auto _ : state) {
        agb::Reweighted rw = agb::reweighted_dh(a, h);
        benchmark::DoNotOptimize(rw.mass);
    }
}
BENCHMARK(BM_ReweightedView)->DenseRange(10, 16, 2);

}  // namespace

BENCHMARK_MAIN();
