// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "ceq/equilibrium.hpp"
#include "ceq/rng.hpp"

namespace {

// Full relaxation of a random unit-spread system to the default tolerance.
void bm_solve_equilibrium(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = static_cast<std::size_t>(state.range(1));
    ceq::Rng rng(21);
    std::vector<ceq::ClassSummary> summaries;
    for (std::size_t c = 0; c < n; ++c) {
        ceq::ClassSummary s;
        s.class_id = static_cast<int>(c);
        s.charge = rng.uniform(0.1, 5.0);
        s.position.resize(d);
        for (auto& x : s.position) x = rng.uniform();
        s.spread.assign(d, 1.0);
        s.count = 2;
        summaries.push_back(std::move(s));
    }
    for (auto _ : state) {
        const auto model = ceq::solve_equilibrium(summaries, 1.0, ceq::SolverConfig{});
        benchmark::DoNotOptimize(model.final_total_force);
    }
}

}  // namespace

BENCHMARK(bm_solve_equilibrium)
    ->Unit(benchmark::kMillisecond)
    ->Args({10, 64})
    ->Args({10, 256})
    ->Args({4, 16});

BENCHMARK_MAIN();
