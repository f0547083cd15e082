// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <vector>

#include "ceq/classifier.hpp"
#include "ceq/electrostatics.hpp"
#include "ceq/rng.hpp"

namespace {

ceq::ClassSummary random_charge(int id, std::size_t d, ceq::Rng& rng) {
    ceq::ClassSummary s;
    s.class_id = id;
    s.charge = rng.uniform(0.2, 3.0);
    s.position.resize(d);
    s.spread.resize(d);
    for (auto& x : s.position) x = rng.uniform(0.0, 20.0);
    for (auto& x : s.spread) x = rng.uniform(0.1, 2.0);
    s.count = 2;
    return s;
}

ceq::EquilibriumModel synthetic_model(std::size_t n, std::size_t d) {
    ceq::Rng rng(7);
    ceq::EquilibriumModel model;
    model.k = 1.0;
    model.equilibrium_positions = ceq::Matrix(n, d);
    model.deltas = ceq::Matrix(n, d, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        auto s = random_charge(static_cast<int>(c), d, rng);
        std::copy(s.position.begin(), s.position.end(),
                  model.equilibrium_positions.row(c).begin());
        model.summaries.push_back(std::move(s));
    }
    return model;
}

void bm_net_forces(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = static_cast<std::size_t>(state.range(1));
    ceq::Rng rng(13);
    std::vector<ceq::ClassSummary> summaries;
    for (std::size_t c = 0; c < n; ++c) {
        summaries.push_back(random_charge(static_cast<int>(c), d, rng));
    }
    const auto system = ceq::make_charge_system(summaries, 1.0);
    for (auto _ : state) {
        const auto forces = ceq::net_forces(system, ceq::SpreadWeighting::source);
        benchmark::DoNotOptimize(forces.total_magnitude);
    }
}

// The per-test-point force argmax, the classification hot path.
void bm_classify_point(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto model = synthetic_model(10, d);
    ceq::Rng rng(17);
    std::vector<double> probe(d);
    for (auto& x : probe) x = rng.uniform(0.0, 20.0);
    for (auto _ : state) {
        const auto result = ceq::classify_point(probe, model);
        benchmark::DoNotOptimize(result.first);
    }
}

}  // namespace

BENCHMARK(bm_net_forces)->Args({10, 64})->Args({10, 256})->Args({50, 64});
BENCHMARK(bm_classify_point)->Arg(64)->Arg(256)->Arg(784);
