// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "ceq/rng.hpp"
#include "ceq/transform.hpp"

namespace {

void bm_forward(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto model = ceq::init_model(d, ceq::default_hidden_widths(d), 5);
    ceq::Rng rng(9);
    std::vector<double> x(d);
    for (auto& v : x) v = rng.uniform();
    for (auto _ : state) {
        const auto y = ceq::forward(model, x);
        benchmark::DoNotOptimize(y.data());
    }
}

void bm_train_epoch(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const std::size_t rows = 512;
    ceq::Rng rng(11);
    ceq::Matrix X(rows, d), Y(rows, d);
    for (auto& v : X.data()) v = rng.uniform();
    for (auto& v : Y.data()) v = rng.uniform(-4.0, 4.0);
    const auto init = ceq::init_model(d, ceq::default_hidden_widths(d), 5);
    ceq::TrainConfig config;
    config.epochs = 1;
    config.schedule = {{1, 1e-4}};
    for (auto _ : state) {
        auto result = ceq::train(init, X, Y, config);
        benchmark::DoNotOptimize(result.epoch_losses[0]);
    }
}

}  // namespace

BENCHMARK(bm_forward)->Arg(64)->Arg(256);
BENCHMARK(bm_train_epoch)->Unit(benchmark::kMillisecond)->Arg(64)->Arg(256);
