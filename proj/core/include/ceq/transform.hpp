// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ceq/matrix.hpp"

namespace ceq {

/// Fully-connected encoder-decoder regressor mapping input-space vectors to
/// their equilibrium-space images. Rectifier on hidden layers, identity
/// output. Weight matrices are (fan_out x fan_in).
struct TransformModel {
    std::vector<std::size_t> layer_sizes;     // input d, hidden widths..., output d
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    std::size_t dim() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
    std::size_t parameter_count() const;
};

struct LearningRatePhase {
    std::size_t epochs = 0;
    double rate = 0.0;
};

struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 64;
    // Phases must cover [0, epochs) exactly; default matches a 30-epoch run
    // at 1e-4 dropping to 1e-5 for the last 10.
    std::vector<LearningRatePhase> schedule = {{20, 1e-4}, {10, 1e-5}};
    double rms_decay = 0.9;
    double rms_epsilon = 1e-8;
    std::uint64_t seed = 0;
};

/// Default hidden widths for dimensionality d: a 4d / d / 4d bottleneck.
std::vector<std::size_t> default_hidden_widths(std::size_t d);

/// Seeded uniform(-a, a) weights with a = sqrt(6 / (fan_in + fan_out)),
/// zero biases. An empty hidden list gives a plain linear map.
TransformModel init_model(std::size_t d, const std::vector<std::size_t>& hidden,
                          std::uint64_t seed);

std::vector<double> forward(const TransformModel& model, std::span<const double> x);

/// Forward pass over every row of X.
Matrix forward_all(const TransformModel& model, const Matrix& X);

/// Mean squared error (1 / (N * d)) * sum |phi(x) - y|^2.
double mse_loss(const TransformModel& model, const Matrix& inputs,
                const Matrix& targets);

/// Analytic MSE gradient over the given rows, by reverse accumulation.
/// Shapes mirror the model's weights and biases.
struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};
Gradients mse_gradients(const TransformModel& model, const Matrix& inputs,
                        const Matrix& targets);

struct TrainResult {
    TransformModel model;
    std::vector<double> epoch_losses;  // full-set MSE recorded after each epoch
};

/// Mini-batch RMSprop on the MSE objective. Batches come from a seeded
/// permutation per epoch; a short final batch is kept. Throws a divergence
/// error naming the epoch if the loss stops being finite.
TrainResult train(TransformModel model, const Matrix& inputs, const Matrix& targets,
                  const TrainConfig& config);

}  // namespace ceq
