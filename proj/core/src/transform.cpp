// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ceq/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ceq/error.hpp"
#include "ceq/rng.hpp"

namespace ceq {
namespace {

void check_pair_shapes(const Matrix& inputs, const Matrix& targets,
                       const TransformModel& model) {
    if (inputs.rows() != targets.rows() || inputs.cols() != targets.cols()) {
        throw Error(ErrorKind::shape, "transform",
                    "inputs and targets must be row-aligned with equal width");
    }
    if (inputs.cols() != model.dim()) {
        throw Error(ErrorKind::shape, "transform",
                    "data dimensionality does not match the model");
    }
}

/// Activations for a batch: acts[0] is the input, acts[l+1] the output of
/// layer l (rectified except for the last layer).
std::vector<Matrix> forward_batch(const TransformModel& model, const Matrix& batch) {
    std::vector<Matrix> acts;
    acts.reserve(model.weights.size() + 1);
    acts.push_back(batch);
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        const Matrix& W = model.weights[l];
        const auto& b = model.biases[l];
        const Matrix& in = acts.back();
        Matrix out(in.rows(), W.rows());
        const bool hidden = l + 1 < model.weights.size();
        for (std::size_t i = 0; i < in.rows(); ++i) {
            const auto x = in.row(i);
            auto y = out.row(i);
            for (std::size_t r = 0; r < W.rows(); ++r) {
                double z = b[r];
                const auto w = W.row(r);
                for (std::size_t c = 0; c < w.size(); ++c) z += w[c] * x[c];
                y[r] = hidden ? std::max(z, 0.0) : z;
            }
        }
        acts.push_back(std::move(out));
    }
    return acts;
}

/// Backpropagates d(MSE)/d(output) through the stored activations and
/// accumulates parameter gradients.
Gradients backward_batch(const TransformModel& model, const std::vector<Matrix>& acts,
                         const Matrix& targets, std::size_t total_rows) {
    const std::size_t layers = model.weights.size();
    const std::size_t rows = acts[0].rows();
    const std::size_t d = model.layer_sizes.back();

    Gradients grads;
    grads.weights.reserve(layers);
    grads.biases.reserve(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        grads.weights.emplace_back(model.weights[l].rows(), model.weights[l].cols());
        grads.biases.emplace_back(model.biases[l].size(), 0.0);
    }

    // MSE = 1/(N*d) sum |out - y|^2, so d/d(out) = 2 (out - y) / (N*d).
    const double scale = 2.0 / (static_cast<double>(total_rows) * d);
    Matrix delta(rows, d);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto out = acts.back().row(i);
        const auto y = targets.row(i);
        auto dl = delta.row(i);
        for (std::size_t j = 0; j < d; ++j) dl[j] = scale * (out[j] - y[j]);
    }

    for (std::size_t l = layers; l-- > 0;) {
        const Matrix& below = acts[l];
        Matrix& gW = grads.weights[l];
        auto& gb = grads.biases[l];
        for (std::size_t i = 0; i < rows; ++i) {
            const auto dl = delta.row(i);
            const auto x = below.row(i);
            for (std::size_t r = 0; r < gW.rows(); ++r) {
                gb[r] += dl[r];
                auto grow = gW.row(r);
                for (std::size_t c = 0; c < grow.size(); ++c) grow[c] += dl[r] * x[c];
            }
        }
        if (l == 0) break;
        const Matrix& W = model.weights[l];
        Matrix next(rows, W.cols());
        for (std::size_t i = 0; i < rows; ++i) {
            const auto dl = delta.row(i);
            const auto act = acts[l].row(i);  // rectified output of layer l-1
            auto nd = next.row(i);
            for (std::size_t c = 0; c < W.cols(); ++c) {
                double s = 0.0;
                for (std::size_t r = 0; r < W.rows(); ++r) s += W(r, c) * dl[r];
                nd[c] = act[c] > 0.0 ? s : 0.0;
            }
        }
        delta = std::move(next);
    }
    return grads;
}

}  // namespace

std::size_t TransformModel::parameter_count() const {
    std::size_t count = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        count += weights[l].rows() * weights[l].cols() + biases[l].size();
    }
    return count;
}

std::vector<std::size_t> default_hidden_widths(std::size_t d) {
    return {4 * d, d, 4 * d};
}

TransformModel init_model(std::size_t d, const std::vector<std::size_t>& hidden,
                          std::uint64_t seed) {
    if (d == 0) {
        throw Error(ErrorKind::domain, "transform", "dimensionality must be positive");
    }
    for (const std::size_t h : hidden) {
        if (h == 0) {
            throw Error(ErrorKind::domain, "transform", "hidden widths must be positive");
        }
    }
    TransformModel model;
    model.layer_sizes.push_back(d);
    model.layer_sizes.insert(model.layer_sizes.end(), hidden.begin(), hidden.end());
    model.layer_sizes.push_back(d);

    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
        const std::size_t fan_in = model.layer_sizes[l];
        const std::size_t fan_out = model.layer_sizes[l + 1];
        const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix W(fan_out, fan_in);
        for (double& w : W.data()) w = rng.uniform(-a, a);
        model.weights.push_back(std::move(W));
        model.biases.emplace_back(fan_out, 0.0);
    }
    return model;
}

std::vector<double> forward(const TransformModel& model, std::span<const double> x) {
    if (x.size() != model.dim()) {
        throw Error(ErrorKind::shape, "transform",
                    "input length does not match the model dimensionality");
    }
    std::vector<double> current(x.begin(), x.end());
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        const Matrix& W = model.weights[l];
        const auto& b = model.biases[l];
        const bool hidden = l + 1 < model.weights.size();
        std::vector<double> next(W.rows());
        for (std::size_t r = 0; r < W.rows(); ++r) {
            double z = b[r];
            const auto w = W.row(r);
            for (std::size_t c = 0; c < w.size(); ++c) z += w[c] * current[c];
            next[r] = hidden ? std::max(z, 0.0) : z;
        }
        current = std::move(next);
    }
    return current;
}

Matrix forward_all(const TransformModel& model, const Matrix& X) {
    if (X.cols() != model.dim()) {
        throw Error(ErrorKind::shape, "transform",
                    "input width does not match the model dimensionality");
    }
    return forward_batch(model, X).back();
}

double mse_loss(const TransformModel& model, const Matrix& inputs,
                const Matrix& targets) {
    check_pair_shapes(inputs, targets, model);
    const Matrix out = forward_all(model, inputs);
    double sum = 0.0;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        sum += squared_distance(out.row(i), targets.row(i));
    }
    return sum / (static_cast<double>(inputs.rows()) * inputs.cols());
}

Gradients mse_gradients(const TransformModel& model, const Matrix& inputs,
                        const Matrix& targets) {
    check_pair_shapes(inputs, targets, model);
    const auto acts = forward_batch(model, inputs);
    return backward_batch(model, acts, targets, inputs.rows());
}

TrainResult train(TransformModel model, const Matrix& inputs, const Matrix& targets,
                  const TrainConfig& config) {
    check_pair_shapes(inputs, targets, model);
    if (config.batch_size == 0) {
        throw Error(ErrorKind::config, "transform", "batch size must be positive");
    }
    if (config.rms_decay <= 0.0 || config.rms_decay >= 1.0) {
        throw Error(ErrorKind::config, "transform", "RMSprop decay must be in (0, 1)");
    }
    std::size_t scheduled = 0;
    for (const auto& phase : config.schedule) {
        if (phase.rate <= 0.0) {
            throw Error(ErrorKind::config, "transform", "learning rates must be positive");
        }
        scheduled += phase.epochs;
    }
    if (scheduled != config.epochs) {
        throw Error(ErrorKind::config, "transform",
                    "learning rate schedule must cover every epoch exactly once");
    }

    const std::size_t n_rows = inputs.rows();
    std::vector<Matrix> acc_w;
    std::vector<std::vector<double>> acc_b;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        acc_w.emplace_back(model.weights[l].rows(), model.weights[l].cols());
        acc_b.emplace_back(model.biases[l].size(), 0.0);
    }

    TrainResult result;
    Rng rng(config.seed);
    std::size_t phase_index = 0;
    std::size_t phase_consumed = 0;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        while (phase_consumed >= config.schedule[phase_index].epochs) {
            phase_consumed = 0;
            ++phase_index;
        }
        const double lr = config.schedule[phase_index].rate;
        ++phase_consumed;

        const auto order = rng.permutation(n_rows);
        for (std::size_t start = 0; start < n_rows; start += config.batch_size) {
            const std::size_t count = std::min(config.batch_size, n_rows - start);
            Matrix batch_x(count, inputs.cols());
            Matrix batch_y(count, inputs.cols());
            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t src = order[start + i];
                std::copy(inputs.row(src).begin(), inputs.row(src).end(),
                          batch_x.row(i).begin());
                std::copy(targets.row(src).begin(), targets.row(src).end(),
                          batch_y.row(i).begin());
            }
            const auto acts = forward_batch(model, batch_x);
            const Gradients grads = backward_batch(model, acts, batch_y, count);
            for (std::size_t l = 0; l < model.weights.size(); ++l) {
                auto& W = model.weights[l].data();
                const auto& gW = grads.weights[l].data();
                auto& aW = acc_w[l].data();
                for (std::size_t p = 0; p < W.size(); ++p) {
                    aW[p] = config.rms_decay * aW[p] +
                            (1.0 - config.rms_decay) * gW[p] * gW[p];
                    W[p] -= lr * gW[p] / (std::sqrt(aW[p]) + config.rms_epsilon);
                }
                auto& b = model.biases[l];
                const auto& gb = grads.biases[l];
                auto& ab = acc_b[l];
                for (std::size_t p = 0; p < b.size(); ++p) {
                    ab[p] = config.rms_decay * ab[p] +
                            (1.0 - config.rms_decay) * gb[p] * gb[p];
                    b[p] -= lr * gb[p] / (std::sqrt(ab[p]) + config.rms_epsilon);
                }
            }
        }

        const double loss = mse_loss(model, inputs, targets);
        if (!std::isfinite(loss)) {
            throw Error(ErrorKind::divergence, "transform",
                        "training diverged at epoch " + std::to_string(epoch));
        }
        result.epoch_losses.push_back(loss);
    }

    result.model = std::move(model);
    return result;
}

}  // namespace ceq
