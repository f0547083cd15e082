// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ceq/classifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ceq/error.hpp"

namespace ceq {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool all_finite(std::span<const double> v) {
    for (const double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

std::pair<int, std::vector<double>> classify_point(
    std::span<const double> equilibrium_point, const EquilibriumModel& model,
    SpreadWeighting weighting) {
    if (equilibrium_point.size() != model.dim()) {
        throw Error(ErrorKind::shape, "classifier",
                    "point dimensionality does not match the equilibrium model");
    }
    const std::size_t n = model.class_count();
    std::vector<double> forces(n);
    int best = 0;
    for (std::size_t c = 0; c < n; ++c) {
        forces[c] = attraction_magnitude(equilibrium_point, model.summaries[c],
                                         model.equilibrium_positions.row(c), model.k,
                                         weighting);
        if (forces[c] > forces[best]) best = static_cast<int>(c);
    }
    return {best, std::move(forces)};
}

ClassificationReport classify_dataset(const LabeledDataset& test,
                                      const TransformModel& transform,
                                      const EquilibriumModel& model,
                                      const ClassifyOptions& options) {
    if (test.size() > 0 && test.dim() != model.dim()) {
        throw Error(ErrorKind::shape, "classifier",
                    "test dimensionality does not match the equilibrium model");
    }
    const std::size_t n_samples = test.size();
    const std::size_t n = model.class_count();
    for (const int label : test.labels) {
        if (static_cast<std::size_t>(label) >= n) {
            throw Error(ErrorKind::consistency, "classifier",
                        "test label outside the model's class range");
        }
    }
    const auto weighting =
        options.spread_weighted ? SpreadWeighting::source : SpreadWeighting::none;

    ClassificationReport report;
    report.erc_used = options.use_erc;
    report.class_count = static_cast<int>(n);
    report.true_labels = test.labels;
    report.predictions.assign(n_samples, -1);
    report.confusion.assign(n * n, 0);
    report.per_sample_forces = Matrix(n_samples, n);

    // Phase 1: regress every sample into equilibrium space.
    Matrix points(n_samples, model.dim());
    {
        const auto start = Clock::now();
        points = forward_all(transform, test.features);
        report.timing.transform_seconds = seconds_since(start);
    }

    std::vector<bool> failed(n_samples, false);
    for (std::size_t i = 0; i < n_samples; ++i) {
        if (!all_finite(points.row(i))) failed[i] = true;
    }

    // Phase 2: snap each output onto its best rank-correlated candidate.
    std::vector<int> erc_class(n_samples, -1);
    if (options.use_erc) {
        const auto start = Clock::now();
        for (std::size_t i = 0; i < n_samples; ++i) {
            if (failed[i]) continue;
            const auto decision =
                erc_correct(test.features.row(i), points.row(i), model);
            erc_class[i] = decision.chosen_class;
            auto dst = points.row(i);
            std::copy(decision.corrected_position.begin(),
                      decision.corrected_position.end(), dst.begin());
        }
        report.timing.erc_seconds = seconds_since(start);
    }

    // Phase 3: force argmax.
    {
        const auto start = Clock::now();
        for (std::size_t i = 0; i < n_samples; ++i) {
            if (failed[i]) {
                ++report.n_failures;
                continue;
            }
            auto [label, forces] = classify_point(points.row(i), model, weighting);
            if (options.use_erc && options.erc_direct) label = erc_class[i];
            report.predictions[i] = label;
            auto dst = report.per_sample_forces.row(i);
            std::copy(forces.begin(), forces.end(), dst.begin());
        }
        report.timing.force_seconds = seconds_since(start);
    }

    std::size_t correct = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        if (report.predictions[i] < 0) continue;  // failures stay out of the matrix
        ++report.confusion[static_cast<std::size_t>(test.labels[i]) * n +
                           static_cast<std::size_t>(report.predictions[i])];
        if (report.predictions[i] == test.labels[i]) ++correct;
    }
    if (n_samples > 0) {
        report.accuracy = static_cast<double>(correct) / static_cast<double>(n_samples);
    }
    return report;
}

std::optional<double> accuracy_from_confusion(const ClassificationReport& report) {
    if (report.predictions.empty()) return std::nullopt;
    const auto n = static_cast<std::size_t>(report.class_count);
    std::size_t trace = 0;
    for (std::size_t c = 0; c < n; ++c) trace += report.confusion[c * n + c];
    return static_cast<double>(trace) / static_cast<double>(report.predictions.size());
}

}  // namespace ceq
