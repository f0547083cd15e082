// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ceq/dataset.hpp"
#include "ceq/equilibrium.hpp"
#include "ceq/erc.hpp"
#include "ceq/transform.hpp"

namespace ceq {

struct PhaseTiming {
    double transform_seconds = 0.0;
    double erc_seconds = 0.0;
    double force_seconds = 0.0;
};

/// Evaluation output: predictions in input order, per-sample force magnitudes
/// against every class charge, a confusion matrix, and wall-clock timing per
/// phase. Samples whose transform output is non-finite are recorded as
/// prediction -1, count against accuracy, and stay out of the confusion
/// matrix (n_failures tracks them).
struct ClassificationReport {
    std::vector<int> predictions;
    std::vector<int> true_labels;
    std::optional<double> accuracy;           // absent when N == 0
    std::vector<std::size_t> confusion;       // n x n, row-major, [true][predicted]
    Matrix per_sample_forces;                 // N x n
    bool erc_used = false;
    PhaseTiming timing;
    std::size_t n_failures = 0;
    int class_count = 0;
};

struct ClassifyOptions {
    bool use_erc = false;
    /// Use ERC's chosen class directly instead of re-running the force argmax
    /// on the corrected position.
    bool erc_direct = false;
    /// Scale the attraction by the class spread vector (off by default; the
    /// equilibrium solve is always spread-weighted, classification is not).
    bool spread_weighted = false;
};

/// Assigns a point (already in equilibrium space) to the class pulling on it
/// hardest. Ties break to the lowest class id; a coincident point's +infinity
/// pull wins outright.
std::pair<int, std::vector<double>> classify_point(
    std::span<const double> equilibrium_point, const EquilibriumModel& model,
    SpreadWeighting weighting = SpreadWeighting::none);

/// Transforms, optionally ERC-corrects, and force-classifies every test row.
ClassificationReport classify_dataset(const LabeledDataset& test,
                                      const TransformModel& transform,
                                      const EquilibriumModel& model,
                                      const ClassifyOptions& options = {});

/// accuracy recomputed as trace(confusion) / N; nullopt when N == 0.
std::optional<double> accuracy_from_confusion(const ClassificationReport& report);

}  // namespace ceq
