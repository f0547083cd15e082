// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "ceq/matrix.hpp"

namespace ceq {

/// Per-class charge summary: the class behaves as a point charge sitting at
/// the class mean. The charge magnitude is the mean of the per-dimension
/// population variances and the spread vector keeps those variances
/// individually for direction-dependent force weighting.
struct ClassSummary {
    int class_id = 0;
    double charge = 0.0;
    std::vector<double> position;  // column means, d entries
    std::vector<double> spread;    // per-dimension population variance, d entries
    std::size_t count = 0;         // 0 when reloaded from disk (not persisted)

    /// Single-sample classes have zero spread and therefore zero charge.
    bool degenerate() const { return charge == 0.0; }
};

ClassSummary summarize_class(const Matrix& points, int class_id);

/// One summary per class, ordered by class id. Any empty class is an error.
std::vector<ClassSummary> summarize_all(const std::vector<Matrix>& classes);

}  // namespace ceq
