// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ceq/equilibrium.hpp"

namespace ceq {

/// Spearman rank correlation with average ranks for ties. Returns nullopt
/// when either vector is constant (zero rank variance), which callers treat
/// as minus infinity when ranking candidates.
std::optional<double> spearman(std::span<const double> u, std::span<const double> v);

/// Outcome of snapping a regressor output onto the most rank-correlated
/// class-shift candidate. correlations holds NaN for undefined entries.
struct ErcDecision {
    int chosen_class = 0;
    std::vector<double> correlations;
    std::vector<double> corrected_position;
    bool fallback = false;  // every correlation undefined; output left unsnapped
};

/// For each class i, builds the candidate input + delta_i and correlates it
/// against the transformed point; the winning candidate (ties to the lowest
/// class id) becomes the corrected position.
ErcDecision erc_correct(std::span<const double> input_point,
                        std::span<const double> transformed_point,
                        const EquilibriumModel& model);

}  // namespace ceq
