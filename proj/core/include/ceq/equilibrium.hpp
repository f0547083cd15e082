// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "ceq/electrostatics.hpp"
#include "ceq/matrix.hpp"
#include "ceq/summaries.hpp"

namespace ceq {

struct SolverConfig {
    double tolerance = 1e-4;          // stop when sum(|F_i|) drops to this
    std::size_t max_iterations = 10000;
    double initial_step = 0.1;
    double step_decay = 0.5;          // step shrink on rejection, growth on accept
    double jitter_scale = 1e-6;       // seeded perturbation for coincident starts
    std::uint64_t seed = 0;
};

/// Result of relaxing the charge system until the total force is below
/// tolerance. Deltas are the per-class translations that carry class data
/// into the equilibrium space.
struct EquilibriumModel {
    Matrix equilibrium_positions;        // n x d
    Matrix deltas;                       // n x d, equilibrium - input position
    std::vector<ClassSummary> summaries; // input summaries, by class id
    double k = 1.0;
    double tolerance = 0.0;
    double final_total_force = 0.0;
    std::size_t iterations_used = 0;
    bool converged = false;
    std::vector<double> force_history;   // accepted totals, strictly decreasing

    std::size_t class_count() const { return equilibrium_positions.rows(); }
    std::size_t dim() const { return equilibrium_positions.cols(); }
};

/// Damped force-following relaxation: each accepted step moves every charge
/// along its net (spread-weighted) force and must strictly decrease the total
/// force magnitude; rejected steps shrink the step size, accepted ones grow
/// it back. Positions are re-centered onto the input centroid afterwards,
/// which no force term can observe. A single class is already in equilibrium.
EquilibriumModel solve_equilibrium(const std::vector<ClassSummary>& summaries, double k,
                                   const SolverConfig& config);

/// Translates every row of class i by delta_i. A pure per-class translation:
/// within-class distances and spreads are untouched.
std::vector<Matrix> project_classes(const std::vector<Matrix>& classes,
                                    const EquilibriumModel& model);

}  // namespace ceq
