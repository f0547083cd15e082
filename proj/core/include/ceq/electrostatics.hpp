// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "ceq/matrix.hpp"
#include "ceq/summaries.hpp"

namespace ceq {

/// Charges closer than this are treated as coincident by the force kernel.
inline constexpr double kMinSeparation = 1e-9;

struct PointCharge {
    double magnitude = 0.0;        // Q, must be > 0 inside a ChargeSystem
    std::vector<double> position;  // d entries
    std::vector<double> spread;    // d entries, weights the force this charge exerts
};

struct ChargeSystem {
    std::vector<PointCharge> charges;
    double k = 1.0;
};

/// Whether a pairwise force is scaled elementwise by the source charge's
/// spread vector. The equilibrium objective uses the weighted form; test-point
/// attraction uses the unweighted form by default.
enum class SpreadWeighting { none, source };

/// Net force per charge plus the system objective sum(|F_i|).
struct ForceState {
    Matrix per_charge_force;      // n x d
    double total_magnitude = 0.0;
};

/// Builds a system from class summaries, rejecting zero charges (a class with
/// no spread neither feels nor exerts force and cannot reach equilibrium).
ChargeSystem make_charge_system(const std::vector<ClassSummary>& summaries, double k);

/// Repulsive force on charge i due to charge j:
/// k * Q_i * Q_j * (R_i - R_j) / |R_i - R_j|^3, optionally scaled by S_j.
std::vector<double> pairwise_force(const ChargeSystem& system, std::size_t i,
                                   std::size_t j, SpreadWeighting weighting);

/// F_i = sum over j != i of pairwise_force(i, j), accumulated in ascending j
/// order so results are bit-reproducible.
ForceState net_forces(const ChargeSystem& system, SpreadWeighting weighting);

/// Magnitude of the pull a unit test charge feels from one class charge:
/// k * Q / distance^2. A coincident test point returns +infinity, which the
/// classifier treats as an outright win. The weighted variant returns the
/// norm of the spread-scaled force vector instead.
double attraction_magnitude(std::span<const double> test_position,
                            const ClassSummary& summary,
                            std::span<const double> equilibrium_position, double k,
                            SpreadWeighting weighting = SpreadWeighting::none);

}  // namespace ceq
