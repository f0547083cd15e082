// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ceq/electrostatics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ceq/error.hpp"

namespace ceq {
namespace {

void check_indices(const ChargeSystem& system, std::size_t i, std::size_t j) {
    if (i == j || i >= system.charges.size() || j >= system.charges.size()) {
        throw Error(ErrorKind::domain, "electrostatics", "invalid charge pair");
    }
}

}  // namespace

ChargeSystem make_charge_system(const std::vector<ClassSummary>& summaries, double k) {
    if (k <= 0.0) {
        throw Error(ErrorKind::config, "electrostatics", "k must be positive");
    }
    ChargeSystem system;
    system.k = k;
    system.charges.reserve(summaries.size());
    for (const auto& s : summaries) {
        if (s.charge <= 0.0) {
            throw Error(ErrorKind::domain, "electrostatics",
                        "class " + std::to_string(s.class_id) +
                            " has zero charge (degenerate spread)");
        }
        system.charges.push_back(PointCharge{s.charge, s.position, s.spread});
    }
    return system;
}

std::vector<double> pairwise_force(const ChargeSystem& system, std::size_t i,
                                   std::size_t j, SpreadWeighting weighting) {
    check_indices(system, i, j);
    const PointCharge& a = system.charges[i];
    const PointCharge& b = system.charges[j];
    const std::size_t d = a.position.size();

    double dist2 = 0.0;
    std::vector<double> force(d);
    for (std::size_t m = 0; m < d; ++m) {
        force[m] = a.position[m] - b.position[m];
        dist2 += force[m] * force[m];
    }
    const double dist = std::sqrt(dist2);
    if (dist < kMinSeparation) {
        throw Error(ErrorKind::singularity, "electrostatics",
                    "charges " + std::to_string(i) + " and " + std::to_string(j) +
                        " are coincident");
    }
    // (Qa * Qb) groups first so the i<->j swap yields the bitwise negation.
    const double scale = system.k * (a.magnitude * b.magnitude) / (dist2 * dist);
    for (std::size_t m = 0; m < d; ++m) {
        force[m] *= scale;
        if (weighting == SpreadWeighting::source) force[m] *= b.spread[m];
    }
    return force;
}

ForceState net_forces(const ChargeSystem& system, SpreadWeighting weighting) {
    const std::size_t n = system.charges.size();
    const std::size_t d = n == 0 ? 0 : system.charges[0].position.size();
    ForceState state;
    state.per_charge_force = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        auto total = state.per_charge_force.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const auto f = pairwise_force(system, i, j, weighting);
            for (std::size_t m = 0; m < d; ++m) total[m] += f[m];
        }
        state.total_magnitude += l2_norm(total);
    }
    return state;
}

double attraction_magnitude(std::span<const double> test_position,
                            const ClassSummary& summary,
                            std::span<const double> equilibrium_position, double k,
                            SpreadWeighting weighting) {
    const std::size_t d = test_position.size();
    double dist2 = 0.0;
    for (std::size_t m = 0; m < d; ++m) {
        const double diff = test_position[m] - equilibrium_position[m];
        dist2 += diff * diff;
    }
    const double dist = std::sqrt(dist2);
    if (dist < kMinSeparation) {
        // On top of the class charge: treated as a maximal pull.
        return std::numeric_limits<double>::infinity();
    }
    if (weighting == SpreadWeighting::none) {
        return k * summary.charge / dist2;
    }
    double norm2 = 0.0;
    const double scale = k * summary.charge / (dist2 * dist);
    for (std::size_t m = 0; m < d; ++m) {
        const double component =
            scale * (test_position[m] - equilibrium_position[m]) * summary.spread[m];
        norm2 += component * component;
    }
    return std::sqrt(norm2);
}

}  // namespace ceq
