// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ceq/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ceq/error.hpp"
#include "ceq/rng.hpp"

namespace ceq {
namespace {

bool any_coincident(const ChargeSystem& system) {
    const std::size_t n = system.charges.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (euclidean_distance(system.charges[i].position,
                                   system.charges[j].position) < kMinSeparation) {
                return true;
            }
        }
    }
    return false;
}

void recenter(ChargeSystem& system, const std::vector<double>& target_centroid) {
    const std::size_t n = system.charges.size();
    const std::size_t d = target_centroid.size();
    std::vector<double> centroid(d, 0.0);
    for (const auto& charge : system.charges) {
        for (std::size_t m = 0; m < d; ++m) centroid[m] += charge.position[m];
    }
    for (std::size_t m = 0; m < d; ++m) centroid[m] /= static_cast<double>(n);
    for (auto& charge : system.charges) {
        for (std::size_t m = 0; m < d; ++m) {
            charge.position[m] += target_centroid[m] - centroid[m];
        }
    }
}

}  // namespace

EquilibriumModel solve_equilibrium(const std::vector<ClassSummary>& summaries, double k,
                                   const SolverConfig& config) {
    if (summaries.empty()) {
        throw Error(ErrorKind::domain, "equilibrium", "no classes to solve");
    }
    if (config.tolerance <= 0.0 || config.step_decay <= 0.0 ||
        config.step_decay >= 1.0 || config.max_iterations == 0 ||
        config.initial_step <= 0.0 || config.jitter_scale < 0.0) {
        throw Error(ErrorKind::config, "equilibrium", "invalid solver configuration");
    }

    const std::size_t n = summaries.size();
    const std::size_t d = summaries[0].position.size();

    EquilibriumModel model;
    model.summaries = summaries;
    model.k = k;
    model.tolerance = config.tolerance;

    if (n == 1) {
        model.equilibrium_positions = Matrix(1, d);
        std::copy(summaries[0].position.begin(), summaries[0].position.end(),
                  model.equilibrium_positions.row(0).begin());
        model.deltas = Matrix(1, d, 0.0);
        model.final_total_force = 0.0;
        model.converged = true;
        model.force_history = {0.0};
        return model;
    }

    ChargeSystem system = make_charge_system(summaries, k);

    if (any_coincident(system)) {
        Rng rng(config.seed);
        for (auto& charge : system.charges) {
            for (auto& x : charge.position) {
                x += rng.uniform(-config.jitter_scale, config.jitter_scale);
            }
        }
        // A zero jitter scale cannot separate anything; let the kernel report it.
    }

    std::vector<double> input_centroid(d, 0.0);
    for (const auto& s : summaries) {
        for (std::size_t m = 0; m < d; ++m) input_centroid[m] += s.position[m];
    }
    for (std::size_t m = 0; m < d; ++m) input_centroid[m] /= static_cast<double>(n);

    ForceState state = net_forces(system, SpreadWeighting::source);
    model.force_history.push_back(state.total_magnitude);

    double step = config.initial_step;
    std::size_t iterations = 0;
    ChargeSystem candidate = system;

    while (iterations < config.max_iterations) {
        // Relax until below tolerance, then re-center and confirm the final
        // value there; the translation cannot change it beyond rounding.
        while (state.total_magnitude > config.tolerance &&
               iterations < config.max_iterations) {
            ++iterations;
            for (std::size_t i = 0; i < n; ++i) {
                const auto force = state.per_charge_force.row(i);
                auto& dst = candidate.charges[i].position;
                const auto& src = system.charges[i].position;
                for (std::size_t m = 0; m < d; ++m) {
                    dst[m] = src[m] + step * force[m];
                }
            }
            bool accepted = false;
            try {
                ForceState next = net_forces(candidate, SpreadWeighting::source);
                if (std::isfinite(next.total_magnitude) &&
                    next.total_magnitude < state.total_magnitude &&
                    next.total_magnitude < model.force_history.back()) {
                    for (std::size_t i = 0; i < n; ++i) {
                        system.charges[i].position = candidate.charges[i].position;
                    }
                    state = std::move(next);
                    model.force_history.push_back(state.total_magnitude);
                    accepted = true;
                }
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::singularity) throw;
                // A step that collapses two charges is just a bad step.
            }
            step = accepted ? step / config.step_decay : step * config.step_decay;
        }
        recenter(system, input_centroid);
        state = net_forces(system, SpreadWeighting::source);
        if (state.total_magnitude <= config.tolerance ||
            iterations >= config.max_iterations) {
            break;
        }
    }

    model.iterations_used = iterations;
    model.final_total_force = state.total_magnitude;
    model.converged = state.total_magnitude <= config.tolerance;

    model.equilibrium_positions = Matrix(n, d);
    model.deltas = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        auto pos = model.equilibrium_positions.row(i);
        auto delta = model.deltas.row(i);
        for (std::size_t m = 0; m < d; ++m) {
            pos[m] = system.charges[i].position[m];
            delta[m] = pos[m] - summaries[i].position[m];
        }
    }
    return model;
}

std::vector<Matrix> project_classes(const std::vector<Matrix>& classes,
                                    const EquilibriumModel& model) {
    if (classes.size() != model.class_count()) {
        throw Error(ErrorKind::shape, "equilibrium",
                    "class count does not match the equilibrium model");
    }
    std::vector<Matrix> projected;
    projected.reserve(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (classes[c].rows() > 0 && classes[c].cols() != model.dim()) {
            throw Error(ErrorKind::shape, "equilibrium",
                        "class dimensionality does not match the equilibrium model");
        }
        const auto delta = model.deltas.row(c);
        Matrix out(classes[c].rows(), classes[c].cols());
        for (std::size_t i = 0; i < classes[c].rows(); ++i) {
            const auto src = classes[c].row(i);
            auto dst = out.row(i);
            for (std::size_t m = 0; m < src.size(); ++m) dst[m] = src[m] + delta[m];
        }
        projected.push_back(std::move(out));
    }
    return projected;
}

}  // namespace ceq
