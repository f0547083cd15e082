// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ceq/erc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ceq/error.hpp"

namespace ceq {
namespace {

/// Average ranks (1-based): tied runs share the mean of their rank span.
std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> pearson(const std::vector<double>& a,
                              const std::vector<double>& b) {
    const std::size_t n = a.size();
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);

    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) return std::nullopt;
    return cov / std::sqrt(var_a * var_b);
}

}  // namespace

std::optional<double> spearman(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw Error(ErrorKind::shape, "erc", "vectors must have equal length");
    }
    if (u.size() < 2) {
        throw Error(ErrorKind::domain, "erc", "rank correlation needs d >= 2");
    }
    return pearson(average_ranks(u), average_ranks(v));
}

ErcDecision erc_correct(std::span<const double> input_point,
                        std::span<const double> transformed_point,
                        const EquilibriumModel& model) {
    const std::size_t d = model.dim();
    if (input_point.size() != d || transformed_point.size() != d) {
        throw Error(ErrorKind::shape, "erc",
                    "point dimensionality does not match the equilibrium model");
    }
    const std::size_t n = model.class_count();

    ErcDecision decision;
    decision.correlations.assign(n, std::numeric_limits<double>::quiet_NaN());

    int best = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<double> candidate(d);
    for (std::size_t c = 0; c < n; ++c) {
        const auto delta = model.deltas.row(c);
        for (std::size_t m = 0; m < d; ++m) candidate[m] = input_point[m] + delta[m];
        const auto corr = spearman(transformed_point, candidate);
        if (!corr) continue;  // undefined: excluded from the argmax
        decision.correlations[c] = *corr;
        if (*corr > best_value) {
            best_value = *corr;
            best = static_cast<int>(c);
        }
    }

    if (best < 0) {
        decision.fallback = true;
        decision.chosen_class = 0;
        decision.corrected_position.assign(transformed_point.begin(),
                                           transformed_point.end());
        return decision;
    }

    decision.chosen_class = best;
    decision.corrected_position.resize(d);
    const auto delta = model.deltas.row(static_cast<std::size_t>(best));
    for (std::size_t m = 0; m < d; ++m) {
        decision.corrected_position[m] = input_point[m] + delta[m];
    }
    return decision;
}

}  // namespace ceq
