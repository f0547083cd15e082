// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ceq/summaries.hpp"

#include "ceq/error.hpp"

namespace ceq {

ClassSummary summarize_class(const Matrix& points, int class_id) {
    const std::size_t m = points.rows();
    const std::size_t d = points.cols();
    if (m == 0 || d == 0) {
        throw Error(ErrorKind::domain, "summaries",
                    "cannot summarize an empty class (id " +
                        std::to_string(class_id) + ")");
    }

    ClassSummary summary;
    summary.class_id = class_id;
    summary.count = m;
    summary.position.assign(d, 0.0);
    summary.spread.assign(d, 0.0);

    for (std::size_t i = 0; i < m; ++i) {
        const auto row = points.row(i);
        for (std::size_t j = 0; j < d; ++j) summary.position[j] += row[j];
    }
    for (std::size_t j = 0; j < d; ++j) summary.position[j] /= static_cast<double>(m);

    // Population variance (divide by m): defined for single-sample classes.
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = points.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = row[j] - summary.position[j];
            summary.spread[j] += dev * dev;
        }
    }
    double charge = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        summary.spread[j] /= static_cast<double>(m);
        charge += summary.spread[j];
    }
    summary.charge = charge / static_cast<double>(d);
    return summary;
}

std::vector<ClassSummary> summarize_all(const std::vector<Matrix>& classes) {
    std::vector<ClassSummary> summaries;
    summaries.reserve(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        summaries.push_back(summarize_class(classes[c], static_cast<int>(c)));
    }
    return summaries;
}

}  // namespace ceq
