// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "ceq/classifier.hpp"
#include "ceq/equilibrium.hpp"
#include "ceq/summaries.hpp"
#include "ceq/transform.hpp"

namespace ceq {

/// Every artifact is plain text, begins with a format-version line, carries
/// floats at 17 significant digits (lossless for doubles), and is written
/// atomically (temp file + rename). Loaders reject unknown version lines.

std::string format_double(double value);

void write_summaries(const std::vector<ClassSummary>& summaries,
                     const std::string& path);
/// Counts are not persisted in the summary table; reloaded summaries carry
/// count = 0.
std::vector<ClassSummary> read_summaries(const std::string& path);

void write_equilibrium(const EquilibriumModel& model, const std::string& path);
/// Reads the solver artifact; `summaries_path` refills the charge summaries.
EquilibriumModel read_equilibrium(const std::string& path,
                                  const std::string& summaries_path);

void write_checkpoint(const TransformModel& model, std::uint64_t seed,
                      const std::vector<double>& epoch_losses,
                      const std::string& path);
struct Checkpoint {
    TransformModel model;
    std::uint64_t seed = 0;
    std::vector<double> epoch_losses;
};
Checkpoint read_checkpoint(const std::string& path);

void write_loss_history(const std::vector<double>& epoch_losses,
                        const std::string& path);

/// Equilibrium-space coordinates as CSV: a version comment line, a header
/// row, then `label,e_1,...,e_d` rows.
void write_embedding_csv(const Matrix& points, const std::vector<int>& labels,
                         const std::string& path);
struct Embedding {
    Matrix points;
    std::vector<int> labels;
};
Embedding read_embedding_csv(const std::string& path);

/// Classification report as JSON. Timing is the one run-dependent field, so
/// it can be omitted for byte-reproducible output. per_sample gates the
/// N x n force matrix.
void write_report_json(const ClassificationReport& report, const std::string& path,
                       bool include_timing = true, bool per_sample = false);

}  // namespace ceq
