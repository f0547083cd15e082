// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ceq/classifier.hpp"
#include "ceq/dataset.hpp"
#include "ceq/equilibrium.hpp"
#include "ceq/transform.hpp"

namespace ceq {

enum class Split { train, test };
enum class ErcMode { off, on, both };

/// Everything the four pipeline commands need. CLI flags and config files
/// both populate this.
struct PipelineConfig {
    // Training data: either an IDX pair or a CSV.
    std::string train_images;
    std::string train_labels;
    std::string train_csv;
    // Test data, same alternatives.
    std::string test_images;
    std::string test_labels;
    std::string test_csv;
    int label_column = -1;  // CSV label column; -1 means last

    int resolution = 0;     // target side: 8, 16, or 0 for native
    int source_side = 0;    // 0 infers a square side from d / channels
    int channels = 1;

    std::string dataset_kind = "other";  // cifar10|mnist|fmnist|norb|other
    double k = 0.0;                      // 0 picks the per-dataset default

    SolverConfig solver;
    std::vector<std::size_t> hidden;  // empty selects 4d, d, 4d
    std::size_t epochs = 30;
    std::size_t batch_size = 64;
    std::string learning_rate = "1e-4:20,1e-5:10";  // rate[:epochs][,rate:epochs...]
    double rms_decay = 0.9;
    double rms_epsilon = 1e-8;

    ErcMode erc_mode = ErcMode::both;
    bool erc_direct = false;
    bool spread_weighted_classify = false;
    bool include_timing = true;
    bool per_sample = false;

    std::uint64_t seed = 0;
    std::size_t max_train = 0;  // 0 keeps everything
    std::size_t max_test = 0;

    std::string model_dir;
};

/// Artifact names inside a model directory.
namespace artifact_names {
inline constexpr const char* summaries = "summaries.txt";
inline constexpr const char* equilibrium = "equilibrium.txt";
inline constexpr const char* projected = "projected.csv";
inline constexpr const char* checkpoint = "checkpoint.txt";
inline constexpr const char* loss_history = "loss_history.txt";
inline constexpr const char* report_no_erc = "report_no_erc.json";
inline constexpr const char* report_erc = "report_erc.json";
}  // namespace artifact_names

/// Default Coulomb constant per dataset kind and resolution.
double default_k(const std::string& dataset_kind, int resolution);

/// Parses "rate" or "rate:epochs,rate:epochs,..." into schedule phases
/// covering exactly `epochs`.
std::vector<LearningRatePhase> parse_learning_rate(const std::string& text,
                                                   std::size_t epochs);

/// Loads, optionally resizes, and optionally subsamples one data split.
LabeledDataset load_split(const PipelineConfig& config, Split split);

struct FitOutcome {
    std::size_t class_count = 0;
    std::size_t dim = 0;
    bool converged = false;
    std::size_t iterations = 0;
    double final_total_force = 0.0;
};
/// load -> resize -> partition -> summarize -> solve -> project; writes the
/// summary table, the equilibrium model, and the projected training set.
FitOutcome cmd_fit(const PipelineConfig& config);

struct TrainOutcome {
    std::size_t epochs = 0;
    std::optional<double> final_loss;
};
/// Trains the regressor on (input rows -> projected rows) and writes the
/// checkpoint plus the loss history.
TrainOutcome cmd_train(const PipelineConfig& config);

struct EvaluateOutcome {
    std::optional<ClassificationReport> without_erc;
    std::optional<ClassificationReport> with_erc;
};
/// Classifies the test split with ERC off and/or on and writes one report
/// JSON per variant.
EvaluateOutcome cmd_evaluate(const PipelineConfig& config);

/// Writes equilibrium-space coordinates for one split (projected training
/// rows, or transformed + optionally ERC-corrected test rows). Returns the
/// path written.
std::string cmd_export(const PipelineConfig& config, Split split);

}  // namespace ceq
