// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ceq/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>

#include "ceq/artifacts.hpp"
#include "ceq/error.hpp"
#include "ceq/rng.hpp"

namespace ceq {
namespace {

namespace fs = std::filesystem;

// Seed stream tags, one per pipeline stage.
constexpr std::uint64_t kTagSubsetTrain = 1;
constexpr std::uint64_t kTagSubsetTest = 2;
constexpr std::uint64_t kTagSolver = 3;
constexpr std::uint64_t kTagInit = 4;
constexpr std::uint64_t kTagTrain = 5;

std::string join(const std::string& dir, const char* name) {
    return (fs::path(dir) / name).string();
}

void require_model_dir(const PipelineConfig& config) {
    if (config.model_dir.empty()) {
        throw Error(ErrorKind::config, "pipeline", "no model directory configured");
    }
}

double parse_positive_double(const std::string& text, const char* what) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || value <= 0.0) {
        throw Error(ErrorKind::config, "pipeline",
                    std::string("bad ") + what + " \"" + text + "\"");
    }
    return value;
}

TrainConfig make_train_config(const PipelineConfig& config) {
    TrainConfig tc;
    tc.epochs = config.epochs;
    tc.batch_size = config.batch_size;
    tc.schedule = parse_learning_rate(config.learning_rate, config.epochs);
    tc.rms_decay = config.rms_decay;
    tc.rms_epsilon = config.rms_epsilon;
    tc.seed = derive_seed(config.seed, kTagTrain);
    return tc;
}

/// Regressor targets: every training row translated by its class delta,
/// kept in the original row order so inputs and targets stay row-aligned.
Matrix projected_rows(const LabeledDataset& data, const EquilibriumModel& model) {
    const auto classes = partition_by_class(data);
    const auto shifted = project_classes(classes, model);
    std::vector<std::size_t> cursor(classes.size(), 0);
    Matrix rows(data.size(), data.dim());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto c = static_cast<std::size_t>(data.labels[i]);
        const auto src = shifted[c].row(cursor[c]++);
        std::copy(src.begin(), src.end(), rows.row(i).begin());
    }
    return rows;
}

EquilibriumModel read_model(const PipelineConfig& config) {
    return read_equilibrium(join(config.model_dir, artifact_names::equilibrium),
                            join(config.model_dir, artifact_names::summaries));
}

}  // namespace

double default_k(const std::string& dataset_kind, int resolution) {
    if (dataset_kind == "cifar10") {
        if (resolution == 8) return 1.0;
        if (resolution == 16) return 128.0;
        return 2048.0;
    }
    if (dataset_kind == "norb") {
        if (resolution == 8 || resolution == 16) return 1.0;
        return 512.0;
    }
    // mnist, fmnist, and anything unrecognized
    return 1.0;
}

std::vector<LearningRatePhase> parse_learning_rate(const std::string& text,
                                                   std::size_t epochs) {
    if (epochs == 0) return {};
    if (text.empty()) {
        throw Error(ErrorKind::config, "pipeline", "empty learning rate");
    }
    std::vector<LearningRatePhase> phases;
    std::size_t covered = 0;
    std::size_t start = 0;
    bool has_counts = text.find(':') != std::string::npos;
    if (!has_counts) {
        return {{epochs, parse_positive_double(text, "learning rate")}};
    }
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        const std::string part = text.substr(start, end - start);
        const std::size_t colon = part.find(':');
        if (colon == std::string::npos) {
            throw Error(ErrorKind::config, "pipeline",
                        "learning rate phase \"" + part + "\" needs rate:epochs");
        }
        const double rate = parse_positive_double(part.substr(0, colon), "learning rate");
        const double count_raw =
            parse_positive_double(part.substr(colon + 1), "phase epoch count");
        if (count_raw != std::floor(count_raw)) {
            throw Error(ErrorKind::config, "pipeline", "phase epoch count must be integral");
        }
        phases.push_back({static_cast<std::size_t>(count_raw), rate});
        covered += phases.back().epochs;
        if (end == text.size()) break;
        start = end + 1;
    }
    if (covered != epochs) {
        throw Error(ErrorKind::config, "pipeline",
                    "learning rate phases cover " + std::to_string(covered) +
                        " epochs but --epochs is " + std::to_string(epochs));
    }
    return phases;
}

LabeledDataset load_split(const PipelineConfig& config, Split split) {
    const bool is_train = split == Split::train;
    const std::string& csv = is_train ? config.train_csv : config.test_csv;
    const std::string& images = is_train ? config.train_images : config.test_images;
    const std::string& labels = is_train ? config.train_labels : config.test_labels;

    LabeledDataset data = [&] {
        if (!csv.empty()) return load_csv(csv, config.label_column);
        if (!images.empty() && !labels.empty()) return load_idx(images, labels);
        throw Error(ErrorKind::config, "pipeline",
                    std::string("no ") + (is_train ? "training" : "test") +
                        " data configured");
    }();

    if (config.resolution != 0) {
        int side = config.source_side;
        if (side == 0) {
            const double exact =
                std::sqrt(static_cast<double>(data.dim()) / config.channels);
            side = static_cast<int>(std::lround(exact));
            if (std::size_t(side) * std::size_t(side) * config.channels != data.dim()) {
                throw Error(ErrorKind::config, "pipeline",
                            "cannot infer a square image side; pass --source-side");
            }
        }
        data = resize(data, ResizeSpec{config.resolution, side, config.channels});
    }

    const std::size_t cap = is_train ? config.max_train : config.max_test;
    if (cap > 0) {
        data = stratified_subset(
            data, cap,
            derive_seed(config.seed, is_train ? kTagSubsetTrain : kTagSubsetTest));
    }
    return data;
}

FitOutcome cmd_fit(const PipelineConfig& config) {
    require_model_dir(config);
    const LabeledDataset data = load_split(config, Split::train);
    const auto classes = partition_by_class(data);
    const auto summaries = summarize_all(classes);

    const double k =
        config.k > 0.0 ? config.k : default_k(config.dataset_kind, config.resolution);
    SolverConfig solver = config.solver;
    solver.seed = derive_seed(config.seed, kTagSolver);
    const EquilibriumModel model = solve_equilibrium(summaries, k, solver);

    fs::create_directories(config.model_dir);
    write_summaries(summaries, join(config.model_dir, artifact_names::summaries));
    write_equilibrium(model, join(config.model_dir, artifact_names::equilibrium));
    write_embedding_csv(projected_rows(data, model), data.labels,
                        join(config.model_dir, artifact_names::projected));

    return FitOutcome{model.class_count(), model.dim(), model.converged,
                      model.iterations_used, model.final_total_force};
}

TrainOutcome cmd_train(const PipelineConfig& config) {
    require_model_dir(config);
    const LabeledDataset data = load_split(config, Split::train);
    const EquilibriumModel model = read_model(config);
    if (data.dim() != model.dim()) {
        throw Error(ErrorKind::shape, "pipeline",
                    "training data dimensionality does not match the fitted model");
    }
    const Embedding projected =
        read_embedding_csv(join(config.model_dir, artifact_names::projected));
    if (projected.points.rows() != data.size() || projected.labels != data.labels) {
        throw Error(ErrorKind::consistency, "pipeline",
                    "projected training set does not match the training data; "
                    "re-run fit with the same data and flags");
    }

    const auto hidden =
        config.hidden.empty() ? default_hidden_widths(data.dim()) : config.hidden;
    const std::uint64_t init_seed = derive_seed(config.seed, kTagInit);
    TransformModel init = init_model(data.dim(), hidden, init_seed);

    const TrainConfig tc = make_train_config(config);
    TrainResult trained = train(std::move(init), data.features, projected.points, tc);

    // The persisted seed is the initialization seed: together with the layer
    // sizes it reproduces the starting point of this checkpoint.
    write_checkpoint(trained.model, init_seed, trained.epoch_losses,
                     join(config.model_dir, artifact_names::checkpoint));
    write_loss_history(trained.epoch_losses,
                       join(config.model_dir, artifact_names::loss_history));

    TrainOutcome outcome;
    outcome.epochs = trained.epoch_losses.size();
    if (!trained.epoch_losses.empty()) outcome.final_loss = trained.epoch_losses.back();
    return outcome;
}

EvaluateOutcome cmd_evaluate(const PipelineConfig& config) {
    require_model_dir(config);
    const LabeledDataset test = load_split(config, Split::test);
    EquilibriumModel model = read_model(config);
    if (config.k > 0.0) model.k = config.k;  // evaluation-time override
    const Checkpoint ckpt =
        read_checkpoint(join(config.model_dir, artifact_names::checkpoint));

    ClassifyOptions options;
    options.erc_direct = config.erc_direct;
    options.spread_weighted = config.spread_weighted_classify;

    EvaluateOutcome outcome;
    if (config.erc_mode != ErcMode::on) {
        options.use_erc = false;
        outcome.without_erc = classify_dataset(test, ckpt.model, model, options);
        write_report_json(*outcome.without_erc,
                          join(config.model_dir, artifact_names::report_no_erc),
                          config.include_timing, config.per_sample);
    }
    if (config.erc_mode != ErcMode::off) {
        options.use_erc = true;
        outcome.with_erc = classify_dataset(test, ckpt.model, model, options);
        write_report_json(*outcome.with_erc,
                          join(config.model_dir, artifact_names::report_erc),
                          config.include_timing, config.per_sample);
    }
    return outcome;
}

std::string cmd_export(const PipelineConfig& config, Split split) {
    require_model_dir(config);
    const EquilibriumModel model = read_model(config);
    const LabeledDataset data = load_split(config, split);
    if (data.dim() != model.dim()) {
        throw Error(ErrorKind::shape, "pipeline",
                    "data dimensionality does not match the fitted model");
    }

    const char* name = split == Split::train ? "export_train.csv" : "export_test.csv";
    const std::string path = join(config.model_dir, name);

    if (split == Split::train) {
        write_embedding_csv(projected_rows(data, model), data.labels, path);
        return path;
    }

    const Checkpoint ckpt =
        read_checkpoint(join(config.model_dir, artifact_names::checkpoint));
    Matrix points = forward_all(ckpt.model, data.features);
    if (config.erc_mode != ErcMode::off) {
        for (std::size_t i = 0; i < points.rows(); ++i) {
            const auto decision =
                erc_correct(data.features.row(i), points.row(i), model);
            std::copy(decision.corrected_position.begin(),
                      decision.corrected_position.end(), points.row(i).begin());
        }
    }
    write_embedding_csv(points, data.labels, path);
    return path;
}

}  // namespace ceq
