// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0
//
// ceq: class-equilibrium classification pipeline.
//
//   ceq fit       summarize classes, relax the charge system, project data
//   ceq train     learn the input -> equilibrium regressor
//   ceq evaluate  classify a test split, with and without ERC
//   ceq export    dump equilibrium-space coordinates as CSV
//
// Exit codes: 0 success, 2 usage/config error, 3 data or format error,
// 4 numeric failure.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ceq/error.hpp"
#include "ceq/pipeline.hpp"

namespace {

int exit_code_for(ceq::ErrorKind kind) {
    switch (kind) {
        case ceq::ErrorKind::config:
            return 2;
        case ceq::ErrorKind::format:
        case ceq::ErrorKind::consistency:
        case ceq::ErrorKind::parse:
        case ceq::ErrorKind::shape:
        case ceq::ErrorKind::io:
            return 3;
        case ceq::ErrorKind::domain:
        case ceq::ErrorKind::singularity:
        case ceq::ErrorKind::divergence:
            return 4;
    }
    return 1;
}

void add_common_options(CLI::App* cmd, ceq::PipelineConfig& config,
                        std::string& config_path) {
    cmd->add_option("--config", config_path,
                    "Flat key = value configuration file; explicit flags win");
    cmd->add_option("--model-dir", config.model_dir, "Model artifact directory")
        ->required();
    cmd->add_option("--seed", config.seed, "Seed for every stochastic stage");
    cmd->add_option("--resolution", config.resolution,
                    "Downsample square images to this side (8, 16; 0 keeps native)")
        ->check(CLI::IsMember({0, 8, 16}));
    cmd->add_option("--source-side", config.source_side,
                    "Source image side (inferred for square single-plane data)");
    cmd->add_option("--channels", config.channels, "Image channel planes");
    cmd->add_option("--label-column", config.label_column,
                    "CSV label column index (-1 = last)");
    cmd->add_option("--dataset-kind", config.dataset_kind,
                    "Dataset name used for the default force constant")
        ->check(CLI::IsMember({"cifar10", "mnist", "fmnist", "norb", "other"}));
    cmd->add_option("--k", config.k, "Force constant (0 picks the dataset default)");
}

void add_train_data_options(CLI::App* cmd, ceq::PipelineConfig& config) {
    cmd->add_option("--train-images", config.train_images, "IDX image file");
    cmd->add_option("--train-labels", config.train_labels, "IDX label file");
    cmd->add_option("--train-csv", config.train_csv, "CSV with a label column");
    cmd->add_option("--max-train", config.max_train,
                    "Stratified subsample cap for the training split");
}

void add_test_data_options(CLI::App* cmd, ceq::PipelineConfig& config) {
    cmd->add_option("--test-images", config.test_images, "IDX image file");
    cmd->add_option("--test-labels", config.test_labels, "IDX label file");
    cmd->add_option("--test-csv", config.test_csv, "CSV with a label column");
    cmd->add_option("--max-test", config.max_test,
                    "Stratified subsample cap for the test split");
}

void add_erc_options(CLI::App* cmd, ceq::PipelineConfig& config,
                     std::string& erc_mode) {
    cmd->add_option("--erc", erc_mode, "ERC correction: both, on, or off")
        ->check(CLI::IsMember({"both", "on", "off"}));
    cmd->add_flag("--erc-direct", config.erc_direct,
                  "Use ERC's chosen class directly instead of re-running the "
                  "force argmax on the corrected position");
    cmd->add_flag("--spread-weighted-classify", config.spread_weighted_classify,
                  "Weight classification forces by the class spread vector");
}

/// Applies a flat `key = value` file as defaults for the invoked subcommand:
/// each key matching one of its long options is appended as --key=value
/// unless that flag was given explicitly, so command-line flags always win.
/// Keys a command does not know are ignored (one file can serve every
/// command); '#' starts a comment.
void expand_config_file(CLI::App& app, std::vector<std::string>& args) {
    std::string sub_name, config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (sub_name.empty() && !args[i].empty() && args[i][0] != '-') {
            sub_name = args[i];
        }
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        }
    }
    if (config_path.empty() || sub_name.empty()) return;
    CLI::App* sub = app.get_subcommand_no_throw(sub_name);
    if (sub == nullptr) return;

    std::ifstream in(config_path);
    if (!in) {
        throw ceq::Error(ceq::ErrorKind::config, "cli",
                         "cannot open config file " + config_path);
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ceq::Error(ceq::ErrorKind::config, "cli",
                             "config line " + std::to_string(line_no) +
                                 " is not key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ceq::Error(ceq::ErrorKind::config, "cli",
                             "empty key at config line " + std::to_string(line_no));
        }
        const std::string flag = "--" + key;
        if (sub->get_option_no_throw(flag) == nullptr) continue;
        bool given = false;
        for (const auto& arg : args) {
            if (arg == flag || arg.rfind(flag + "=", 0) == 0) {
                given = true;
                break;
            }
        }
        if (!given) args.push_back(flag + "=" + value);
    }
}

ceq::ErcMode parse_erc_mode(const std::string& text) {
    if (text == "on") return ceq::ErcMode::on;
    if (text == "off") return ceq::ErcMode::off;
    return ceq::ErcMode::both;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Class-equilibrium classification pipeline"};
    app.require_subcommand(1);

    ceq::PipelineConfig config;
    std::string config_path;
    std::string erc_mode = "both";
    std::string export_split = "train";

    CLI::App* fit = app.add_subcommand(
        "fit", "Summarize classes, relax charges to equilibrium, project data");
    add_common_options(fit, config, config_path);
    add_train_data_options(fit, config);
    fit->add_option("--tolerance", config.solver.tolerance,
                    "Total-force stopping tolerance");
    fit->add_option("--max-iterations", config.solver.max_iterations,
                    "Solver iteration cap");
    fit->add_option("--initial-step", config.solver.initial_step,
                    "Initial relaxation step size");
    fit->add_option("--step-decay", config.solver.step_decay,
                    "Step shrink factor on rejected steps");
    fit->add_option("--jitter-scale", config.solver.jitter_scale,
                    "Seeded jitter applied to coincident class positions");

    CLI::App* train = app.add_subcommand(
        "train", "Learn the input -> equilibrium transformation");
    add_common_options(train, config, config_path);
    add_train_data_options(train, config);
    train->add_option("--epochs", config.epochs, "Training epochs");
    train->add_option("--batch", config.batch_size, "Mini-batch size");
    train->add_option("--lr", config.learning_rate,
                      "Learning rate, flat (\"1e-4\") or phased (\"1e-4:20,1e-5:10\")");
    train->add_option("--hidden", config.hidden,
                      "Hidden layer widths (default: 4d, d, 4d)")
        ->delimiter(',');
    train->add_option("--rms-decay", config.rms_decay, "RMSprop decay");
    train->add_option("--rms-epsilon", config.rms_epsilon, "RMSprop epsilon");

    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "Classify a test split and write reports");
    add_common_options(evaluate, config, config_path);
    add_test_data_options(evaluate, config);
    add_erc_options(evaluate, config, erc_mode);
    bool no_timing = false;
    evaluate->add_flag("--no-timing", no_timing,
                       "Omit wall-clock timing from reports (byte-reproducible)");
    evaluate->add_flag("--per-sample", config.per_sample,
                       "Include the per-sample force matrix in reports");

    CLI::App* exp = app.add_subcommand(
        "export", "Write equilibrium-space coordinates for one split");
    add_common_options(exp, config, config_path);
    add_train_data_options(exp, config);
    add_test_data_options(exp, config);
    add_erc_options(exp, config, erc_mode);
    exp->add_option("--split", export_split, "Which split to export")
        ->check(CLI::IsMember({"train", "test"}));

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        expand_config_file(app, args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the parse error
        return code == 0 ? 0 : 2;
    } catch (const ceq::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.kind());
    }

    config.erc_mode = parse_erc_mode(erc_mode);
    config.include_timing = !no_timing;

    try {
        if (fit->parsed()) {
            const auto outcome = ceq::cmd_fit(config);
            std::printf("fit: n=%zu d=%zu converged=%s iterations=%zu "
                        "final_total_force=%.6g\n",
                        outcome.class_count, outcome.dim,
                        outcome.converged ? "true" : "false", outcome.iterations,
                        outcome.final_total_force);
        } else if (train->parsed()) {
            const auto outcome = ceq::cmd_train(config);
            if (outcome.final_loss) {
                std::printf("train: epochs=%zu final_loss=%.6g\n", outcome.epochs,
                            *outcome.final_loss);
            } else {
                std::printf("train: epochs=0 (checkpoint equals initialization)\n");
            }
        } else if (evaluate->parsed()) {
            const auto outcome = ceq::cmd_evaluate(config);
            const auto show = [](const std::optional<ceq::ClassificationReport>& r)
                -> std::string {
                if (!r || !r->accuracy) return "n/a";
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.4f", *r->accuracy);
                return buf;
            };
            std::printf("%-12s %-12s %-12s\n", "", "Before ERC", "After ERC");
            std::printf("%-12s %-12s %-12s\n", "accuracy",
                        show(outcome.without_erc).c_str(),
                        show(outcome.with_erc).c_str());
        } else if (exp->parsed()) {
            const auto split =
                export_split == "test" ? ceq::Split::test : ceq::Split::train;
            const std::string path = ceq::cmd_export(config, split);
            std::printf("export: wrote %s\n", path.c_str());
        }
    } catch (const ceq::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
