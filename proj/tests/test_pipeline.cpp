// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ceq/artifacts.hpp"
#include "ceq/error.hpp"
#include "ceq/pipeline.hpp"
#include "testing_util.hpp"

using namespace ceq;
using ceq_test::TempDir;

namespace {

/// Writes an easily separable 3-blob train/test pair (d=8) and returns a
/// config pointing at them. High-dimensional enough for rank correlation
/// to be informative.
PipelineConfig blob_config(const TempDir& dir, std::uint64_t seed) {
    const std::vector<std::vector<double>> centers{
        {0, 0, 0, 0, 0, 0, 0, 0},
        {10, 10, 0, 0, 0, 0, 5, 5},
        {0, 5, 10, 0, 5, 0, 10, 0}};
    const auto train = ceq_test::make_blobs(centers, 100, 0.5, seed);
    const auto test = ceq_test::make_blobs(centers, 40, 0.5, seed + 1);
    ceq_test::write_blobs_csv(train, dir.file("train.csv"));
    ceq_test::write_blobs_csv(test, dir.file("test.csv"));

    PipelineConfig config;
    config.train_csv = dir.file("train.csv");
    config.test_csv = dir.file("test.csv");
    config.model_dir = dir.file("model");
    config.seed = 7;
    config.epochs = 200;
    config.learning_rate = "1e-2";
    return config;
}

std::string slurp(const std::string& path) { return ceq_test::read_file(path); }

}  // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("fit writes a complete, reloadable model directory") {
    TempDir dir("fit");
    const auto config = blob_config(dir, 100);
    const auto outcome = cmd_fit(config);
    CHECK(outcome.class_count == 3);
    CHECK(outcome.dim == 8);
    CHECK(outcome.converged);

    const auto model =
        read_equilibrium(dir.file("model/equilibrium.txt"),
                         dir.file("model/summaries.txt"));
    CHECK(model.class_count() == 3);
    CHECK(model.dim() == 8);
    CHECK(model.converged);
    CHECK(model.final_total_force <= model.tolerance);

    const auto projected = read_embedding_csv(dir.file("model/projected.csv"));
    CHECK(projected.points.rows() == 300);
}

TEST_CASE("fit rejects a single-point class (zero charge)") {
    TempDir dir("fit_deg");
    // Two one-point classes: zero spread everywhere, so zero charge.
    ceq_test::write_file(dir.file("deg.csv"), "0,1,0\n1,0,1\n");
    PipelineConfig config;
    config.train_csv = dir.file("deg.csv");
    config.model_dir = dir.file("model");
    try {
        cmd_fit(config);
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
    }
}

TEST_CASE("train writes a checkpoint and a loss history of exactly epochs lines") {
    TempDir dir("train");
    auto config = blob_config(dir, 200);
    config.epochs = 12;
    config.learning_rate = "1e-3:8,1e-4:4";
    cmd_fit(config);
    const auto outcome = cmd_train(config);
    CHECK(outcome.epochs == 12);
    REQUIRE(outcome.final_loss.has_value());
    CHECK(std::isfinite(*outcome.final_loss));

    const auto ckpt = read_checkpoint(dir.file("model/checkpoint.txt"));
    CHECK(ckpt.model.layer_sizes ==
          std::vector<std::size_t>{8, 32, 8, 32, 8});  // default 4d, d, 4d
    CHECK(ckpt.epoch_losses.size() == 12);

    // Version line + one "epoch loss" line per epoch, all finite.
    std::ifstream loss(dir.file("model/loss_history.txt"));
    std::string line;
    std::getline(loss, line);
    CHECK(line == "ceq-loss-history 1");
    std::size_t rows = 0;
    while (std::getline(loss, line)) {
        if (line.empty()) continue;
        ++rows;
        std::istringstream parts(line);
        std::size_t epoch;
        double value;
        parts >> epoch >> value;
        CHECK(epoch == rows - 1);
        CHECK(std::isfinite(value));
    }
    CHECK(rows == 12);
}

TEST_CASE("train with zero epochs equals the initialization") {
    TempDir dir("train0");
    auto config = blob_config(dir, 300);
    config.epochs = 0;
    cmd_fit(config);
    const auto outcome = cmd_train(config);
    CHECK(outcome.epochs == 0);
    CHECK_FALSE(outcome.final_loss.has_value());
    const auto ckpt = read_checkpoint(dir.file("model/checkpoint.txt"));
    CHECK(ckpt.epoch_losses.empty());
    const auto fresh = init_model(8, default_hidden_widths(8), ckpt.seed);
    CHECK(ckpt.model.weights[0] == fresh.weights[0]);
}

TEST_CASE("train without a prior fit names the missing artifact") {
    TempDir dir("train_nofit");
    auto config = blob_config(dir, 400);
    try {
        cmd_train(config);
        FAIL("expected an io error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io);
        CHECK(std::string(e.what()).find("equilibrium") != std::string::npos);
    }
}

TEST_CASE("evaluate reaches both accuracies >= 0.99 on separable blobs") {
    TempDir dir("eval");
    auto config = blob_config(dir, 500);
    cmd_fit(config);
    cmd_train(config);
    const auto outcome = cmd_evaluate(config);
    REQUIRE(outcome.without_erc.has_value());
    REQUIRE(outcome.with_erc.has_value());
    CHECK(*outcome.without_erc->accuracy >= 0.99);
    CHECK(*outcome.with_erc->accuracy >= 0.99);

    // Written reports parse as JSON with the documented keys.
    const std::string text = slurp(dir.file("model/report_no_erc.json"));
    CHECK(text.find("\"format\": \"ceq-report/1\"") != std::string::npos);
    CHECK(text.find("\"accuracy\"") != std::string::npos);
    CHECK(text.find("\"confusion\"") != std::string::npos);
    CHECK(text.find("\"timing_seconds\"") != std::string::npos);
}

TEST_CASE("evaluate with a mismatched dimensionality exits with a shape error") {
    TempDir dir("eval_dim");
    auto config = blob_config(dir, 600);
    cmd_fit(config);
    cmd_train(config);
    ceq_test::write_file(dir.file("narrow.csv"), "0.1,0.2,0\n0.3,0.4,1\n0.5,0.6,2\n");
    config.test_csv = dir.file("narrow.csv");
    try {
        cmd_evaluate(config);
        FAIL("expected a shape error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::shape);
    }
}

TEST_CASE("export: train rows equal the projected artifact, test rows snap") {
    TempDir dir("export");
    auto config = blob_config(dir, 700);
    cmd_fit(config);
    cmd_train(config);

    const auto train_path = cmd_export(config, Split::train);
    CHECK(slurp(train_path) == slurp(dir.file("model/projected.csv")));

    config.erc_mode = ErcMode::on;
    const auto test_path = cmd_export(config, Split::test);
    const auto exported = read_embedding_csv(test_path);
    const auto model = read_equilibrium(dir.file("model/equilibrium.txt"),
                                        dir.file("model/summaries.txt"));
    const auto test_data = load_split(config, Split::test);
    // Every exported row is input + delta_i for some class i (ERC snapped).
    for (std::size_t i = 0; i < exported.points.rows(); ++i) {
        bool matches_some_delta = false;
        for (std::size_t c = 0; c < model.class_count() && !matches_some_delta; ++c) {
            bool all = true;
            for (std::size_t j = 0; j < model.dim(); ++j) {
                const double expected =
                    test_data.features(i, j) + model.deltas(c, j);
                if (exported.points(i, j) != expected) {
                    all = false;
                    break;
                }
            }
            matches_some_delta = all;
        }
        CHECK(matches_some_delta);
    }
}

TEST_CASE("the whole pipeline is byte-deterministic given a seed") {
    TempDir dir("det");
    auto config = blob_config(dir, 800);
    config.epochs = 30;
    config.include_timing = false;

    auto run = [&](const std::string& model_dir) {
        PipelineConfig c = config;
        c.model_dir = model_dir;
        cmd_fit(c);
        cmd_train(c);
        cmd_evaluate(c);
        cmd_export(c, Split::train);
        cmd_export(c, Split::test);
    };
    run(dir.file("m_a"));
    run(dir.file("m_b"));

    for (const char* name :
         {"summaries.txt", "equilibrium.txt", "projected.csv", "checkpoint.txt",
          "loss_history.txt", "report_no_erc.json", "report_erc.json",
          "export_train.csv", "export_test.csv"}) {
        CHECK_MESSAGE(slurp(dir.file(std::string("m_a/") + name)) ==
                          slurp(dir.file(std::string("m_b/") + name)),
                      name);
    }
}

TEST_CASE("loaders reject unknown artifact versions") {
    TempDir dir("ver");
    auto config = blob_config(dir, 900);
    cmd_fit(config);

    const std::string path = dir.file("model/summaries.txt");
    std::string contents = slurp(path);
    contents.replace(contents.find("ceq-summaries 1"), 15, "ceq-summaries 9");
    ceq_test::write_file(path, contents);
    try {
        read_summaries(path);
        FAIL("expected a format error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::format);
    }
}

TEST_CASE("stratified subsetting flows through fit and train") {
    TempDir dir("subset");
    auto config = blob_config(dir, 1000);
    config.max_train = 60;
    config.epochs = 5;
    cmd_fit(config);
    const auto projected = read_embedding_csv(dir.file("model/projected.csv"));
    CHECK(projected.points.rows() == 60);
    const auto outcome = cmd_train(config);  // same subset: row-aligned
    CHECK(outcome.epochs == 5);
}

TEST_CASE("overlapping blobs drive a real equilibrium solve through fit") {
    // Broad blobs keep the per-column variance (and hence the charges) large
    // after min-max normalization, so the charges start above tolerance and
    // the solver has to move them.
    TempDir dir("strong");
    const std::vector<std::vector<double>> centers{
        {0, 0, 0, 0}, {1, 1, 0, 0}, {0, 1, 1, 0}};
    const auto train = ceq_test::make_blobs(centers, 120, 1.0, 31);
    ceq_test::write_blobs_csv(train, dir.file("train.csv"));

    PipelineConfig config;
    config.train_csv = dir.file("train.csv");
    config.model_dir = dir.file("model");
    config.seed = 3;
    const auto outcome = cmd_fit(config);
    CHECK(outcome.converged);
    CHECK(outcome.iterations > 0);

    const auto model = read_equilibrium(dir.file("model/equilibrium.txt"),
                                        dir.file("model/summaries.txt"));
    double max_delta = 0.0;
    for (const double d : model.deltas.data()) {
        max_delta = std::max(max_delta, std::abs(d));
    }
    CHECK(max_delta > 0.1);  // classes actually traveled

    // With distinct deltas, an ERC-corrected export row must coincide with
    // input + delta of exactly one class.
    ceq_test::write_blobs_csv(ceq_test::make_blobs(centers, 10, 1.0, 37),
                              dir.file("test.csv"));
    config.test_csv = dir.file("test.csv");
    config.epochs = 3;
    config.learning_rate = "1e-3";
    cmd_train(config);
    config.erc_mode = ErcMode::on;
    const auto path = cmd_export(config, Split::test);
    const auto exported = read_embedding_csv(path);
    const auto test_data = load_split(config, Split::test);
    for (std::size_t i = 0; i < exported.points.rows(); ++i) {
        std::size_t matches = 0;
        for (std::size_t c = 0; c < model.class_count(); ++c) {
            bool all = true;
            for (std::size_t j = 0; j < model.dim(); ++j) {
                if (exported.points(i, j) !=
                    test_data.features(i, j) + model.deltas(c, j)) {
                    all = false;
                    break;
                }
            }
            if (all) ++matches;
        }
        CHECK(matches == 1);
    }
}

TEST_CASE("per-dataset force constant defaults") {
    CHECK(default_k("cifar10", 8) == 1.0);
    CHECK(default_k("cifar10", 16) == 128.0);
    CHECK(default_k("cifar10", 0) == 2048.0);
    CHECK(default_k("mnist", 8) == 1.0);
    CHECK(default_k("mnist", 0) == 1.0);
    CHECK(default_k("fmnist", 16) == 1.0);
    CHECK(default_k("norb", 0) == 512.0);
    CHECK(default_k("norb", 16) == 1.0);
    CHECK(default_k("other", 0) == 1.0);
}

TEST_CASE("learning rate strings parse into exact phase covers") {
    const auto flat = parse_learning_rate("1e-3", 40);
    REQUIRE(flat.size() == 1);
    CHECK(flat[0].epochs == 40);
    CHECK(flat[0].rate == 1e-3);

    const auto phased = parse_learning_rate("1e-4:20,1e-5:10", 30);
    REQUIRE(phased.size() == 2);
    CHECK(phased[0].epochs == 20);
    CHECK(phased[0].rate == 1e-4);
    CHECK(phased[1].epochs == 10);
    CHECK(phased[1].rate == 1e-5);

    CHECK(parse_learning_rate("1e-4", 0).empty());
    CHECK_THROWS_AS(parse_learning_rate("1e-4:20", 30), Error);
    CHECK_THROWS_AS(parse_learning_rate("oops", 10), Error);
}

TEST_SUITE_END();
