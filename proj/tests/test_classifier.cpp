// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "ceq/classifier.hpp"
#include "ceq/error.hpp"
#include "ceq/rng.hpp"
#include "testing_util.hpp"

using namespace ceq;

namespace {

ClassSummary charge_at(int id, double q, std::vector<double> pos,
                       std::vector<double> spread) {
    ClassSummary s;
    s.class_id = id;
    s.charge = q;
    s.position = std::move(pos);
    s.spread = std::move(spread);
    s.count = 2;
    return s;
}

EquilibriumModel model_from(const std::vector<ClassSummary>& summaries,
                            const std::vector<std::vector<double>>& positions,
                            double k = 1.0) {
    EquilibriumModel model;
    model.summaries = summaries;
    model.k = k;
    const std::size_t n = positions.size();
    const std::size_t d = positions[0].size();
    model.equilibrium_positions = Matrix(n, d);
    model.deltas = Matrix(n, d);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t j = 0; j < d; ++j) {
            model.equilibrium_positions(c, j) = positions[c][j];
            model.deltas(c, j) = positions[c][j] - summaries[c].position[j];
        }
    }
    return model;
}

TransformModel identity_transform(std::size_t d) {
    TransformModel model = init_model(d, {}, 0);
    for (double& w : model.weights[0].data()) w = 0.0;
    for (std::size_t i = 0; i < d; ++i) model.weights[0](i, i) = 1.0;
    return model;
}

/// Separated 3-blob fixture: blobs already living in equilibrium space.
struct BlobFixture {
    EquilibriumModel model;
    LabeledDataset points;
};

BlobFixture separated_blobs(std::uint64_t seed, std::size_t per_class = 40) {
    // Inter-centroid distance 20+ versus sigma 0.05: cleanly separable.
    const std::vector<std::vector<double>> centers{
        {0.0, 0.0, 0.0}, {20.0, 0.0, 10.0}, {0.0, 25.0, -15.0}};
    BlobFixture fx;
    fx.points = ceq_test::make_blobs(centers, per_class, 0.05, seed);
    std::vector<ClassSummary> summaries;
    for (int c = 0; c < 3; ++c) {
        summaries.push_back(
            charge_at(c, 1.0, centers[c], {1.0, 1.0, 1.0}));
    }
    fx.model = model_from(summaries, centers);
    return fx;
}

}  // namespace

TEST_SUITE_BEGIN("classifier");

TEST_CASE("equidistant equal charges tie-break to class 0") {
    const auto model = model_from(
        {charge_at(0, 1.0, {0.0, 0.0}, {1, 1}), charge_at(1, 1.0, {2.0, 0.0}, {1, 1})},
        {{0.0, 0.0}, {2.0, 0.0}});
    const auto [label, forces] = classify_point(std::vector<double>{1.0, 0.0}, model);
    CHECK(label == 0);
    CHECK(forces[0] == forces[1]);
}

TEST_CASE("the nearer of two equal charges wins") {
    const auto model = model_from(
        {charge_at(0, 1.0, {0.0, 0.0}, {1, 1}), charge_at(1, 1.0, {2.0, 0.0}, {1, 1})},
        {{0.0, 0.0}, {2.0, 0.0}});
    const auto [label, forces] = classify_point(std::vector<double>{1.5, 0.0}, model);
    CHECK(label == 1);
}

TEST_CASE("a big far charge out-pulls a small near one") {
    // Q=(4,1), distances (2, 1.5): forces (1, 0.444...) favor class 0.
    const auto model = model_from(
        {charge_at(0, 4.0, {0.0, 0.0}, {1, 1}), charge_at(1, 1.0, {3.5, 0.0}, {1, 1})},
        {{0.0, 0.0}, {3.5, 0.0}});
    const auto [label, forces] = classify_point(std::vector<double>{2.0, 0.0}, model);
    CHECK(label == 0);
    CHECK(forces[0] == doctest::Approx(1.0));
    CHECK(forces[1] == doctest::Approx(1.0 / 2.25).epsilon(1e-12));
}

TEST_CASE("a coincident point wins outright via the infinity sentinel") {
    const auto model = model_from(
        {charge_at(0, 0.001, {0.0, 0.0}, {1, 1}), charge_at(1, 50.0, {0.1, 0.0}, {1, 1})},
        {{0.0, 0.0}, {0.1, 0.0}});
    const auto [label, forces] = classify_point(std::vector<double>{0.0, 0.0}, model);
    CHECK(label == 0);
    CHECK(std::isinf(forces[0]));
}

TEST_CASE("projected training points classify perfectly (nearest-charge oracle)") {
    const auto fx = separated_blobs(60);
    const auto report =
        classify_dataset(fx.points, identity_transform(3), fx.model, {});
    REQUIRE(report.accuracy.has_value());
    CHECK(*report.accuracy == 1.0);

    // Oracle: per-point nearest charge.
    for (std::size_t i = 0; i < fx.points.size(); ++i) {
        int nearest = 0;
        double best = 1e300;
        for (std::size_t c = 0; c < 3; ++c) {
            const double dist = euclidean_distance(
                fx.points.features.row(i), fx.model.equilibrium_positions.row(c));
            if (dist < best) {
                best = dist;
                nearest = static_cast<int>(c);
            }
        }
        CHECK(report.predictions[i] == nearest);
    }
}

TEST_CASE("erc snap then force argmax recovers the snapped class") {
    const auto fx = separated_blobs(61, 10);
    ClassifyOptions options;
    options.use_erc = true;
    const auto report =
        classify_dataset(fx.points, identity_transform(3), fx.model, options);
    CHECK(report.erc_used);
    REQUIRE(report.accuracy.has_value());
    CHECK(*report.accuracy == 1.0);
}

TEST_CASE("an empty test set yields an omitted accuracy") {
    const auto fx = separated_blobs(62, 4);
    LabeledDataset empty;
    empty.features = Matrix(0, 3);
    empty.class_count = 3;
    const auto report = classify_dataset(empty, identity_transform(3), fx.model, {});
    CHECK_FALSE(report.accuracy.has_value());
    CHECK(report.predictions.empty());
    for (const auto count : report.confusion) CHECK(count == 0);
}

TEST_CASE("predictions are invariant in k across its whole range") {
    const auto fx = separated_blobs(63);
    auto model = fx.model;
    std::vector<int> baseline;
    for (const double k : {1.0, 128.0, 2048.0}) {
        model.k = k;
        const auto report =
            classify_dataset(fx.points, identity_transform(3), model, {});
        if (baseline.empty()) {
            baseline = report.predictions;
        } else {
            CHECK(report.predictions == baseline);
        }
    }
}

TEST_CASE("permuting test rows permutes predictions identically") {
    const auto fx = separated_blobs(64, 15);
    const auto base =
        classify_dataset(fx.points, identity_transform(3), fx.model, {});

    Rng rng(9);
    const auto order = rng.permutation(fx.points.size());
    LabeledDataset shuffled;
    shuffled.class_count = 3;
    shuffled.features = Matrix(fx.points.size(), 3);
    shuffled.labels.resize(fx.points.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::copy(fx.points.features.row(order[i]).begin(),
                  fx.points.features.row(order[i]).end(),
                  shuffled.features.row(i).begin());
        shuffled.labels[i] = fx.points.labels[order[i]];
    }
    const auto moved = classify_dataset(shuffled, identity_transform(3), fx.model, {});
    for (std::size_t i = 0; i < order.size(); ++i) {
        CHECK(moved.predictions[i] == base.predictions[order[i]]);
    }
}

TEST_CASE("report is self-consistent: confusion trace reproduces accuracy") {
    const auto fx = separated_blobs(65);
    const auto report =
        classify_dataset(fx.points, identity_transform(3), fx.model, {});
    const auto recomputed = accuracy_from_confusion(report);
    REQUIRE(recomputed.has_value());
    CHECK(*recomputed == *report.accuracy);

    std::size_t total = 0;
    for (const auto count : report.confusion) total += count;
    CHECK(total == fx.points.size());
}

TEST_CASE("non-finite transform outputs count as failures") {
    const auto fx = separated_blobs(66, 5);
    TransformModel bad = identity_transform(3);
    bad.biases[0][0] = std::numeric_limits<double>::quiet_NaN();
    const auto report = classify_dataset(fx.points, bad, fx.model, {});
    CHECK(report.n_failures == fx.points.size());
    REQUIRE(report.accuracy.has_value());
    CHECK(*report.accuracy == 0.0);
    for (const int p : report.predictions) CHECK(p == -1);
    std::size_t total = 0;
    for (const auto count : report.confusion) total += count;
    CHECK(total == 0);  // failures stay out of the confusion matrix
}

TEST_CASE("dimension mismatch is a shape error") {
    const auto fx = separated_blobs(67, 4);
    LabeledDataset wrong;
    wrong.features = Matrix(2, 5, 0.1);
    wrong.labels = {0, 1};
    wrong.class_count = 3;
    CHECK_THROWS_AS(classify_dataset(wrong, identity_transform(5), fx.model, {}),
                    Error);
}

TEST_CASE("timing covers the three phases") {
    const auto fx = separated_blobs(68);
    ClassifyOptions options;
    options.use_erc = true;
    const auto report =
        classify_dataset(fx.points, identity_transform(3), fx.model, options);
    CHECK(report.timing.transform_seconds >= 0.0);
    CHECK(report.timing.erc_seconds >= 0.0);
    CHECK(report.timing.force_seconds >= 0.0);
}

TEST_SUITE_END();
