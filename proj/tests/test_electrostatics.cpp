// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>

#include "ceq/electrostatics.hpp"
#include "ceq/error.hpp"
#include "ceq/rng.hpp"

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

ChargeSystem two_unit_charges(double separation, double k = 1.0) {
    return make_charge_system(
        {charge_at(0, 1.0, {0.0, 0.0}, {1.0, 1.0}),
         charge_at(1, 1.0, {separation, 0.0}, {1.0, 1.0})},
        k);
}

}  // namespace

TEST_SUITE_BEGIN("electrostatics");

TEST_CASE("unit charges at unit distance repel with unit force") {
    const auto system = two_unit_charges(1.0);
    const auto f = pairwise_force(system, 0, 1, SpreadWeighting::source);
    CHECK(f[0] == doctest::Approx(-1.0));  // pushed away from the charge at x=1
    CHECK(f[1] == doctest::Approx(0.0));
}

TEST_CASE("source spread scales the force elementwise") {
    auto system = two_unit_charges(1.0);
    system.charges[1].spread = {2.0, 1.0};
    const auto f = pairwise_force(system, 0, 1, SpreadWeighting::source);
    CHECK(f[0] == doctest::Approx(-2.0));
    CHECK(f[1] == doctest::Approx(0.0));
}

TEST_CASE("unweighted magnitude matches the scalar law") {
    // k=2, Q_i=3, Q_j=4 at distance 2: magnitude 2*3*4/4 = 6.
    const auto system = make_charge_system(
        {charge_at(0, 3.0, {0.0, 0.0}, {1.0, 1.0}),
         charge_at(1, 4.0, {0.0, 2.0}, {1.0, 1.0})},
        2.0);
    const auto f = pairwise_force(system, 0, 1, SpreadWeighting::none);
    CHECK(l2_norm(f) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("forces obey Newton's third law without weighting") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 2 + rng.below(6);
        std::vector<double> pa(d), pb(d), sa(d), sb(d);
        for (std::size_t j = 0; j < d; ++j) {
            pa[j] = rng.uniform(-5.0, 5.0);
            pb[j] = rng.uniform(-5.0, 5.0);
            sa[j] = rng.uniform(0.1, 3.0);
            sb[j] = rng.uniform(0.1, 3.0);
        }
        const auto system = make_charge_system(
            {charge_at(0, rng.uniform(0.1, 4.0), pa, sa),
             charge_at(1, rng.uniform(0.1, 4.0), pb, sb)},
            rng.uniform(0.5, 4.0));
        const auto fij = pairwise_force(system, 0, 1, SpreadWeighting::none);
        const auto fji = pairwise_force(system, 1, 0, SpreadWeighting::none);
        for (std::size_t j = 0; j < d; ++j) CHECK(fij[j] == -fji[j]);
    }
}

TEST_CASE("coincident charges trip the singularity guard") {
    const auto system = make_charge_system(
        {charge_at(0, 1.0, {0.5, 0.5}, {1.0, 1.0}),
         charge_at(1, 1.0, {0.5, 0.5 + 1e-12}, {1.0, 1.0})},
        1.0);
    try {
        pairwise_force(system, 0, 1, SpreadWeighting::none);
        FAIL("expected a singularity error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::singularity);
    }
}

TEST_CASE("zero charge is rejected when building a system") {
    try {
        make_charge_system({charge_at(0, 0.0, {0.0}, {0.0})}, 1.0);
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
    }
}

TEST_CASE("a single charge feels nothing") {
    const auto system =
        make_charge_system({charge_at(0, 2.0, {1.0, 2.0}, {1.0, 1.0})}, 1.0);
    const auto state = net_forces(system, SpreadWeighting::source);
    CHECK(state.total_magnitude == 0.0);
    CHECK(state.per_charge_force(0, 0) == 0.0);
    CHECK(state.per_charge_force(0, 1) == 0.0);
}

TEST_CASE("the middle of three equally spaced charges is balanced") {
    const auto system = make_charge_system(
        {charge_at(0, 1.0, {-1.0, 0.0}, {1.0, 1.0}),
         charge_at(1, 1.0, {0.0, 0.0}, {1.0, 1.0}),
         charge_at(2, 1.0, {1.0, 0.0}, {1.0, 1.0})},
        1.0);
    const auto state = net_forces(system, SpreadWeighting::source);
    CHECK(state.per_charge_force(1, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(state.per_charge_force(1, 1) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("two unit charges: total magnitude is 2/d^2") {
    for (const double dist : {1.0, 2.0, 5.0, 10.0}) {
        const auto state =
            net_forces(two_unit_charges(dist), SpreadWeighting::source);
        CHECK(state.total_magnitude ==
              doctest::Approx(2.0 / (dist * dist)).epsilon(1e-12));
    }
}

TEST_CASE("doubling the separation quarters the force") {
    const auto near = net_forces(two_unit_charges(3.0), SpreadWeighting::none);
    const auto far = net_forces(two_unit_charges(6.0), SpreadWeighting::none);
    CHECK(near.total_magnitude / far.total_magnitude ==
          doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("translating the system leaves every force unchanged") {
    Rng rng(17);
    std::vector<ClassSummary> summaries;
    for (int c = 0; c < 4; ++c) {
        std::vector<double> pos(3), spread(3);
        for (auto& x : pos) x = rng.uniform(-2.0, 2.0);
        for (auto& x : spread) x = rng.uniform(0.2, 2.0);
        summaries.push_back(charge_at(c, rng.uniform(0.3, 2.0), pos, spread));
    }
    auto system = make_charge_system(summaries, 1.5);
    const auto base = net_forces(system, SpreadWeighting::source);

    for (auto& charge : system.charges) {
        charge.position[0] += 100.0;
        charge.position[1] -= 40.0;
        charge.position[2] += 7.5;
    }
    const auto moved = net_forces(system, SpreadWeighting::source);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(moved.per_charge_force(i, j) ==
                  doctest::Approx(base.per_charge_force(i, j)).epsilon(1e-9));
        }
    }
}

TEST_CASE("net_forces is bit-deterministic") {
    Rng rng(23);
    std::vector<ClassSummary> summaries;
    for (int c = 0; c < 6; ++c) {
        std::vector<double> pos(5), spread(5);
        for (auto& x : pos) x = rng.uniform(-1.0, 1.0);
        for (auto& x : spread) x = rng.uniform(0.1, 1.0);
        summaries.push_back(charge_at(c, rng.uniform(0.2, 3.0), pos, spread));
    }
    const auto system = make_charge_system(summaries, 1.0);
    const auto a = net_forces(system, SpreadWeighting::source);
    const auto b = net_forces(system, SpreadWeighting::source);
    CHECK(a.per_charge_force == b.per_charge_force);
    CHECK(a.total_magnitude == b.total_magnitude);
}

TEST_CASE("attraction magnitude follows k*Q/d^2") {
    const auto summary = charge_at(0, 1.0, {0.0, 0.0}, {1.0, 1.0});
    const std::vector<double> test{1.0, 0.0};
    CHECK(attraction_magnitude(test, summary, summary.position, 1.0) ==
          doctest::Approx(1.0));
}

TEST_CASE("a heavier farther charge can out-pull a nearer light one") {
    // Q=4 at distance 2 pulls with 1.0; Q=1 at distance 1.5 with ~0.444.
    const auto heavy = charge_at(0, 4.0, {0.0}, {1.0});
    const auto light = charge_at(1, 1.0, {0.0}, {1.0});
    const std::vector<double> origin{0.0};
    const std::vector<double> at2{2.0};
    const std::vector<double> at15{1.5};
    const double pull_heavy = attraction_magnitude(at2, heavy, origin, 1.0);
    const double pull_light = attraction_magnitude(at15, light, origin, 1.0);
    CHECK(pull_heavy == doctest::Approx(1.0));
    CHECK(pull_light == doctest::Approx(1.0 / 2.25).epsilon(1e-12));
    CHECK(pull_heavy > pull_light);
}

TEST_CASE("attraction is linear in k") {
    const auto summary = charge_at(0, 2.5, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
    const std::vector<double> test{0.3, -0.4, 1.2};
    const std::vector<double> at{1.0, 1.0, 1.0};
    const double base = attraction_magnitude(test, summary, at, 1.0);
    for (const double c : {0.5, 2.0, 128.0, 2048.0}) {
        CHECK(attraction_magnitude(test, summary, at, c) ==
              doctest::Approx(c * base).epsilon(1e-12));
    }
}

TEST_CASE("a coincident test point reads +infinity") {
    const auto summary = charge_at(0, 1.0, {0.25, 0.75}, {1.0, 1.0});
    const std::vector<double> at{0.25, 0.75};
    CHECK(attraction_magnitude(at, summary, at, 1.0) ==
          std::numeric_limits<double>::infinity());
}

TEST_SUITE_END();
