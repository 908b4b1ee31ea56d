#include <catch2/catch_amalgamated.hpp>

#include "pflab/asymptotics.hpp"

using namespace pflab;

TEST_CASE("interval chain reproduces the classical constants") {
    auto r21 = chain_lane_emden(make_interval_chain(1024), 2.0, 1.0);
    CHECK(r21.constant == Catch::Approx(12.0).epsilon(1e-4));
    auto r22 = chain_pp(make_interval_chain(1024), 2.0);
    CHECK(r22.constant == Catch::Approx(pi * pi).epsilon(1e-3));
}

TEST_CASE("radial torsion of the unit disk") {
    auto rep = radial_ball_frequency(2.0, 1.0, 2, 1.0, 512);
    // w = (1-r^2)/4, int w = pi/8, lambda = 8/pi, w(0) = 1/4
    CHECK(rep.constant == Catch::Approx(8.0 / pi).epsilon(1e-4));
    CHECK(rep.center_value == Catch::Approx(0.25).epsilon(1e-3));
    CHECK(rep.residual_energy_identity < 1e-10);
}

TEST_CASE("radial first eigenvalue of the disk (p = 2)") {
    auto rep = radial_ball_frequency(2.0, 2.0, 2, 1.0, 1024);
    CHECK(rep.constant == Catch::Approx(5.78318596).epsilon(2e-4)); // j_{0,1}^2
}

TEST_CASE("Talenti value and extremal for q = inf") {
    for (real p : {4.0, 8.0}) {
        auto rep = radial_ball_frequency(p, inf, 2, 1.0, 512);
        CHECK(rep.constant == Catch::Approx(ball_sup_frequency(p, 2)).epsilon(0.01));
        const real kappa = (p - 2) / (p - 1);
        for (std::size_t i = 0; i < rep.radial_profile.size(); i += 64) {
            const real r = static_cast<real>(i) / (rep.radial_profile.size() - 1);
            CHECK(rep.radial_profile[i] ==
                  Catch::Approx(1.0 - std::pow(r, kappa)).margin(0.01));
        }
    }
    CHECK_THROWS_WITH(radial_ball_frequency(1.5, inf, 2, 1.0, 512),
                      Catch::Matchers::ContainsSubstring("p > N"));
}

TEST_CASE("scale covariance of the radial frequencies") {
    for (const auto [p, q] : {std::pair<real, real>{4.0, 1.0}, {4.0, inf}, {3.0, 3.0}}) {
        const real expo = p - 2 + (std::isfinite(q) ? 2 * p / q : 0.0);
        const real l1 = radial_ball_frequency(p, q, 2, 1.0, 512).constant;
        const real l2 = radial_ball_frequency(p, q, 2, 2.0, 512).constant;
        CHECK(l2 * std::pow(2.0, expo) == Catch::Approx(l1).epsilon(0.01));
    }
}

TEST_CASE("w_{p,1}^{B_1}(0) increases toward 1 with p") {
    real prev = 0;
    for (real p : {8.0, 16.0, 32.0}) {
        const auto rep = radial_ball_frequency(p, 1.0, 2, 1.0, 512);
        CHECK(rep.center_value > prev);
        prev = rep.center_value;
    }
    CHECK(prev > 0.8);
    CHECK(prev < 1.0 + 1e-9);
}

TEST_CASE("pi_pq oracles and the (A4) bound") {
    auto r = pi_pq(2.0, 2.0, 1024);
    CHECK(r.constant_root_p == Catch::Approx(pi).epsilon(1e-4));
    CHECK(pi_pq_lower_bound(2.0, 2.0) == Catch::Approx(2.0));

    auto r21 = pi_pq(2.0, 1.0, 1024);
    CHECK(r21.constant_root_p == Catch::Approx(std::sqrt(12.0)).epsilon(1e-4));
    CHECK(pi_pq_lower_bound(2.0, 1.0) == Catch::Approx(std::sqrt(2.0) * 1.5));

    for (real p : {1.5, 4.0}) {
        for (real q : {1.0, 2.0}) {
            if (q >= p) continue;
            auto rep = pi_pq(p, q, 512);
            CHECK(rep.extras.at("a4_margin") > 0);
        }
    }
}

TEST_CASE("super-homogeneous route labels itself an upper bound") {
    auto rep = chain_super(make_interval_chain(256), 2.0, 4.0);
    CHECK(rep.upper_bound_only);
    CHECK(rep.constant > 0);
}

TEST_CASE("radial q-sweep approaches lambda_{p,inf} monotonically") {
    const auto recs = sweep_q_to_sup_radial(2, 1.0, 512, 4.0, {4, 8, 16, 32});
    REQUIRE(recs.size() == 4);
    const real target = ball_sup_frequency(4, 2);
    real prev_gap = inf;
    for (const auto& r : recs) {
        CHECK(r.pass); // interpolation lower bound holds
        CHECK(r.target == Catch::Approx(target).epsilon(0.01));
        CHECK(r.gap <= prev_gap * (1 + 1e-9));
        prev_gap = r.gap;
    }
    // the q = p entry reproduces lambda_p exactly
    const auto pp = radial_ball_frequency(4.0, 4.0, 2, 1.0, 512);
    CHECK(recs[0].value == Catch::Approx(pp.constant));
}
