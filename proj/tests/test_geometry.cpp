#include <catch2/catch_amalgamated.hpp>

#include "pflab/distance.hpp"

using namespace pflab;

TEST_CASE("domain factories validate their parameters") {
    CHECK_THROWS_AS(make_interval(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_ball(2, point{}, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_annulus(2, point{}, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_tower(1, 2, 0.0), std::invalid_argument);

    const real log2 = std::log(2.0);
    const real crit = 1.0 / (log2 * log2 * log2);
    CHECK_NOTHROW(make_strip(std::sqrt(2.0 * crit), 20.0));
    CHECK_THROWS_AS(make_strip(std::sqrt(0.5 * crit), 20.0), std::invalid_argument);
}

TEST_CASE("tower removed centers are enumerated level by level") {
    auto t = make_tower(2, 2, 0.0);
    REQUIRE(t.removed.size() == 21); // 1 + 4 + 16
    CHECK(t.removed[0][0] == Catch::Approx(0.5));
    CHECK(t.removed[0][1] == Catch::Approx(0.5));
    // level 1 starts after the single level-0 center
    CHECK(t.removed[1][1] > 1.0);
    auto t3 = make_tower(2, 3, 0.0);
    CHECK(t3.removed.size() == 85);
    auto p3 = make_punctured_box(2, 3, 0.0);
    CHECK(p3.removed.size() == 4); // interior lattice of (0,3)^2
}

TEST_CASE("rasterize classifies the interval as in the catalog") {
    auto g = rasterize(make_interval(0, 1), 0.25);
    REQUIRE(g->node_count() == 5);
    CHECK(g->cls[0] == node_class::boundary);
    CHECK(g->cls[1] == node_class::interior);
    CHECK(g->cls[2] == node_class::interior);
    CHECK(g->cls[3] == node_class::interior);
    CHECK(g->cls[4] == node_class::boundary);
}

TEST_CASE("rasterize marks ball exterior and tower pinning") {
    auto g = rasterize(make_ball(2, point{}, 1.0), 0.5);
    // corners |x| = sqrt(2) are exterior, axis points |x| = 1 are boundary
    std::size_t exterior = count_class(*g, node_class::exterior);
    std::size_t boundary = count_class(*g, node_class::boundary);
    CHECK(exterior == 4);
    CHECK(boundary == 4);

    auto gt = rasterize(make_tower(2, 0, 0.0), 1.0 / 8);
    REQUIRE(count_class(*gt, node_class::pinned) == 1);
    for (std::size_t i = 0; i < gt->node_count(); ++i)
        if (gt->cls[i] == node_class::pinned) {
            const point x = gt->node_point(i);
            CHECK(x[0] == Catch::Approx(0.5));
            CHECK(x[1] == Catch::Approx(0.5));
        }
}

TEST_CASE("rasterize rejects grids beyond the node budget") {
    CHECK_THROWS_WITH(rasterize(make_box({0, 0}, {1, 1}), 1.0 / 4096, 100000),
                      Catch::Matchers::ContainsSubstring("node budget"));
}

TEST_CASE("distance fields match the closed forms") {
    auto gi = rasterize(make_interval(0, 1), 1.0 / 8);
    auto di = distance_field(gi);
    CHECK(di.v[1] == Catch::Approx(1.0 / 8));
    CHECK(di.v[4] == Catch::Approx(0.5));

    auto gb = rasterize(make_ball(2, point{}, 2.0), 0.25);
    auto db = distance_field(gb);
    const auto ir = inradius(db);
    CHECK(ir.value == Catch::Approx(2.0));
    CHECK(gb->node_point(ir.argmax_node)[0] == Catch::Approx(0.0));

    auto ga = rasterize(make_annulus(2, point{}, 0.5, 1.0), 1.0 / 16);
    auto da = distance_field(ga);
    CHECK(inradius(da).value == Catch::Approx(0.25).margin(1.0 / 16));
}

TEST_CASE("tower inradius reaches 5/12") {
    auto g = rasterize(make_tower(2, 1, 0.0), 1.0 / 48);
    auto d = distance_field(g);
    CHECK(inradius(d).value == Catch::Approx(5.0 / 12).margin(2.0 / 48));
}

TEST_CASE("distance L^q norms against analytic integrals") {
    auto gi = rasterize(make_interval(0, 1), 1.0 / 64);
    auto di = distance_field(gi);
    CHECK(distance_lq_norm(di, 1.0) == Catch::Approx(0.25).epsilon(1e-3));
    CHECK(distance_lq_norm(di, inf) == Catch::Approx(0.5));

    auto gb = rasterize(make_ball(2, point{}, 1.0), 1.0 / 32);
    auto db = distance_field(gb);
    CHECK(std::pow(distance_lq_norm(db, 1.0), 1.0) == Catch::Approx(pi / 3).epsilon(2e-3));

    auto gt = rasterize(make_tower(2, 3, 0.0), 1.0 / 16);
    auto dt = distance_field(gt);
    CHECK(std::pow(distance_lq_norm(dt, 1.0), 1.0) <= std::sqrt(2.0));
}

TEST_CASE("inradius upper bound: sharp on balls, strict on the square") {
    CHECK(inradius_upper_bound(1, 1.0, 0.25) == Catch::Approx(0.5)); // C_{1,1} = 1
    auto gb = rasterize(make_ball(2, point{}, 1.0), 1.0 / 48);
    auto db = distance_field(gb);
    const real bound =
        inradius_upper_bound(2, 1.0, std::pow(distance_lq_norm(db, 1.0), 1.0));
    CHECK(bound == Catch::Approx(1.0).margin(2.0 / 48));
    CHECK(inradius_upper_bound(2, 1.0, 0.0) == 0.0);

    auto gs = rasterize(make_box({0, 0}, {1, 1}), 1.0 / 48);
    auto ds = distance_field(gs);
    const real bs = inradius_upper_bound(2, 1.0, std::pow(distance_lq_norm(ds, 1.0), 1.0));
    CHECK(bs > inradius(ds).value + 0.02);
}

TEST_CASE("discrete distance fields are 1-Lipschitz across neighbors") {
    for (const auto& dom :
         {make_ball(2, point{}, 1.0), make_box({0, 0}, {1, 2}), make_tower(2, 1, 0.0)}) {
        auto g = rasterize(dom, 1.0 / 16);
        auto d = distance_field(g);
        real worst = 0;
        for (std::size_t f = 0; f < g->node_count(); ++f) {
            const auto idx = g->unflat(f);
            for (int ax = 0; ax < g->dim; ++ax) {
                auto nb = idx;
                ++nb[static_cast<std::size_t>(ax)];
                if (nb[static_cast<std::size_t>(ax)] >= g->shape[static_cast<std::size_t>(ax)])
                    continue;
                if (!g->is_interior(f) || !g->is_interior(g->flat(nb))) continue;
                worst = std::max(worst, std::abs(d.v[f] - d.v[g->flat(nb)]));
            }
        }
        CHECK(worst <= g->h * (1 + 1e-12));
    }
}

TEST_CASE("quasibounded profile decreases and obeys the tail bound") {
    const real alpha = std::sqrt(2.0 / std::pow(std::log(2.0), 3));
    auto dom = make_strip(alpha, 14.0);
    auto g = rasterize(dom, strip_profile(alpha, 14.0) / 4);
    auto d = distance_field(g);
    const auto profile = quasibounded_profile(d, {2.0, 6.0, 10.0}, 1.0);
    REQUIRE(profile.size() == 3);
    CHECK(profile[0].tail_sup > profile[1].tail_sup);
    CHECK(profile[1].tail_sup > profile[2].tail_sup);
    for (const auto& rec : profile)
        if (rec.bound_applicable) CHECK(rec.tail_sup <= rec.bound);

    // radius beyond the truncation is rejected naming the truncation
    CHECK_THROWS_WITH(quasibounded_profile(d, {100.0}),
                      Catch::Matchers::ContainsSubstring("truncation"));

    // a ball inside B_2 has an empty tail
    auto gb = rasterize(make_ball(2, point{}, 1.0), 1.0 / 16);
    auto db = distance_field(gb);
    const auto pb = quasibounded_profile(db, {1.2}, 1.0);
    CHECK(pb[0].tail_sup == 0.0);
}

TEST_CASE("enlarging a box never shrinks inradius or distance norms") {
    auto small = rasterize(make_box({0, 0}, {1.0, 1.0}), 1.0 / 16);
    auto large = rasterize(make_box({0, 0}, {1.5, 1.25}), 1.0 / 16);
    auto ds = distance_field(small), dl = distance_field(large);
    CHECK(inradius(dl).value >= inradius(ds).value - 1e-12);
    for (real q : {1.0, 2.0, 4.0})
        CHECK(distance_lq_norm(dl, q) >= distance_lq_norm(ds, q) - 1e-12);
}

TEST_CASE("punctured box with eps > 0 carves holes") {
    auto dom = make_punctured_box(2, 2, 0.2);
    auto g = rasterize(dom, 1.0 / 10);
    // the node at the lattice point (1,1) and its close neighbors are gone
    bool found_hole = false;
    for (std::size_t i = 0; i < g->node_count(); ++i) {
        const point x = g->node_point(i);
        if (std::abs(x[0] - 1.0) < 1e-12 && std::abs(x[1] - 1.0) < 1e-12) {
            CHECK(g->cls[i] != node_class::interior);
            found_hole = true;
        }
    }
    CHECK(found_hole);
    CHECK(count_class(*g, node_class::pinned) == 0);
    auto d = distance_field(g);
    CHECK(inradius(d).value <= std::sqrt(2.0) / 2);
}
