#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "pflab/calculus.hpp"

using namespace pflab;

namespace {

grid_field hat_on_interval() {
    auto g = rasterize(make_interval(0, 1), 0.25);
    grid_field u = make_field(g);
    u.v = {0, 0.5, 1.0, 0.5, 0};
    return u;
}

} // namespace

TEST_CASE("p-energy of the interval hat function") {
    auto u = hat_on_interval();
    CHECK(p_energy(u, 2.0) == Catch::Approx(4.0));
    CHECK(p_energy(u, 3.0) == Catch::Approx(8.0));
    grid_field zero = make_field(u.g);
    CHECK(p_energy(zero, 2.0) == 0.0);
}

TEST_CASE("p-energy rejects fields outside the zero-trace class") {
    auto u = hat_on_interval();
    u.v[0] = 0.1;
    CHECK_THROWS_WITH(p_energy(u, 2.0), Catch::Matchers::ContainsSubstring("zero-trace"));
}

TEST_CASE("p-energy is exactly p-homogeneous") {
    auto u = hat_on_interval();
    for (real c : {-2.5, 0.3, 7.0})
        CHECK(p_energy([&] {
                  auto cu = u;
                  for (auto& x : cu.v) x *= c;
                  return cu;
              }(),
                       4.0) == Catch::Approx(std::pow(std::abs(c), 4.0) * p_energy(u, 4.0)));
}

TEST_CASE("lq norms of the interval distance field") {
    auto g = rasterize(make_interval(0, 1), 1.0 / 64);
    auto d = distance_field(g);
    CHECK(lq_norm(d, 1.0) == Catch::Approx(0.25).epsilon(1e-3));
    CHECK(lq_norm(d, inf) == Catch::Approx(0.5));
    grid_field zero = make_field(g);
    CHECK(lq_norm(zero, 2.0) == 0.0);
}

TEST_CASE("holder seminorms of the interval distance field") {
    auto g = rasterize(make_interval(0, 1), 1.0 / 32);
    auto d = distance_field(g);
    auto lips = holder_seminorm(d, 1.0);
    CHECK(lips.exact);
    CHECK(lips.value == Catch::Approx(1.0));
    auto half = holder_seminorm(d, 0.5);
    CHECK(half.value <= 1.0 + 1e-12); // (2 r)^{1-beta} = 1 here
}

TEST_CASE("holder bound (2r)^{1-beta} holds on the catalog") {
    for (const auto& dom : {make_box({0, 0}, {1, 2}), make_ball(2, point{}, 0.75)}) {
        auto g = rasterize(dom, 1.0 / 12);
        auto d = distance_field(g);
        const real r = inradius(d).value;
        for (real beta : {0.3, 0.5, 0.9}) {
            const auto s = holder_seminorm(d, beta);
            CHECK(s.value <= std::pow(2 * r, 1 - beta) * (1 + 1e-12));
        }
    }
}

TEST_CASE("zero-extension identity for grid seminorms on lattice-aligned domains") {
    auto g = rasterize(make_box({0, 0}, {1.0, 1.5}), 1.0 / 10);
    grid_field u = make_field(g);
    std::mt19937 gen(7);
    for (std::size_t i = 0; i < u.v.size(); ++i)
        if (g->cls[i] == node_class::interior)
            u.v[i] = std::generate_canonical<real, 53>(gen) - 0.3;
    // restricted seminorm over interior + boundary nodes only
    std::vector<std::size_t> closure;
    for (std::size_t i = 0; i < g->node_count(); ++i)
        if (g->cls[i] != node_class::exterior) closure.push_back(i);
    for (real beta : {0.4, 1.0}) {
        real restricted = 0;
        for (std::size_t a = 0; a < closure.size(); ++a)
            for (std::size_t b = a + 1; b < closure.size(); ++b) {
                const real diff = std::abs(u.v[closure[a]] - u.v[closure[b]]);
                if (diff == 0) continue;
                restricted = std::max(
                    restricted,
                    diff / std::pow(dist(g->node_point(closure[a]), g->node_point(closure[b]),
                                         g->dim),
                                    beta));
            }
        CHECK(holder_seminorm(u, beta).value == Catch::Approx(restricted));
    }
}

TEST_CASE("hardy quotient exponents and scale invariance") {
    CHECK(hardy_weight_exponent(4.0, 4.0, 2) == Catch::Approx(1.0));
    CHECK(hardy_weight_exponent(4.0, inf, 2) == Catch::Approx(0.5));
    CHECK(hardy_weight_exponent(4.0, 8.0, 2) == Catch::Approx(2.0 / 8 + 2.0 / 4));

    auto g = rasterize(make_ball(2, point{}, 1.0), 1.0 / 12);
    auto d = distance_field(g);
    grid_field u = d;
    const real q0 = hardy_quotient(u, d, 4.0, 4.0, g->h);
    grid_field cu = u;
    for (auto& x : cu.v) x *= -3.7;
    CHECK(hardy_quotient(cu, d, 4.0, 4.0, g->h) == Catch::Approx(q0));
    CHECK_THROWS_WITH(hardy_quotient(u, d, 4.0, 2.0, g->h),
                      Catch::Matchers::ContainsSubstring("q in [p, inf]"));

    // u = d on the interval with p = 4, q = p: weight cancels, quotient = 1
    auto gi = rasterize(make_interval(0, 1), 1.0 / 64);
    auto di = distance_field(gi);
    CHECK(hardy_quotient(di, di, 4.0, 4.0, 1e-9) == Catch::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("interpolation audit on the interval distance field") {
    auto g = rasterize(make_interval(0, 1), 1.0 / 40);
    auto d = distance_field(g);
    const auto interp = make_holder_interp(1.0, 0.5, 1.0, 1);
    const auto res = interpolation_audit(d, interp);
    CHECK(res.pass_beta);
    CHECK(res.pass_sup);
    CHECK(res.margin_beta > 0);
    CHECK(res.margin_sup > 0);
}

TEST_CASE("interpolation audit passes for random zero-trace fields on the square") {
    auto g = rasterize(make_box({0, 0}, {1, 1}), 1.0 / 40);
    std::mt19937 gen(20230117);
    for (int it = 0; it < 50; ++it) {
        grid_field u = make_field(g);
        for (std::size_t i = 0; i < u.v.size(); ++i)
            if (g->cls[i] == node_class::interior)
                u.v[i] = 2.0 * std::generate_canonical<real, 53>(gen) - 1.0;
        const real alpha = 0.5 + 0.5 * std::generate_canonical<real, 53>(gen);
        const real beta = 0.2 * alpha + 0.6 * alpha * std::generate_canonical<real, 53>(gen);
        const real gamma = 1.0 + 3.0 * std::generate_canonical<real, 53>(gen);
        const auto res = interpolation_audit(u, make_holder_interp(alpha, beta, gamma, 2));
        CHECK(res.pass_beta);
        CHECK(res.pass_sup);
    }
}

TEST_CASE("interpolation audit refuses grids beyond the pair budget") {
    auto g = rasterize(make_box({0, 0}, {1, 1}), 1.0 / 64); // 65^2 nodes, > 2e6 pairs
    auto d = distance_field(g);
    CHECK_THROWS_WITH(interpolation_audit(d, make_holder_interp(1.0, 0.5, 1.0, 2)),
                      Catch::Matchers::ContainsSubstring("pair budget"));
    CHECK_FALSE(holder_seminorm(d, 0.5).exact); // subsampled mode is flagged
}

TEST_CASE("pointwise Poincare constant is finite and stable under refinement") {
    // 100 random W^{1,p} fields on ball grids vanishing at one boundary node
    const real p = 4.0;
    auto fitted = [&](real h) {
        auto g = rasterize(make_ball(2, point{}, 1.0), h);
        std::size_t znode = 0;
        real best = inf;
        for (std::size_t i = 0; i < g->node_count(); ++i) {
            const point x = g->node_point(i);
            const real gap = std::abs(norm(x, 2) - 1.0) + std::abs(x[1]);
            if (gap < best) {
                best = gap;
                znode = i;
            }
        }
        std::mt19937 gen(42);
        real c = 0;
        for (int it = 0; it < 100; ++it) {
            std::vector<real> u(g->node_count());
            const real a0 = 2.0 * std::generate_canonical<real, 53>(gen) - 1.0;
            const real kx = 3.0 * std::generate_canonical<real, 53>(gen);
            const real ky = 3.0 * std::generate_canonical<real, 53>(gen);
            const real ph = 6.28 * std::generate_canonical<real, 53>(gen);
            for (std::size_t i = 0; i < u.size(); ++i) {
                const point x = g->node_point(i);
                u[i] = a0 + std::sin(kx * x[0] + ph) * std::cos(ky * x[1]);
            }
            const real shift = u[znode];
            for (auto& v : u) v -= shift; // vanish at the boundary node
            const real num = std::pow(lq_integral(*g, u, p), 1.0 / p);
            const real den = std::pow(p_energy_raw(*g, u, p, &g->cell_frac).value, 1.0 / p);
            if (den > 0) c = std::max(c, num / den);
        }
        return c;
    };
    const real c16 = fitted(1.0 / 16);
    const real c24 = fitted(1.0 / 24);
    CHECK(std::isfinite(c16));
    CHECK(std::isfinite(c24));
    CHECK(c24 <= 1.5 * c16);
    CHECK(c16 <= 1.5 * c24);
}
