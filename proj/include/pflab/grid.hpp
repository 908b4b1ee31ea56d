#pragma once

#include <memory>

#include "pflab/domain.hpp"

namespace pflab {

enum class node_class : std::uint8_t { interior, boundary, exterior, pinned };

inline constexpr std::size_t default_node_budget = 4'000'000;

struct grid {
    domain_spec domain;
    int dim = 1;
    std::array<real, 3> origin{{0, 0, 0}};
    real h = 0;
    std::array<int, 3> shape{{1, 1, 1}}; // node counts per axis
    std::vector<node_class> cls;
    std::vector<real> cell_frac; // |cell inside Omega| / h^N, per cell

    std::size_t node_count() const {
        std::size_t n = 1;
        for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(shape[static_cast<std::size_t>(i)]);
        return n;
    }

    std::size_t cell_count() const {
        std::size_t n = 1;
        for (int i = 0; i < dim; ++i)
            n *= static_cast<std::size_t>(shape[static_cast<std::size_t>(i)] - 1);
        return n;
    }

    std::array<int, 3> cells_per_axis() const {
        std::array<int, 3> c{1, 1, 1};
        for (int i = 0; i < dim; ++i)
            c[static_cast<std::size_t>(i)] = shape[static_cast<std::size_t>(i)] - 1;
        return c;
    }

    std::size_t flat(const std::array<int, 3>& idx) const {
        std::size_t f = 0;
        for (int i = dim - 1; i >= 0; --i)
            f = f * static_cast<std::size_t>(shape[static_cast<std::size_t>(i)]) +
                static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
        return f;
    }

    std::array<int, 3> unflat(std::size_t f) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int i = 0; i < dim; ++i) {
            const auto n = static_cast<std::size_t>(shape[static_cast<std::size_t>(i)]);
            idx[static_cast<std::size_t>(i)] = static_cast<int>(f % n);
            f /= n;
        }
        return idx;
    }

    // stride of axis i in flat node indexing
    std::size_t stride(int axis) const {
        std::size_t s = 1;
        for (int i = 0; i < axis; ++i) s *= static_cast<std::size_t>(shape[static_cast<std::size_t>(i)]);
        return s;
    }

    point node_point(const std::array<int, 3>& idx) const {
        point x{};
        for (int i = 0; i < dim; ++i)
            x[i] = origin[static_cast<std::size_t>(i)] +
                   h * static_cast<real>(idx[static_cast<std::size_t>(i)]);
        return x;
    }

    point node_point(std::size_t f) const { return node_point(unflat(f)); }

    bool is_interior(std::size_t f) const { return cls[f] == node_class::interior; }

    // iterate cells by lower-corner node index; calls fn(cell_flat, corner_flat)
    template <class Fn>
    void for_each_cell(Fn&& fn) const {
        const auto cpa = cells_per_axis();
        std::array<int, 3> idx{0, 0, 0};
        std::size_t cell = 0;
        while (true) {
            fn(cell, flat(idx));
            ++cell;
            int axis = 0;
            while (axis < dim) {
                if (++idx[static_cast<std::size_t>(axis)] < cpa[static_cast<std::size_t>(axis)]) break;
                idx[static_cast<std::size_t>(axis)] = 0;
                ++axis;
            }
            if (axis >= dim) break;
        }
    }

    point cell_lower(std::size_t cell) const {
        const auto cpa = cells_per_axis();
        std::array<int, 3> idx{0, 0, 0};
        std::size_t f = cell;
        for (int i = 0; i < dim; ++i) {
            const auto n = static_cast<std::size_t>(cpa[static_cast<std::size_t>(i)]);
            idx[static_cast<std::size_t>(i)] = static_cast<int>(f % n);
            f /= n;
        }
        return node_point(idx);
    }
};

using grid_ptr = std::shared_ptr<const grid>;

// boundary_snap: nodes strictly inside the open set but within that distance
// of the boundary are classified as boundary. Default 0 keeps the exact
// point-membership classification; curved thin domains (the strip barrier
// experiment) use h/2 so the pinned stencil does not see interior nodes a
// hair away from the curve.
inline grid_ptr rasterize(const domain_spec& dom, real h,
                          std::size_t node_budget = default_node_budget,
                          real boundary_snap = 0.0) {
    require(h > 0, "rasterize: requires h > 0");
    auto g = std::make_shared<grid>();
    g->domain = dom;
    g->dim = dom.dim;
    g->h = h;
    std::array<real, 3> blo{}, bhi{};
    dom.bounding_box(blo, bhi);
    std::size_t nodes = 1;
    for (int i = 0; i < dom.dim; ++i) {
        const real extent = bhi[static_cast<std::size_t>(i)] - blo[static_cast<std::size_t>(i)];
        const real cells = extent / h;
        auto ncells = static_cast<int>(std::llround(cells));
        if (std::abs(cells - ncells) >= 1e-6 * std::max<real>(1, cells))
            ncells = static_cast<int>(std::ceil(cells)); // pad axes h does not divide
        require(ncells >= 1, "rasterize: h larger than the bounding box");
        g->origin[static_cast<std::size_t>(i)] = blo[static_cast<std::size_t>(i)];
        g->shape[static_cast<std::size_t>(i)] = ncells + 1;
        nodes *= static_cast<std::size_t>(ncells + 1);
    }
    if (nodes > node_budget) {
        std::ostringstream s;
        s << "rasterize: grid of " << nodes << " nodes exceeds the node budget of "
          << node_budget;
        fail(s.str());
    }

    const real snap = 1e-9 * std::max<real>(1, dom.bounding_radius());
    g->cls.resize(nodes);
    for (std::size_t f = 0; f < nodes; ++f) {
        const point x = g->node_point(f);
        if (dom.contains(x))
            g->cls[f] = boundary_snap > 0 && dom.distance(x) <= boundary_snap
                            ? node_class::boundary
                            : node_class::interior;
        else
            g->cls[f] = dom.exterior_gap(x) <= snap ? node_class::boundary : node_class::exterior;
    }

    // removed centers with eps = 0 pin the nearest node
    if ((dom.kind == domain_spec::kind_t::tower ||
         dom.kind == domain_spec::kind_t::punctured_box) &&
        dom.hole_radius == 0) {
        for (const auto& c : dom.removed) {
            std::array<int, 3> idx{0, 0, 0};
            for (int i = 0; i < dom.dim; ++i) {
                const real t = (c[i] - g->origin[static_cast<std::size_t>(i)]) / h;
                idx[static_cast<std::size_t>(i)] = std::clamp(
                    static_cast<int>(std::llround(t)), 0, g->shape[static_cast<std::size_t>(i)] - 1);
            }
            g->cls[g->flat(idx)] = node_class::pinned;
        }
    }

    // interior nodes must have all axis neighbors inside the array bounds
    for (std::size_t f = 0; f < nodes; ++f) {
        if (g->cls[f] != node_class::interior) continue;
        const auto idx = g->unflat(f);
        for (int i = 0; i < dom.dim; ++i) {
            const int v = idx[static_cast<std::size_t>(i)];
            require(v > 0 && v < g->shape[static_cast<std::size_t>(i)] - 1,
                    "rasterize: interior node on the array edge (bounding box too tight)");
        }
    }

    g->cell_frac.resize(g->cell_count());
    g->for_each_cell([&](std::size_t cell, std::size_t) {
        g->cell_frac[cell] = cell_volume_fraction(dom, g->cell_lower(cell), h);
    });
    return g;
}

inline std::size_t count_class(const grid& g, node_class c) {
    std::size_t n = 0;
    for (auto k : g.cls)
        if (k == c) ++n;
    return n;
}

// Reclassify interior nodes outside the largest connected component as
// exterior. Used where lattice pinch-off creates spurious single-node
// pockets (the continuum region stays connected around removed balls).
inline grid_ptr restrict_to_main_component(const grid& g);

// Flood fill over interior nodes with axis adjacency; returns the number of
// connected components (0 if there are no interior nodes).
inline int interior_components(const grid& g) {
    std::vector<std::uint8_t> seen(g.node_count(), 0);
    int comps = 0;
    std::vector<std::size_t> stack;
    for (std::size_t f0 = 0; f0 < g.node_count(); ++f0) {
        if (!g.is_interior(f0) || seen[f0]) continue;
        ++comps;
        stack.push_back(f0);
        seen[f0] = 1;
        while (!stack.empty()) {
            const std::size_t f = stack.back();
            stack.pop_back();
            const auto idx = g.unflat(f);
            for (int i = 0; i < g.dim; ++i) {
                for (int dir : {-1, 1}) {
                    auto nb = idx;
                    nb[static_cast<std::size_t>(i)] += dir;
                    if (nb[static_cast<std::size_t>(i)] < 0 ||
                        nb[static_cast<std::size_t>(i)] >= g.shape[static_cast<std::size_t>(i)])
                        continue;
                    const std::size_t fn = g.flat(nb);
                    if (!seen[fn] && g.is_interior(fn)) {
                        seen[fn] = 1;
                        stack.push_back(fn);
                    }
                }
            }
        }
    }
    return comps;
}

inline grid_ptr restrict_to_main_component(const grid& g) {
    std::vector<int> comp(g.node_count(), -1);
    std::vector<std::size_t> stack;
    std::vector<std::size_t> sizes;
    for (std::size_t f0 = 0; f0 < g.node_count(); ++f0) {
        if (!g.is_interior(f0) || comp[f0] >= 0) continue;
        const int c = static_cast<int>(sizes.size());
        sizes.push_back(0);
        stack.push_back(f0);
        comp[f0] = c;
        while (!stack.empty()) {
            const std::size_t f = stack.back();
            stack.pop_back();
            ++sizes[static_cast<std::size_t>(c)];
            const auto idx = g.unflat(f);
            for (int i = 0; i < g.dim; ++i)
                for (int dir : {-1, 1}) {
                    auto nb = idx;
                    nb[static_cast<std::size_t>(i)] += dir;
                    if (nb[static_cast<std::size_t>(i)] < 0 ||
                        nb[static_cast<std::size_t>(i)] >= g.shape[static_cast<std::size_t>(i)])
                        continue;
                    const std::size_t fn = g.flat(nb);
                    if (g.is_interior(fn) && comp[fn] < 0) {
                        comp[fn] = c;
                        stack.push_back(fn);
                    }
                }
        }
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < sizes.size(); ++c)
        if (sizes[c] > sizes[best]) best = c;
    auto out = std::make_shared<grid>(g);
    for (std::size_t f = 0; f < g.node_count(); ++f)
        if (g.is_interior(f) && comp[f] != static_cast<int>(best))
            out->cls[f] = node_class::exterior;
    return out;
}

} // namespace pflab
