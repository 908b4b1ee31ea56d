#pragma once

#include "pflab/grid.hpp"

namespace pflab {

// Scalar samples on a grid. Fields representing zero-trace functions carry
// exact zeros on boundary, exterior and pinned nodes.
struct grid_field {
    grid_ptr g;
    std::vector<real> v;

    real operator[](std::size_t i) const { return v[i]; }
    real& operator[](std::size_t i) { return v[i]; }
};

inline grid_field make_field(grid_ptr g) {
    grid_field f;
    f.v.assign(g->node_count(), 0.0);
    f.g = std::move(g);
    return f;
}

inline bool is_zero_trace(const grid_field& f) {
    for (std::size_t i = 0; i < f.v.size(); ++i)
        if (f.g->cls[i] != node_class::interior && f.v[i] != 0.0) return false;
    return true;
}

inline void enforce_zero_trace(grid_field& f) {
    for (std::size_t i = 0; i < f.v.size(); ++i)
        if (f.g->cls[i] != node_class::interior) f.v[i] = 0.0;
}

inline grid_field distance_field(grid_ptr g) {
    grid_field f = make_field(g);
    for (std::size_t i = 0; i < f.v.size(); ++i)
        if (f.g->cls[i] == node_class::interior) f.v[i] = f.g->domain.distance(f.g->node_point(i));
    return f;
}

} // namespace pflab
