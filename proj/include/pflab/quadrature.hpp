#pragma once

#include <functional>

#include "pflab/common.hpp"

namespace pflab {

namespace detail {

inline real simpson(real a, real b, real fa, real fm, real fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline real adaptive_simpson_rec(const std::function<real(real)>& f, real a, real b, real fa,
                                 real fm, real fb, real whole, real tol, int depth) {
    const real m = 0.5 * (a + b);
    const real lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const real flm = f(lm), frm = f(rm);
    const real left = simpson(a, m, fa, flm, fm);
    const real right = simpson(m, b, fm, frm, fb);
    const real delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson quadrature on [a,b].
inline real integrate(const std::function<real(real)>& f, real a, real b, real tol = 1e-12) {
    if (a == b) return 0.0;
    const real fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const real whole = detail::simpson(a, b, fa, fm, fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Area of disk(center (cx,cy), radius r) intersected with the rectangle
// [x0,x1] x [y0,y1]. The clipped chord length is piecewise smooth with a
// handful of breakpoints, so adaptive quadrature recovers the area to
// near machine precision.
inline real disk_rect_area(real cx, real cy, real r, real x0, real x1, real y0, real y1) {
    if (r <= 0) return 0;
    x0 -= cx; x1 -= cx; y0 -= cy; y1 -= cy;
    x0 = std::clamp(x0, -r, r);
    x1 = std::clamp(x1, -r, r);
    if (x1 <= x0 || y0 >= r || y1 <= -r) return 0;
    auto chord = [&](real x) {
        const real s = std::sqrt(std::max<real>(0, r * r - x * x));
        const real top = std::min(y1, s);
        const real bot = std::max(y0, -s);
        return top > bot ? top - bot : 0.0;
    };
    // split at the breakpoints where the chord switches between circle and box
    std::vector<real> cuts{x0, x1};
    for (real y : {y0, y1}) {
        if (std::abs(y) < r) {
            const real xc = std::sqrt(r * r - y * y);
            for (real c : {-xc, xc})
                if (c > x0 && c < x1) cuts.push_back(c);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    real area = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        area += integrate(chord, cuts[i], cuts[i + 1], 1e-15 * r * r + 1e-300);
    return area;
}

} // namespace pflab
