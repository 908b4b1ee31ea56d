#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pflab {

using real = double;

inline constexpr real inf = std::numeric_limits<real>::infinity();

// Pairwise (tree) summation: bit-reproducible regardless of caller context
// and more accurate than naive left-to-right accumulation.
inline real tree_sum(std::span<const real> x) {
    if (x.size() <= 8) {
        real s = 0;
        for (real v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return tree_sum(x.subspan(0, half)) + tree_sum(x.subspan(half));
}

inline real tree_sum(const std::vector<real>& x) {
    return tree_sum(std::span<const real>(x));
}

// Accumulator that stores terms and reduces them pairwise on demand.
class sum_accumulator {
public:
    void add(real v) { terms_.push_back(v); }
    void reserve(std::size_t n) { terms_.reserve(n); }
    real total() const { return tree_sum(terms_); }
    std::size_t size() const { return terms_.size(); }

private:
    std::vector<real> terms_;
};

struct point {
    std::array<real, 3> x{0, 0, 0};

    real& operator[](int i) { return x[static_cast<std::size_t>(i)]; }
    real operator[](int i) const { return x[static_cast<std::size_t>(i)]; }
};

inline real dist2(const point& a, const point& b, int dim) {
    real s = 0;
    for (int i = 0; i < dim; ++i) {
        const real d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline real dist(const point& a, const point& b, int dim) {
    return std::sqrt(dist2(a, b, dim));
}

inline real norm(const point& a, int dim) {
    real s = 0;
    for (int i = 0; i < dim; ++i) s += a[i] * a[i];
    return std::sqrt(s);
}

[[noreturn]] inline void fail(const std::string& what) {
    throw std::invalid_argument(what);
}

inline void require(bool ok, const std::string& what) {
    if (!ok) fail(what);
}

} // namespace pflab
