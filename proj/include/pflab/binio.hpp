#pragma once

#include <cstdio>
#include <cstring>
#include <fstream>

#include "pflab/field.hpp"

namespace pflab {

// Flat binary field format: 32-byte header
//   bytes  0-3   magic "PFLB"
//   bytes  4-7   u32 version (1)
//   bytes  8-11  u32 N
//   bytes 12-23  u32 shape[3] (1 for unused axes)
//   bytes 24-31  f64 h
// followed by node values as little-endian f64, axis 0 fastest.
inline constexpr std::uint32_t pflb_version = 1;

struct field_file {
    std::uint32_t version = 0;
    int dim = 0;
    std::array<int, 3> shape{1, 1, 1};
    real h = 0;
    std::vector<real> values;
};

inline void write_field_binary(const std::string& path, const grid_field& f) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "write_field_binary: cannot open " + path);
    const grid& g = *f.g;
    char header[32] = {};
    std::memcpy(header, "PFLB", 4);
    const std::uint32_t ver = pflb_version;
    const auto n = static_cast<std::uint32_t>(g.dim);
    std::memcpy(header + 4, &ver, 4);
    std::memcpy(header + 8, &n, 4);
    for (int i = 0; i < 3; ++i) {
        const std::uint32_t s = static_cast<std::uint32_t>(g.shape[static_cast<std::size_t>(i)]);
        std::memcpy(header + 12 + 4 * i, &s, 4);
    }
    std::memcpy(header + 24, &g.h, 8);
    out.write(header, 32);
    out.write(reinterpret_cast<const char*>(f.v.data()),
              static_cast<std::streamsize>(f.v.size() * sizeof(real)));
    require(out.good(), "write_field_binary: write failed for " + path);
}

inline field_file read_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "read_field_binary: cannot open " + path);
    char header[32];
    in.read(header, 32);
    require(in.gcount() == 32 && std::memcmp(header, "PFLB", 4) == 0,
            "read_field_binary: bad magic in " + path);
    field_file f;
    std::uint32_t n = 0;
    std::memcpy(&f.version, header + 4, 4);
    std::memcpy(&n, header + 8, 4);
    f.dim = static_cast<int>(n);
    require(f.version == pflb_version, "read_field_binary: unsupported version");
    require(f.dim >= 1 && f.dim <= 3, "read_field_binary: bad dimension");
    std::size_t count = 1;
    for (int i = 0; i < 3; ++i) {
        std::uint32_t s = 0;
        std::memcpy(&s, header + 12 + 4 * i, 4);
        f.shape[static_cast<std::size_t>(i)] = static_cast<int>(s);
        if (i < f.dim) count *= s;
    }
    std::memcpy(&f.h, header + 24, 8);
    f.values.resize(count);
    in.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(count * sizeof(real)));
    require(in.gcount() == static_cast<std::streamsize>(count * sizeof(real)),
            "read_field_binary: truncated file " + path);
    return f;
}

// Plain-text matrix export for small grids (rows = last axis, axis 0 across).
inline void write_field_text(const std::string& path, const grid_field& f,
                             std::size_t max_nodes = 100000) {
    const grid& g = *f.g;
    require(g.node_count() <= max_nodes, "write_field_text: grid too large for text export");
    std::ofstream out(path);
    require(out.good(), "write_field_text: cannot open " + path);
    char buf[64];
    const int nx = g.shape[0];
    const auto rows = g.node_count() / static_cast<std::size_t>(nx);
    for (std::size_t r = 0; r < rows; ++r) {
        for (int i = 0; i < nx; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", f.v[r * static_cast<std::size_t>(nx) +
                                                        static_cast<std::size_t>(i)]);
            out << buf << (i + 1 < nx ? " " : "");
        }
        out << "\n";
    }
}

} // namespace pflab
