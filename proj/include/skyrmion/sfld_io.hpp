#pragma once

// SFLD binary fields: "SFLD", u32 version, u32 nx, u32 ny, f64 h, f64 origin_x,
// f64 origin_y, then nx * ny * 3 f64 (x fastest, components interleaved).
// Everything little-endian.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "skyrmion/field.hpp"

namespace skyrmion {

class SfldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kSfldVersion = 1;

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
    std::array<unsigned char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    os.write(reinterpret_cast<const char*>(b.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> b;
    if (!is.read(reinterpret_cast<char*>(b.data()), sizeof(T))) throw SfldError("SFLD: truncated stream");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    T v;
    std::memcpy(&v, b.data(), sizeof(T));
    return v;
}

}  // namespace detail

inline void write_sfld(std::ostream& os, const SpinField& f) {
    const auto& g = f.geometry();
    if (g.nx > std::numeric_limits<std::uint32_t>::max() || g.ny > std::numeric_limits<std::uint32_t>::max())
        throw SfldError("SFLD: grid too large");
    os.write("SFLD", 4);
    detail::put_le<std::uint32_t>(os, kSfldVersion);
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.nx));
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.ny));
    detail::put_le(os, g.h);
    detail::put_le(os, g.origin_x);
    detail::put_le(os, g.origin_y);
    for (const auto& v : f.data())
        for (int c = 0; c < 3; ++c) detail::put_le(os, v[c]);
    if (!os) throw SfldError("SFLD: write failed");
}

/// Reads a field; the ring is accepted up to ring_tolerance (default: any ring).
inline SpinField read_sfld(std::istream& is, double ring_tolerance = 2.0 + 1e-9) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "SFLD", 4) != 0) throw SfldError("SFLD: bad magic");
    const auto version = detail::get_le<std::uint32_t>(is);
    if (version != kSfldVersion) throw SfldError("SFLD: unsupported version " + std::to_string(version));
    GridGeometry g;
    g.nx = detail::get_le<std::uint32_t>(is);
    g.ny = detail::get_le<std::uint32_t>(is);
    g.h = detail::get_le<double>(is);
    g.origin_x = detail::get_le<double>(is);
    g.origin_y = detail::get_le<double>(is);
    if (g.nx == 0 || g.ny == 0 || g.size() > (std::size_t{1} << 31)) throw SfldError("SFLD: bad dimensions");
    std::vector<Vec3> m(g.size());
    for (auto& v : m)
        for (int c = 0; c < 3; ++c) v[c] = detail::get_le<double>(is);
    try {
        return SpinField(g, std::move(m), ring_tolerance);
    } catch (const FieldError& e) {
        throw SfldError(std::string("SFLD: ") + e.what());
    }
}

inline void save_sfld(const std::string& path, const SpinField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw SfldError("SFLD: cannot open " + path);
    write_sfld(os, f);
}

inline SpinField load_sfld(const std::string& path, double ring_tolerance = 2.0 + 1e-9) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw SfldError("SFLD: cannot open " + path);
    return read_sfld(is, ring_tolerance);
}

}  // namespace skyrmion
